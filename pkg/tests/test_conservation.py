"""
Unit tests for conservation laws: the adjoint determining equation, the Euler
operator, self-adjointness and conserved currents.
"""

from __future__ import annotations

import pytest

from jetcalc.ansatz import AnsatzSpec, span_contains
from jetcalc.calculus import GeneratingFunction, total_derivative
from jetcalc.conservation import (
    ConservedCurrent,
    adjoint_residual,
    euler_lagrange_system,
    euler_operator,
    self_adjointness_check,
    solve_adjoint_determining,
    verify_conserved_current,
)
from jetcalc.context import JetContext
from jetcalc.equation import new_system
from jetcalc.errors import InvalidSystemError, ShapeMismatchError
from jetcalc.loader import load_system
from jetcalc.symmetry import solve_determining
from tests.conftest import SYSTEMS_DIR, XT_U, P, random_polynomial

X_U = JetContext(("x",), ("u",))


def gf(text: str) -> GeneratingFunction:
    return GeneratingFunction.parse(text, XT_U)


class TestAdjointResidual:
    @pytest.mark.parametrize("upsilon", ["1", "u", "u^2/2 + u_xx"])
    def test_kdv_laws(self, kdv, upsilon):
        assert adjoint_residual(kdv, gf(upsilon))[0].is_zero

    def test_rejects_u_x(self, kdv):
        assert adjoint_residual(kdv, gf("u_x")) == [P("-u_x^2")]


class TestSolveAdjointDetermining:
    def test_kdv(self, kdv):
        basis = solve_adjoint_determining(kdv, AnsatzSpec(order=2, degree=2))
        assert len(basis) == 3
        assert span_contains(basis, [gf("1"), gf("u"), gf("u^2/2 + u_xx")])

    def test_trivial_system(self):
        system = new_system(XT_U, ["u_t = 0"])
        basis = solve_adjoint_determining(system, AnsatzSpec(order=0, degree=1))
        assert span_contains(basis, [gf("1"), gf("u")])

    def test_burgers_mass(self, burgers):
        basis = solve_adjoint_determining(burgers, AnsatzSpec(order=0, degree=1))
        assert span_contains(basis, [gf("1")])
        for member in basis:
            assert adjoint_residual(burgers, member)[0].is_zero


class TestEulerOperator:
    def test_kinetic(self):
        assert euler_operator(P("u_x^2/2"), XT_U) == gf("-u_xx")

    def test_kdv_energy(self):
        assert euler_operator(P("u^3/6 - u_x^2/2"), XT_U) == gf("u^2/2 + u_xx")

    def test_annihilates_divergences(self, rng):
        for _ in range(100):
            e = random_polynomial(rng, XT_U, max_order=2)
            assert euler_operator(total_derivative(e, 0), XT_U).is_zero
            assert euler_operator(total_derivative(e, 1), XT_U).is_zero

    def test_euler_lagrange_system(self):
        system = euler_lagrange_system(P("u^3/6 - u_x^2/2", X_U), X_U)
        (equation,) = system.equations
        assert X_U.name_of(equation.leader) == "u_xx"
        assert equation.rhs == P("-u^2/2", X_U)

    def test_euler_lagrange_rejects_nonlinear_top(self):
        with pytest.raises(InvalidSystemError):
            euler_lagrange_system(P("u", X_U), X_U)

    @pytest.mark.parametrize("lagrangian", ["u_x^2/2", "u^3/6 - u_x^2/2", "u_x^2/2 + u^4"])
    def test_euler_lagrange_is_self_adjoint(self, lagrangian):
        system = euler_lagrange_system(P(lagrangian, X_U), X_U)
        report = self_adjointness_check(system)
        assert report.self_adjoint


class TestSelfAdjointness:
    @pytest.mark.parametrize("lagrangian", ["u_x^2/2", "u^3/6 - u_x^2/2"])
    def test_symmetries_and_conservation_laws_coincide(self, lagrangian):
        system = euler_lagrange_system(P(lagrangian, X_U), X_U)
        spec = AnsatzSpec(order=1, degree=2)
        symmetries = solve_determining(system, spec)
        laws = solve_adjoint_determining(system, spec)
        assert symmetries
        assert span_contains(symmetries, laws)
        assert span_contains(laws, symmetries)
        assert span_contains(laws, [GeneratingFunction.parse("u_x", X_U)])

    def test_laplace_symmetries_and_conservation_laws_coincide(self):
        system = load_system(str(SYSTEMS_DIR / "laplace.sys"))
        spec = AnsatzSpec(order=1, degree=1)
        symmetries = solve_determining(system, spec)
        laws = solve_adjoint_determining(system, spec)
        assert len(symmetries) == len(laws)
        assert span_contains(symmetries, laws) and span_contains(laws, symmetries)

    def test_laplace(self):
        report = self_adjointness_check(load_system(str(SYSTEMS_DIR / "laplace.sys")))
        assert report.self_adjoint
        assert report.self_adjoint_on_solutions
        assert report.difference == ["[0,0] 0"]

    def test_kdv(self, kdv):
        report = self_adjointness_check(kdv)
        assert not report.self_adjoint
        assert not report.self_adjoint_on_solutions
        assert report.conformal_factor == "1"

    def test_conformal_factor(self, heat):
        # ℓ* = -D_t - D_x^2 and ℓ = D_t - D_x^2 differ for every constant factor
        report = self_adjointness_check(heat, P("-1"))
        assert not report.self_adjoint


class TestConservedCurrent:
    def test_kdv_mass(self, kdv):
        current = ConservedCurrent.parse("-u^2/2 - u_xx; u", XT_U)
        assert verify_conserved_current(kdv, current).is_zero

    def test_zero(self, kdv):
        assert verify_conserved_current(kdv, ConservedCurrent.of(0, 0)).is_zero

    def test_not_conserved(self, kdv):
        divergence = verify_conserved_current(kdv, ConservedCurrent.of(0, P("u_x")))
        assert divergence == P("u_x^2 + u*u_xx + u_xxxx")

    def test_length_checked(self):
        with pytest.raises(ShapeMismatchError):
            ConservedCurrent.parse("u", XT_U)

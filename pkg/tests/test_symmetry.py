"""
Unit tests for higher symmetries: residuals, the ansatz solver, Jacobi
brackets, classification, invariant systems, formal integration and the KdV
recursion operator.
"""

from __future__ import annotations

import pytest

from jetcalc.ansatz import AnsatzSpec, ansatz_size, span_contains
from jetcalc.calculus import GeneratingFunction, horizontal_derivative
from jetcalc.context import JetContext
from jetcalc.equation import new_system
from jetcalc.errors import (
    AnsatzLimitError,
    InvalidSystemError,
    NotExactError,
    ShapeMismatchError,
)
from jetcalc.expr import partial
from jetcalc.symmetry import (
    RecursionOperator,
    SymmetryKind,
    apply_recursion,
    classify,
    formal_integrate,
    invariant_system,
    jacobi_bracket,
    point_symmetry_from_field,
    solve_determining,
    symmetry_residual,
)
from tests.conftest import XT_U, P, random_polynomial

X = 0

KDV_FLOW = "u*u_x + u_xxx"
KDV_FIFTH = "u_xxxxx + 5/3*u*u_xxx + 10/3*u_x*u_xx + 5/6*u^2*u_x"
BURGERS_GENERATORS = ["u_x", "u_xx + u*u_x", "t*u_x + 1", "x*u_x + 2*t*(u_xx + u*u_x) + u"]


def gf(text: str) -> GeneratingFunction:
    return GeneratingFunction.parse(text, XT_U)


class TestSymmetryResidual:
    def test_own_flow(self, kdv):
        assert symmetry_residual(kdv, gf(KDV_FLOW)) == [P("0")]

    def test_not_a_symmetry(self, kdv):
        assert symmetry_residual(kdv, gf("u")) == [P("-u*u_x")]

    @pytest.mark.parametrize("phi", BURGERS_GENERATORS)
    def test_burgers_generators(self, burgers, phi):
        assert symmetry_residual(burgers, gf(phi))[0].is_zero

    def test_reduces_phi_first(self, kdv):
        # u_t is the flow itself once reduced
        assert symmetry_residual(kdv, gf("u_t"))[0].is_zero

    def test_length_checked(self, kdv):
        with pytest.raises(ShapeMismatchError):
            symmetry_residual(kdv, GeneratingFunction.of(P("u"), P("u")))


class TestSolveDetermining:
    def test_burgers_basis(self, burgers):
        basis = solve_determining(burgers, AnsatzSpec(order=2, degree=2, xt_degree=1))
        assert span_contains(basis, [gf(p) for p in BURGERS_GENERATORS])
        for member in basis:
            assert symmetry_residual(burgers, member)[0].is_zero

    def test_kdv_hierarchy(self, kdv):
        basis = solve_determining(kdv, AnsatzSpec(order=5, degree=3))
        assert len(basis) == 3
        assert span_contains(basis, [gf("u_x"), gf(KDV_FLOW), gf(KDV_FIFTH)])

    def test_trivial_system(self):
        system = new_system(XT_U, ["u_t = 0"])
        basis = solve_determining(system, AnsatzSpec(order=0, degree=1))
        assert len(basis) == 2
        assert span_contains(basis, [gf("u"), gf("1")])

    def test_deterministic(self, burgers):
        spec = AnsatzSpec(order=1, degree=2, xt_degree=1)
        first = [b.render(XT_U) for b in solve_determining(burgers, spec)]
        second = [b.render(XT_U) for b in solve_determining(burgers, spec)]
        assert first == second

    def test_limit(self, kdv):
        spec = AnsatzSpec(order=5, degree=3)
        assert ansatz_size(kdv, spec) == 84
        with pytest.raises(AnsatzLimitError, match="84"):
            solve_determining(kdv, spec, limit=50)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            AnsatzSpec(order=-1, degree=2)
        with pytest.raises(ValueError):
            AnsatzSpec(order=1, degree=0)


class TestJacobiBracket:
    def test_self_bracket(self):
        phi = gf("u*u_xx + x")
        assert jacobi_bracket(phi, phi).is_zero

    def test_translation(self, rng):
        for _ in range(20):
            psi = random_polynomial(rng, XT_U, max_order=2)
            result = jacobi_bracket(gf("u_x"), GeneratingFunction.of(psi))
            assert result[0] == -partial(psi, XT_U.x(0))

    def test_antisymmetry_and_jacobi(self, rng):
        for _ in range(50):
            a, b, c = (GeneratingFunction.of(random_polynomial(rng, XT_U, max_order=2)) for _ in range(3))
            assert jacobi_bracket(a, b) == jacobi_bracket(b, a).scale(-1)
            total = (
                jacobi_bracket(a, jacobi_bracket(b, c))
                + jacobi_bracket(b, jacobi_bracket(c, a))
                + jacobi_bracket(c, jacobi_bracket(a, b))
            )
            assert total.is_zero

    def test_kdv_flows_commute(self, kdv):
        assert jacobi_bracket(gf(KDV_FLOW), gf(KDV_FIFTH), kdv).is_zero

    def test_closure_on_burgers(self, burgers):
        generators = [gf(p) for p in BURGERS_GENERATORS]
        for a in generators:
            for b in generators:
                assert symmetry_residual(burgers, jacobi_bracket(a, b, burgers))[0].is_zero


class TestClassify:
    def test_galilean_is_point(self):
        result = classify(gf("t*u_x + 1"), XT_U)
        assert result.kind is SymmetryKind.POINT
        assert result.generator.a == (P("-t"), P("0"))
        assert result.generator.b == (P("1"),)
        assert result.generator.render(XT_U) == "-t*d/dx + d/du"

    def test_contact(self):
        assert classify(gf("u_x^2"), XT_U).kind is SymmetryKind.CONTACT

    def test_higher(self):
        assert classify(gf(KDV_FLOW), XT_U).kind is SymmetryKind.HIGHER

    def test_contact_needs_one_dependent(self):
        ctx = JetContext(("x", "t"), ("u", "v"))
        phi = GeneratingFunction.parse("u_x^2; v", ctx)
        assert classify(phi, ctx).kind is SymmetryKind.HIGHER

    def test_shared_field_across_components(self):
        ctx = JetContext(("x", "t"), ("u", "v"))
        phi = GeneratingFunction.parse("u_x; v_x", ctx)
        result = classify(phi, ctx)
        assert result.kind is SymmetryKind.POINT
        assert result.generator.render(ctx) == "-d/dx"

    def test_from_field_round_trip(self):
        phi = point_symmetry_from_field([P("-t"), 0], [1], XT_U)
        assert phi == gf("t*u_x + 1")


class TestInvariantSystem:
    def test_translation(self, kdv):
        report = invariant_system(kdv, [gf("u_x")])
        assert report.equations == ["u_t = u*u_x + u_xxx"]
        assert report.constraints == ["u_x = 0"]
        assert report.flow_parameter == "s"
        assert report.trajectories == ["u_s = u_x"]
        assert report.residuals == [["0"]]

    def test_flow_parameter_avoids_names(self):
        ctx = JetContext(("x", "s"), ("u",))
        system = new_system(ctx, ["u_s = u_xx"])
        assert invariant_system(system, [GeneratingFunction.parse("u_x", ctx)]).flow_parameter == "s1"

    def test_reports_non_symmetries(self, kdv):
        report = invariant_system(kdv, [gf("u")])
        assert report.residuals == [["-u*u_x"]]


class TestFormalIntegrate:
    def test_simple(self):
        assert formal_integrate(P("u_x")) == P("u")

    def test_kdv_density(self):
        assert formal_integrate(P(KDV_FLOW)) == P("u_xx + u^2/2")

    def test_not_exact(self):
        with pytest.raises(NotExactError):
            formal_integrate(P("u"))

    def test_explicit_x(self):
        assert formal_integrate(P("u + x*u_x")) == P("x*u")

    def test_mixed_derivative_rejected(self):
        with pytest.raises(ShapeMismatchError):
            formal_integrate(P("u_xt"))

    def test_inverts_total_derivative(self, rng):
        internal = [XT_U.u(0, (k, 0)) for k in range(3)]
        for _ in range(30):
            p = random_polynomial(rng, XT_U, coordinates=internal)
            e = horizontal_derivative(p, X)
            assert horizontal_derivative(formal_integrate(e), X) == e


class TestRecursion:
    def test_kdv_flow(self, kdv):
        assert apply_recursion(RecursionOperator.kdv(), gf("u_x"), kdv)[0] == P(KDV_FLOW)

    def test_fifth_order(self, kdv):
        result = apply_recursion(RecursionOperator.kdv(), gf("u_x"), kdv, steps=2)
        assert result[0] == P(KDV_FIFTH)
        assert symmetry_residual(kdv, result)[0].is_zero

    def test_zero(self, kdv):
        assert apply_recursion(RecursionOperator.kdv(), gf("0"), kdv).is_zero

    def test_render_round_trip(self):
        operator = RecursionOperator.kdv()
        assert RecursionOperator.parse(operator.render(XT_U), XT_U) == operator

    def test_parse_errors(self):
        with pytest.raises(InvalidSystemError, match="nothing may follow"):
            RecursionOperator.parse(["D^2*u"], XT_U)
        with pytest.raises(InvalidSystemError, match="no terms"):
            RecursionOperator.parse(["# empty"], XT_U)

    def test_not_exact_propagates(self, kdv):
        operator = RecursionOperator.parse(["Dinv"], XT_U)
        with pytest.raises(NotExactError):
            apply_recursion(operator, gf("u"), kdv)

"""
Unit tests for C-differential operators: linearization, adjoint, composition
and restriction to E∞.
"""

from __future__ import annotations

import pytest

from jetcalc.calculus import GeneratingFunction
from jetcalc.conservation import euler_operator
from jetcalc.errors import NonlocalCoordinateError, ShapeMismatchError
from jetcalc.expr import Coordinate, JetExpr, MultiIndex
from jetcalc.operators import CDiffOp, linearize, restrict_op, system_linearization
from tests.conftest import XT_U, P, random_polynomial

S00, S10, S01, S20, S30 = (MultiIndex(s) for s in [(0, 0), (1, 0), (0, 1), (2, 0), (3, 0)])


def scalar(**terms) -> CDiffOp:
    table = {"d0": S00, "dx": S10, "dt": S01, "dxx": S20, "dxxx": S30}
    return CDiffOp.scalar(XT_U, {table[k]: P(v) for k, v in terms.items()})


class TestLinearize:
    def test_kdv(self, kdv):
        op = linearize(kdv.equation_exprs(), XT_U)
        assert op == scalar(dt="1", dx="-u", d0="-u_x", dxxx="-1")

    def test_identity(self):
        assert linearize([P("u")], XT_U) == CDiffOp.identity(XT_U)

    def test_burgers(self, burgers):
        op = linearize(burgers.equation_exprs(), XT_U)
        assert op == scalar(dt="1", dxx="-1", dx="-u", d0="-u_x")

    def test_nonlocal_rejected(self):
        with pytest.raises(NonlocalCoordinateError):
            linearize([JetExpr.coordinate(Coordinate.fiber(0))], XT_U)


class TestApply:
    def test_identity(self):
        phi = GeneratingFunction.of(P("u*u_xx"))
        assert CDiffOp.identity(XT_U).apply(phi) == [P("u*u_xx")]

    def test_dx(self):
        assert scalar(dx="1").apply([P("u")]) == [P("u_x")]

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            scalar(dx="1").apply([P("u"), P("u")])

    def test_restricted_kdv_translation(self, kdv):
        assert system_linearization(kdv).apply([P("u_x")]) == [JetExpr.zero()]

    def test_restricted_burgers_galilean(self, burgers):
        op = restrict_op(linearize(burgers.equation_exprs(), XT_U), burgers)
        assert op.is_restricted
        assert op.apply([P("t*u_x + 1")]) == [JetExpr.zero()]

    def test_restrict_matches_reduce(self, kdv, rng):
        op = linearize(kdv.equation_exprs(), XT_U)
        internal = [XT_U.u(0, (k, 0)) for k in range(3)]
        for _ in range(10):
            phi = [random_polynomial(rng, XT_U, coordinates=internal)]
            assert op.restrict(kdv).apply(phi) == [kdv.reduce(op.apply(phi)[0])]

    def test_restrict_identity(self, kdv):
        assert CDiffOp.identity(XT_U).restrict(kdv).apply([P("u_x")]) == [P("u_x")]


class TestAdjoint:
    def test_dx(self):
        assert scalar(dx="1").adjoint() == scalar(dx="-1")

    def test_u_dx(self):
        assert scalar(dx="u").adjoint() == scalar(dx="-u", d0="-u_x")

    def test_kdv(self, kdv):
        op = linearize(kdv.equation_exprs(), XT_U).adjoint()
        assert op == scalar(dt="-1", dx="u", dxxx="1")

    def test_involution(self, rng):
        for _ in range(20):
            F = random_polynomial(rng, XT_U, max_order=3)
            op = linearize([F], XT_U)
            assert op.adjoint().adjoint() == op

    def test_reverses_composition(self, rng):
        for _ in range(10):
            a, b = random_polynomial(rng, XT_U, max_order=1), random_polynomial(rng, XT_U, max_order=1)
            p = CDiffOp.scalar(XT_U, {S10: a})
            q = CDiffOp.scalar(XT_U, {S20: b})
            assert p.compose(q).adjoint() == q.adjoint().compose(p.adjoint())

    def test_lagrange_identity(self, rng):
        op = linearize([P("u_t - u*u_x - u_xxx")], XT_U)
        for _ in range(10):
            p = random_polynomial(rng, XT_U, max_order=2)
            q = random_polynomial(rng, XT_U, max_order=2)
            divergence = q * op.apply([p])[0] - op.adjoint().apply([q])[0] * p
            assert euler_operator(divergence, XT_U).is_zero


class TestComposeAndRender:
    def test_compose_leibniz(self):
        # D_x ∘ u = u D_x + u_x
        assert scalar(dx="1").compose(scalar(d0="u")) == scalar(dx="u", d0="u_x")

    def test_arithmetic(self):
        assert scalar(dx="1") + scalar(dx="-1") == scalar()
        assert scalar(dx="u").scale(P("2")) == scalar(dx="2*u")

    def test_render_text(self):
        assert CDiffOp.identity(XT_U).render_text() == ["[0,0] 1 * D[0,0]"]
        assert scalar(dx="u", d0="u_x + 1").render_text() == ["[0,0] u * D[1,0] + (u_x + 1) * D[0,0]"]

    def test_to_json(self):
        data = scalar(dxxx="-1").to_json()
        assert data["shape"] == [1, 1]
        assert data["entries"] == [{"row": 0, "col": 0, "terms": [{"sigma": [3, 0], "coefficient": "-1"}]}]

"""
Unit tests for solved-form systems and reduction to E∞.
"""

from __future__ import annotations

import pytest

from jetcalc.calculus import horizontal_derivative
from jetcalc.equation import PdeSystem, new_system, ranking_key
from jetcalc.errors import InvalidSystemError
from jetcalc.expr import MultiIndex
from tests.conftest import XT_U, P, random_polynomial

X, T = 0, 1


class TestValidation:
    def test_kdv(self, kdv):
        assert kdv.size == 1
        assert kdv.render() == ["u_t = u*u_x + u_xxx"]

    def test_rhs_mentions_leader(self):
        with pytest.raises(InvalidSystemError):
            new_system(XT_U, ["u_t = u_x", "u_x = u"])

    def test_overlapping_leaders(self):
        with pytest.raises(InvalidSystemError, match="derivative of leader"):
            new_system(XT_U, ["u_t = u", "u_xt = u_x"])

    def test_rhs_must_rank_below(self):
        with pytest.raises(InvalidSystemError, match="rank below"):
            new_system(XT_U, ["u_xx = u_t"])

    def test_lhs_must_be_coordinate(self):
        with pytest.raises(InvalidSystemError, match="single derivative"):
            new_system(XT_U, ["2*u_t = u"])

    def test_missing_equals(self):
        with pytest.raises(InvalidSystemError, match="no '='"):
            PdeSystem.from_strings(XT_U, ["u_t"])

    def test_ranking_prefers_last_variable(self):
        assert ranking_key(XT_U.u(0, (0, 1))) > ranking_key(XT_U.u(0, (5, 0)))


class TestReduce:
    def test_leader(self, kdv):
        assert kdv.reduce(P("u_t")) == P("u*u_x + u_xxx")

    def test_leader_consequence(self, kdv):
        assert kdv.reduce(P("u_xt")) == P("u_x^2 + u*u_xx + u_xxxx")

    def test_internal_is_fixed(self, kdv):
        assert kdv.reduce(P("u_xx")) == P("u_xx")
        assert kdv.is_internal(XT_U.u(0, (7, 0)))
        assert not kdv.is_internal(XT_U.u(0, (1, 1)))

    def test_trivial_system(self):
        system = new_system(XT_U, ["u_t = 0"])
        assert system.prolong_equation(0, MultiIndex((0, 0))) == P("u_t")
        assert system.reduce(P("u_tt + u_xt")).is_zero

    def test_prolong_equation(self, kdv):
        assert kdv.prolong_equation(0, MultiIndex((1, 0))) == P("u_xt") - horizontal_derivative(P("u*u_x + u_xxx"), X)

    def test_prolongations_vanish(self, kdv, burgers):
        for system in (kdv, burgers):
            for sigma in [MultiIndex((a, b)) for a in range(4) for b in range(4) if a + b <= 4]:
                assert system.reduce(system.prolong_equation(0, sigma)).is_zero

    def test_idempotent_and_morphism(self, kdv, rng):
        for _ in range(20):
            a, b, c = (random_polynomial(rng, XT_U, max_order=2) for _ in range(3))
            assert kdv.reduce(kdv.reduce(a)) == kdv.reduce(a)
            assert kdv.reduce(a * b + c) == kdv.reduce(a) * kdv.reduce(b) + kdv.reduce(c)

    def test_memo_does_not_change_results(self):
        with_memo = PdeSystem.from_strings(XT_U, ["u_t = u*u_x + u_xxx"], memo=True)
        without = PdeSystem.from_strings(XT_U, ["u_t = u*u_x + u_xxx"], memo=False)
        e = P("u_ttx + u*u_tt")
        assert with_memo.reduce(e) == without.reduce(e)


class TestRestrictedDerivative:
    def test_kdv_flow(self, kdv):
        assert kdv.restricted_total_derivative(P("u"), T) == P("u*u_x + u_xxx")
        assert kdv.restricted_total_derivative(P("u"), X) == P("u_x")
        assert kdv.restricted_total_derivative(P("u_x"), T) == P("u_x^2 + u*u_xx + u_xxxx")

    def test_commute_on_solutions(self, kdv, burgers, rng):
        internal = [XT_U.u(0, (k, 0)) for k in range(5)]
        for system in (kdv, burgers):
            for _ in range(50):
                e = random_polynomial(rng, XT_U, coordinates=internal)
                d = system.restricted_total_derivative
                assert d(d(e, X), T) == d(d(e, T), X)

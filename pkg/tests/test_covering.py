"""
Unit tests for coverings: flatness, extended total derivatives, nonlocal
symmetries and the Wahlquist–Estabrook assembly over KdV.
"""

from __future__ import annotations

import pytest

from jetcalc.calculus import GeneratingFunction
from jetcalc.covering import (
    Covering,
    Representation,
    VerticalField,
    check_flatness,
    extended_total_derivative,
    flatness_report,
    nonlocal_symmetry_residual,
    we_ansatz,
    we_relations,
    we_report,
)
from jetcalc.errors import CoveringError, ShapeMismatchError
from jetcalc.loader import load_covering, load_representation
from jetcalc.parser import parse
from jetcalc.symmetry import symmetry_residual
from tests.conftest import random_polynomial


@pytest.fixture
def potential() -> Covering:
    return load_covering("kdv-potential")


@pytest.fixture
def abelian() -> Representation:
    return load_representation("we-abelian")


class TestFlatness:
    def test_potential_covering(self, potential):
        report = flatness_report(potential)
        assert report.flat
        assert [(e.i, e.j, e.fiber) for e in report.residuals] == [("x", "t", "w")]

    def test_cole_hopf(self):
        assert flatness_report(load_covering("cole-hopf")).flat

    def test_perturbed_field(self, kdv):
        covering = Covering.from_tables(kdv, ["w"], {"x": {"w": "u"}, "t": {"w": "u_xx"}})
        (residual,) = check_flatness(covering)
        assert residual.residual == parse("-u*u_x", covering.ctx)
        assert not flatness_report(covering).flat

    def test_no_fiber_is_flat(self, kdv):
        covering = Covering(kdv, [], [VerticalField.zero(0), VerticalField.zero(0)])
        assert check_flatness(covering) == []
        assert flatness_report(covering).flat

    @pytest.mark.parametrize("name", ["kdv-potential", "cole-hopf"])
    def test_extended_derivatives_commute(self, name, rng):
        covering = load_covering(name)
        ctx = covering.ctx
        pool = [ctx.u(0, (k, 0)) for k in range(4)] + [ctx.w(0)]
        d = covering.extended_total_derivative
        for _ in range(40):
            e = random_polynomial(rng, ctx, coordinates=pool)
            assert d(d(e, 0), 1) == d(d(e, 1), 0)


class TestExtendedDerivative:
    def test_fiber_coordinate(self, potential):
        w = parse("w", potential.ctx)
        assert extended_total_derivative(potential, w, 0) == parse("u", potential.ctx)
        assert extended_total_derivative(potential, w, 1) == parse("u_xx + u^2/2", potential.ctx)

    def test_product(self, potential):
        e = parse("w^2", potential.ctx)
        assert potential.extended_total_derivative(e, 0) == parse("2*w*u", potential.ctx)

    def test_reduces_on_equation(self, potential):
        e = parse("u_x", potential.ctx)
        assert potential.extended_total_derivative(e, 1) == parse("u_x^2 + u*u_xx + u_xxxx", potential.ctx)


class TestCoveringValidation:
    def test_undeclared_fiber(self, kdv):
        with pytest.raises(CoveringError):
            Covering.from_tables(kdv, ["w"], {"x": {"z": "u"}})

    def test_undeclared_variable(self, kdv):
        with pytest.raises(CoveringError):
            Covering.from_tables(kdv, ["w"], {"y": {"w": "u"}})

    def test_non_internal_coordinate(self, kdv):
        with pytest.raises(CoveringError, match="not an internal coordinate"):
            Covering.from_tables(kdv, ["w"], {"x": {"w": "u_t"}})

    def test_fiber_name_clash(self, kdv):
        with pytest.raises(CoveringError):
            Covering.from_tables(kdv, ["u"], {})

    def test_render(self, potential):
        first, second = potential.render()
        assert first == "V_x[w] = u"
        assert parse(second.removeprefix("V_t[w] = "), potential.ctx) == parse("u_xx + u^2/2", potential.ctx)


class TestVerticalField:
    def test_bracket_of_coordinate_fields(self, potential):
        ctx = potential.ctx
        x = VerticalField((parse("w", ctx),))
        y = VerticalField((parse("1", ctx),))
        # [w d/dw, d/dw] = -d/dw
        assert x.bracket(y) == VerticalField((parse("-1", ctx),))
        assert y.bracket(x) == VerticalField((parse("1", ctx),))

    def test_fiber_mismatch(self):
        with pytest.raises(CoveringError):
            VerticalField.zero(1).bracket(VerticalField.zero(2))


class TestNonlocalSymmetry:
    @pytest.mark.parametrize(
        ("phi", "psi", "expected"),
        [
            ("u_x", "u", True),
            ("u*u_x + u_xxx", "u_xx + u^2/2", True),
            ("u", "w", False),
        ],
    )
    def test_agrees_with_local_symmetry(self, potential, kdv, phi, psi, expected):
        lifted = nonlocal_symmetry_residual(
            potential, GeneratingFunction.parse(phi, potential.ctx), [parse(psi, potential.ctx)]
        )
        local = symmetry_residual(kdv, GeneratingFunction.parse(phi, kdv.ctx))
        assert lifted.is_zero == all(r.is_zero for r in local) == expected

    def test_translation_lifts(self, potential):
        phi = GeneratingFunction.parse("u_x", potential.ctx)
        residual = nonlocal_symmetry_residual(potential, phi, [parse("u", potential.ctx)])
        assert residual.is_zero
        assert residual.report(potential.ctx).symmetry

    def test_zero(self, potential):
        residual = nonlocal_symmetry_residual(potential, GeneratingFunction.of(0), [parse("0", potential.ctx)])
        assert residual.is_zero

    def test_wrong_lift(self, potential):
        phi = GeneratingFunction.parse("u_x", potential.ctx)
        residual = nonlocal_symmetry_residual(potential, phi, [parse("0", potential.ctx)])
        assert not residual.is_zero
        report = residual.report(potential.ctx)
        assert report.determining == ["0"]
        assert [(f.variable, f.fiber) for f in report.fiber] == [("x", "w"), ("t", "w")]
        assert report.fiber[0].residual == "-u_x"

    def test_psi_length(self, potential):
        with pytest.raises(ShapeMismatchError):
            nonlocal_symmetry_residual(potential, GeneratingFunction.of(0), [])


class TestWahlquistEstabrook:
    def test_relations_hold_for_abelian(self, abelian):
        relations = we_relations(abelian)
        assert len(relations) == 6
        assert all(field.is_zero for _, field in relations)

    def test_corrected_reading_is_flat(self, abelian):
        report = we_report(abelian)
        assert report.reading == "corrected"
        assert report.relations_hold
        assert report.flatness.flat

    def test_literal_reading_is_not_flat(self, abelian):
        report = we_report(abelian, literal=True)
        assert report.reading == "literal"
        assert not report.flatness.flat
        (entry,) = report.flatness.residuals
        assert (entry.i, entry.j, entry.residual) == ("x", "t", "-u*u_x")

    def test_corrected_matches_potential_covering(self, abelian, potential):
        covering = we_ansatz(abelian)
        assert covering.fields[0] == potential.fields[0]
        assert covering.fields[1] == potential.fields[1]

    def test_all_zero_representation(self):
        rep = Representation.parse(["w"], {})
        report = we_report(rep)
        assert report.flatness.flat
        assert report.v_x == ["w: 0"]

    def test_fields_must_be_vertical(self):
        with pytest.raises(CoveringError):
            Representation.parse(["w"], {"A": {"w": "u"}})

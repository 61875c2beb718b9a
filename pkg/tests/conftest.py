"""
Shared fixtures: the built-in systems, a parse helper bound to (x, t; u), and
a seeded generator of random differential polynomials.
"""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from jetcalc.context import JetContext
from jetcalc.expr import JetExpr
from jetcalc.loader import load_system
from jetcalc.parser import parse

XT_U = JetContext(("x", "t"), ("u",))
SYSTEMS_DIR = Path(__file__).resolve().parent.parent / "systems"


def P(text: str, ctx: JetContext = XT_U) -> JetExpr:
    return parse(text, ctx)


def random_polynomial(
    rng: random.Random,
    ctx: JetContext,
    *,
    max_order: int = 3,
    terms: int = 3,
    max_degree: int = 2,
    coordinates=None,
) -> JetExpr:
    """A random differential polynomial over ctx (small integer coefficients)."""
    pool = coordinates if coordinates is not None else [c for c in ctx.jet_coordinates(max_order)]
    pool = [*pool, ctx.x(0)]
    e = JetExpr.zero()
    for _ in range(terms):
        monomial = JetExpr.constant(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        for _ in range(rng.randint(0, max_degree)):
            monomial = monomial * JetExpr.coordinate(rng.choice(pool))
        e = e + monomial
    return e


@pytest.fixture
def ctx() -> JetContext:
    return XT_U


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def kdv():
    return load_system("kdv")


@pytest.fixture
def burgers():
    return load_system("burgers")


@pytest.fixture
def heat():
    return load_system("heat")

"""
jetcalc — exact jet-space calculus for PDE systems.

Expressions are canonical rational functions of jet coordinates over Q;
systems are reduced to normal form on their infinite prolongation; the
determining equations for symmetries and conservation laws are solved
exactly in bounded polynomial ansätze.
"""

from jetcalc.calculus import GeneratingFunction, evolutionary_derivation, total_derivative
from jetcalc.context import JetContext
from jetcalc.equation import PdeSystem, new_system
from jetcalc.expr import Coordinate, JetExpr, MultiIndex
from jetcalc.parser import parse, render

__all__ = [
    "Coordinate",
    "GeneratingFunction",
    "JetContext",
    "JetExpr",
    "MultiIndex",
    "PdeSystem",
    "evolutionary_derivation",
    "new_system",
    "parse",
    "render",
    "total_derivative",
]

"""
Key-value file loaders for systems, coverings and WE representations.

Format (UTF-8, one ``key = value`` per line, ``#`` starts a comment)::

    independent = x, t
    dependent = u
    equation = u_t = u*u_x + u_xxx
    fiber = w
    V_x[w] = u
    V_t[w] = u_xx + 1/2*u^2

Representation files use ``A[w] = ...`` .. ``D[w] = ...`` instead of
``V_x[w]``. Every loader also accepts the name of a built-in example.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

from pydantic import ValidationError

from jetcalc import builtins
from jetcalc.context import JetContext
from jetcalc.covering import Covering, Representation
from jetcalc.equation import PdeSystem
from jetcalc.errors import CoveringError, InvalidSystemError
from jetcalc.models import CoveringFile, RepresentationFile, SystemFile

logger = logging.getLogger(__name__)

_FIELD_KEY = re.compile(r"^V_([A-Za-z][A-Za-z0-9]*)\[([A-Za-z][A-Za-z0-9]*)\]$")
_REP_KEY = re.compile(r"^([ABCD])\[([A-Za-z][A-Za-z0-9]*)\]$")


def _read(source: str, table: dict[str, str], error: type[Exception]) -> str:
    if source in table:
        logger.info("Using built-in %s", source)
        return table[source]
    path = Path(source)
    if not path.is_file():
        raise error(f"{source!r} is neither a file nor a built-in ({', '.join(sorted(table))})")
    logger.info("Reading %s", path)
    return path.read_text(encoding="utf-8")


def _pairs(text: str, error: type[Exception]) -> list[tuple[str, str]]:
    pairs = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise error(f"line {number}: expected 'key = value', got {raw.strip()!r}")
        pairs.append((key.strip(), value.strip()))
    return pairs


def _split(value: str) -> list[str]:
    return [p.strip() for p in value.split(",") if p.strip()]


def parse_system_text(text: str) -> SystemFile:
    return _parse_covering_pairs(_pairs(text, InvalidSystemError), allow_fiber=False)


def parse_covering_text(text: str) -> CoveringFile:
    return _parse_covering_pairs(_pairs(text, CoveringError), allow_fiber=True)


def _parse_covering_pairs(pairs: list[tuple[str, str]], *, allow_fiber: bool):
    error = CoveringError if allow_fiber else InvalidSystemError
    data: dict = {"independent": [], "dependent": [], "equations": [], "fiber": [], "coefficients": {}}
    for key, value in pairs:
        field = _FIELD_KEY.match(key)
        if key in ("independent", "dependent", "fiber"):
            if key == "fiber" and not allow_fiber:
                raise error("fiber coordinates belong in a covering file")
            data[key].extend(_split(value))
        elif key == "equation":
            data["equations"].append(value)
        elif field and allow_fiber:
            data["coefficients"].setdefault(field.group(1), {})[field.group(2)] = value
        else:
            raise error(f"unknown key {key!r}")
    try:
        if allow_fiber:
            return CoveringFile(**data)
        data.pop("fiber")
        data.pop("coefficients")
        return SystemFile(**data)
    except ValidationError as exc:
        raise error(f"invalid file: {exc.errors()[0]['msg']}") from exc


def parse_representation_text(text: str) -> RepresentationFile:
    data: dict = {"fiber": [], "coefficients": {}}
    for key, value in _pairs(text, CoveringError):
        field = _REP_KEY.match(key)
        if key == "fiber":
            data["fiber"].extend(_split(value))
        elif field:
            data["coefficients"].setdefault(field.group(1), {})[field.group(2)] = value
        else:
            raise CoveringError(f"unknown key {key!r}")
    try:
        return RepresentationFile(**data)
    except ValidationError as exc:
        raise CoveringError(f"invalid representation: {exc.errors()[0]['msg']}") from exc


# ── Builders ──────────────────────────────────────────────────────────────────


def build_system(spec: SystemFile) -> PdeSystem:
    ctx = JetContext(tuple(spec.independent), tuple(spec.dependent))
    return PdeSystem.from_strings(ctx, spec.equations)


def build_covering(spec: CoveringFile) -> Covering:
    return Covering.from_tables(build_system(spec), spec.fiber, spec.coefficients)


def build_representation(spec: RepresentationFile) -> Representation:
    return Representation.parse(spec.fiber, spec.coefficients)


def load_system(source: str) -> PdeSystem:
    """A system from a file path or a built-in name (burgers, kdv, heat)."""
    return build_system(parse_system_text(_read(source, builtins.SYSTEMS, InvalidSystemError)))


def load_covering(source: str) -> Covering:
    """A covering from a file path or a built-in name (kdv-potential, cole-hopf)."""
    return build_covering(parse_covering_text(_read(source, builtins.COVERINGS, CoveringError)))


def load_representation(source: str) -> Representation:
    return build_representation(parse_representation_text(_read(source, builtins.REPRESENTATIONS, CoveringError)))

"""
Exception hierarchy for jetcalc.

Every error carries a machine-readable ``code`` (rendered by the CLI as
``error[<code>]`` and by the service as the ``code`` field) and the process
exit code the CLI uses for it: 2 for malformed input, 1 for domain failures.
"""

from __future__ import annotations


class JetCalcError(Exception):
    code = "jetcalc_error"
    exit_code = 1


# ── Input errors (exit 2) ─────────────────────────────────────────────────────


class ExpressionSyntaxError(JetCalcError):
    code = "syntax_error"
    exit_code = 2

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UndeclaredIdentifierError(JetCalcError):
    code = "undeclared_identifier"
    exit_code = 2

    def __init__(self, name: str, position: int | None = None):
        where = f" (at position {position})" if position is not None else ""
        super().__init__(f"Undeclared identifier '{name}'{where}")
        self.name = name
        self.position = position


class InvalidContextError(JetCalcError):
    code = "invalid_context"
    exit_code = 2


class InvalidSystemError(JetCalcError):
    code = "invalid_system"
    exit_code = 2


class CoveringError(JetCalcError):
    code = "invalid_covering"
    exit_code = 2


# ── Domain errors (exit 1) ────────────────────────────────────────────────────


class ZeroDenominatorError(JetCalcError):
    code = "zero_denominator"


class NonlocalCoordinateError(JetCalcError):
    code = "nonlocal_coordinate"


class ShapeMismatchError(JetCalcError):
    code = "shape_mismatch"


class AnsatzLimitError(JetCalcError):
    code = "ansatz_limit"

    def __init__(self, size: int, limit: int):
        super().__init__(
            f"Ansatz has {size} monomials, above the configured limit of {limit} "
            "(raise JETCALC_ANSATZ_LIMIT or --ansatz-limit)"
        )
        self.size = size
        self.limit = limit


class NotExactError(JetCalcError):
    """The integrand has no differential-polynomial antiderivative.

    ``integrand`` and ``remainder`` are the expressions themselves; callers
    holding a context re-render them with their own variable names.
    """

    code = "not_exact"

    def __init__(self, integrand: object, remainder: object | None = None):
        detail = ""
        if remainder is not None and remainder != integrand:
            detail = f"; descent stalled at {remainder}"
        super().__init__(f"{integrand} is not a total derivative{detail}")
        self.integrand = integrand
        self.remainder = remainder

"""
jetcalc — Application Settings

All config is read from environment variables; nothing is required, every
field has a working default so the CLI and the service run out of the box.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}
_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
_FORMATS = {"text", "json"}


@dataclass(frozen=True)
class Settings:
    # ── Determining-equation solver ─────────────────────────────────────────
    ansatz_limit: int = field(
        default_factory=lambda: _int("JETCALC_ANSATZ_LIMIT", 20000)
    )

    # ── Reduction to the infinite prolongation ──────────────────────────────
    # Memo of leader-consequence coordinate → reduced form; results are
    # identical with the memo switched off.
    reduction_memo: bool = field(
        default_factory=lambda: _bool("JETCALC_REDUCTION_MEMO", True)
    )

    # ── Output / logging ─────────────────────────────────────────────────────
    log_level: str = field(
        default_factory=lambda: _choice("JETCALC_LOG_LEVEL", "WARNING", _LOG_LEVELS, upper=True)
    )
    output_format: str = field(
        default_factory=lambda: _choice("JETCALC_OUTPUT_FORMAT", "text", _FORMATS)
    )

    # ── HTTP service ─────────────────────────────────────────────────────────
    cors_origins: tuple[str, ...] = field(
        default_factory=lambda: tuple(
            origin.strip()
            for origin in os.environ.get("JETCALC_CORS_ORIGINS", "").split(",")
            if origin.strip()
        )
    )


def _int(name: str, default: int) -> int:
    """Read a non-negative integer environment variable; raise clearly if malformed."""
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise RuntimeError(
            f"Environment variable '{name}' must be an integer, got {raw!r}."
        ) from None
    if value < 0:
        raise RuntimeError(f"Environment variable '{name}' must be >= 0, got {value}.")
    return value


def _bool(name: str, default: bool) -> bool:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise RuntimeError(
        f"Environment variable '{name}' must be a boolean (true/false), got {raw!r}."
    )


def _choice(name: str, default: str, allowed: set[str], *, upper: bool = False) -> str:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    value = raw.strip().upper() if upper else raw.strip().lower()
    if value not in allowed:
        raise RuntimeError(
            f"Environment variable '{name}' must be one of {sorted(allowed)}, got {raw!r}."
        )
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the singleton Settings instance (cached after first call)."""
    return Settings()

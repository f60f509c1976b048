"""Explicit constants and runtime bound checks.

Checks warn by default and raise in strict mode.  Strict mode is on when
``PCENTERED_STRICT`` is set to a non-empty value other than ``0`` or when
``set_strict(True)`` was called (the test suite and ``--strict`` do this).
"""

from __future__ import annotations

import logging
import os
import warnings
from math import comb

log = logging.getLogger(__name__)

_strict: bool | None = None


class BoundViolation(RuntimeError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name
        self.detail = detail


class BoundWarning(RuntimeWarning):
    pass


def set_strict(on: bool | None) -> None:
    """Force strict mode on/off; ``None`` falls back to the environment."""
    global _strict
    _strict = on


def is_strict() -> bool:
    if _strict is not None:
        return _strict
    return os.environ.get("PCENTERED_STRICT", "") not in ("", "0")


def report(name: str, detail: str) -> None:
    if is_strict():
        raise BoundViolation(name, detail)
    warnings.warn(f"{name}: {detail}", BoundWarning, stacklevel=3)


def check_le(name: str, value: int, limit: int) -> bool:
    if value <= limit:
        return True
    report(name, f"{value} > {limit}")
    return False


def check_true(name: str, ok: bool, detail: str = "") -> bool:
    if not ok:
        report(name, detail or "does not hold")
    return ok


# -- constants; c is the declared LRS width


def c13(c: int) -> int:
    """Palette multiplier of the good coloring: c(12c + 10)."""
    return c * (12 * c + 10)


def packing_d(t: int) -> int:
    """Largest packing a K_t-minor-free instance can produce: 2^(t-2)(t-1)."""
    return 2 ** (t - 2) * (t - 1)


def c22(t: int, c: int) -> int:
    return c13(c) * packing_d(t)


def theorem_constant(t: int, c: int) -> int:
    return 2 ** (t - 1) * c22(t, c)


def palette_bound(t: int, c: int, p: int) -> int:
    """Hard cap on the final palette: c22 * (p + 1)^(t - 1)."""
    return c22(t, c) * (p + 1) ** (t - 1)


def headline_bound(t: int, c: int, p: int) -> int:
    """The c * p^(t-1) figure printed by the CLI."""
    return theorem_constant(t, c) * p ** (t - 1)


def ordered_bound(p: int, w: int) -> int:
    """binom(p + w, w): target palette for ordered colorings at width w."""
    return comb(p + w, w)

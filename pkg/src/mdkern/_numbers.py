"""Helpers for mixed float / exact-rational scalars and their JSON encoding."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import ValidationError


def is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def parse_scalar(x):
    """Decode a JSON scalar: numbers stay numbers, strings like ``"3/4"`` become Fractions."""
    if isinstance(x, bool):
        raise ValidationError(f"boolean is not a numeric value: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValidationError(f"non-finite value {x!r}")
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse number {x!r}") from exc
    raise ValidationError(f"unsupported scalar {x!r}")


def encode_scalar(x):
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    return float(x)


def check_finite(x, what="value"):
    if is_exact(x):
        return
    if not math.isfinite(float(x)):
        raise ValidationError(f"{what} must be finite, got {x!r}")

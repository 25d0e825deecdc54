from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["DomainError", "as_fraction", "fmt", "fmt_decimal"]


class DomainError(ValueError):
    """Inputs live on different state spaces or fall outside a map's domain."""


def as_fraction(value) -> Fraction:
    """Exact conversion; floats are refused so no binary rounding sneaks in."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(
            f"float {value!r} is not exact; pass an int, a Fraction or a string such as '4/5'"
        )
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_decimal(q: Fraction, places: int = 2) -> str:
    # round-half-away-from-zero, the usual convention in printed tables
    scale = 10**places
    v = abs(q) * scale
    r = int(v) + (1 if v - int(v) >= Fraction(1, 2) else 0)
    sign = "-" if q < 0 and r != 0 else ""
    whole, frac = divmod(r, scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"

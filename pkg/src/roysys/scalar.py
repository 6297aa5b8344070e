"""Exact scalars: rationals via :class:`fractions.Fraction` plus a symbolic infinity.

Exponents of Diophantine approximation may be infinite, so ``INF`` is a
first-class value that compares above every rational.  Arithmetic with it is
limited to what the dimension formulas need (see :func:`inv1p`).
"""

from __future__ import annotations

from decimal import Context, Decimal
from fractions import Fraction
from typing import Union


class _Infinity:
    __slots__ = ()

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return "INF"

    def __hash__(self) -> int:
        return hash("roysys.INF")

    def __eq__(self, other) -> bool:
        return other is self

    def __ne__(self, other) -> bool:
        return other is not self

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True


INF = _Infinity()

Exponent = Union[Fraction, _Infinity]


def is_inf(x) -> bool:
    return x is INF


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and exact strings to Fraction. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}: {x!r}")


def parse_scalar(text: str) -> Exponent:
    """Parse ``"p/q"``, a decimal string (exactly) or ``"inf"``."""
    s = text.strip().lower()
    if s in ("inf", "+inf", "infinity", "∞"):
        return INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def as_exponent(x) -> Exponent:
    if x is INF:
        return INF
    if isinstance(x, str):
        return parse_scalar(x)
    return as_fraction(x)


def format_scalar(x) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers, ``"inf"`` for INF)."""
    if x is INF:
        return "inf"
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def inv1p(omega: Exponent) -> Fraction:
    """1/(1+omega), with 1/(1+inf) = 0."""
    if omega is INF:
        return Fraction(0)
    return 1 / (1 + as_fraction(omega))


def from_inv1p(x) -> Exponent:
    """Inverse of :func:`inv1p`: 1/x - 1, with x = 0 giving INF."""
    x = as_fraction(x)
    if x == 0:
        return INF
    return 1 / x - 1


def to_decimal_str(x, precision: int = 12) -> str:
    """Render an exact value with ``precision`` significant digits."""
    if x is INF:
        return "inf"
    if isinstance(x, float):
        return format(x, f".{precision}g")
    x = as_fraction(x)
    ctx = Context(prec=precision)
    d = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(d, "f") if abs(d.adjusted()) < precision else str(d)

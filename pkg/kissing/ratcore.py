"""Exact rational scalars, rational-endpoint intervals, and square-root enclosures.

``Rational`` is :class:`fractions.Fraction`: it is kept in lowest terms with a
positive denominator, so equality is structural and renderings are stable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Literal

from .types import DomainError, RationalParseError

Rational = Fraction
RationalLike = Fraction | int | str

DEFAULT_SIGNIFICANT_DIGITS = 12

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_FRACTION_RE = re.compile(r"^[+-]?\d+/\d+$")


def rational_from_decimal(s: str) -> Fraction:
    """Parse a finite decimal literal (optional sign) into an exact rational.

    >>> rational_from_decimal("0.09465869")
    Fraction(9465869, 100000000)
    """
    text = s.strip()
    if not _DECIMAL_RE.match(text):
        raise RationalParseError(f"not a finite decimal literal: {s!r}")
    return Fraction(text)


def parse_rational(s: str) -> Fraction:
    """Parse either ``num/den`` or a decimal literal."""
    text = s.strip()
    if _FRACTION_RE.match(text):
        num, den = text.split("/")
        if int(den) == 0:
            raise RationalParseError(f"zero denominator: {s!r}")
        return Fraction(int(num), int(den))
    return rational_from_decimal(text)


def to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise RationalParseError(f"cannot convert {type(value).__name__} to Rational")


def format_rational(q: Fraction) -> str:
    """Canonical ``num/den`` rendering, denominator always present."""
    return f"{q.numerator}/{q.denominator}"


def format_decimal(q: Fraction, digits: int = DEFAULT_SIGNIFICANT_DIGITS) -> str:
    """Round to ``digits`` significant digits (half-even) and render."""
    if q == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        value = Decimal(q.numerator) / Decimal(q.denominator)
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def format_fixed(q: Fraction, places: int) -> str:
    """Render with exactly ``places`` digits after the point (half-even).

    Re-rendering a parsed decimal literal at its own precision gives the
    literal back, e.g. ``format_fixed(rational_from_decimal("0.09465869"), 8)``.
    """
    scaled = q * 10**places
    n = round(scaled)
    sign = "-" if n < 0 else ""
    digits = str(abs(n)).rjust(places + 1, "0")
    if places == 0:
        return f"{sign}{digits}"
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


@dataclass(frozen=True, slots=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_rational(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, x: RationalLike) -> RationalInterval:
        q = to_rational(x)
        return cls(q, q)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: RationalLike | RationalInterval) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        q = to_rational(x)
        return self.lo <= q <= self.hi

    def overlaps(self, other: RationalInterval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: RationalInterval) -> RationalInterval:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise DomainError(f"disjoint intervals {self} and {other}")
        return RationalInterval(lo, hi)

    def hull(self, other: RationalInterval) -> RationalInterval:
        return RationalInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def magnitude(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    def scale(self, c: RationalLike) -> RationalInterval:
        q = to_rational(c)
        if q >= 0:
            return RationalInterval(self.lo * q, self.hi * q)
        return RationalInterval(self.hi * q, self.lo * q)

    def shift(self, c: RationalLike) -> RationalInterval:
        q = to_rational(c)
        return RationalInterval(self.lo + q, self.hi + q)

    def reciprocal(self) -> RationalInterval:
        if self.lo <= 0 <= self.hi:
            raise DomainError(f"reciprocal of an interval containing 0: {self}")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __neg__(self) -> RationalInterval:
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        if not isinstance(other, RationalInterval):
            return self.shift(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        if not isinstance(other, RationalInterval):
            return self.shift(-to_rational(other))
        return RationalInterval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: RationalInterval | RationalLike) -> RationalInterval:
        if not isinstance(other, RationalInterval):
            return self.scale(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def interval_arith(
    op: Literal["add", "sub", "mul"], a: RationalInterval, b: RationalInterval
) -> RationalInterval:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise DomainError(f"unknown interval operation: {op!r}")


def _exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of q when q is the square of a rational, else None."""
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def _scale_bits(eps: Fraction) -> int:
    # 2**k >= 4 / eps keeps each endpoint within eps/4 of the true root
    bound = math.ceil(4 / eps)
    return max(bound - 1, 1).bit_length()


def _sqrt_floor(q: Fraction, bits: int) -> Fraction:
    exact = _exact_sqrt(q)
    if exact is not None:
        return exact
    scale = 1 << bits
    m = (q.numerator * scale * scale) // q.denominator
    return Fraction(math.isqrt(m), scale)


def _sqrt_ceil(q: Fraction, bits: int) -> Fraction:
    exact = _exact_sqrt(q)
    if exact is not None:
        return exact
    scale = 1 << bits
    m = -((-q.numerator * scale * scale) // q.denominator)
    r = math.isqrt(m)
    if r * r < m:
        r += 1
    return Fraction(r, scale)


def sqrt_enclose(x: RationalInterval, eps: RationalLike) -> RationalInterval:
    """Certified enclosure ``[l, h]`` of ``sqrt(x)`` with ``l**2 <= x.lo`` and
    ``h**2 >= x.hi``.

    Endpoints are exact when the interval endpoint is a rational square and
    dyadic otherwise; the result is deterministic for fixed inputs.
    """
    e = to_rational(eps)
    if e <= 0:
        raise DomainError(f"sqrt_enclose needs eps > 0, got {e}")
    if x.lo < 0:
        raise DomainError(f"square root of an interval with negative part: {x}")
    bits = _scale_bits(e)
    return RationalInterval(_sqrt_floor(x.lo, bits), _sqrt_ceil(x.hi, bits))


def sqrt_rational(q: RationalLike, eps: RationalLike) -> RationalInterval:
    return sqrt_enclose(RationalInterval.point(q), eps)


def width_from_bits(bits: int) -> Fraction:
    return Fraction(1, 1 << bits)

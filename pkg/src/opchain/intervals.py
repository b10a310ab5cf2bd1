"""Certified interval arithmetic with exact rational endpoints.

Endpoints are Fractions, so +, -, *, / are computed exactly (the result
interval is the exact image of the operands; no rounding happens at all).
The only operation that widens an enclosure is ``sqrt``, whose output width
is controlled by a precision parameter: the returned enclosure has relative
width at most 2**-bits.

Exact rationals embed as width-0 intervals.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"interval endpoints must be rational, got {type(x).__name__}")


def sqrt_lower(q: Fraction, bits: int) -> Fraction:
    """Largest convenient rational r with r*r <= q, within relative 2**-bits."""
    if q < 0:
        raise ValueError("square root of a negative rational")
    if q == 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    shift = max(bits, 1)
    while True:
        s = isqrt((n * d) << (2 * shift))
        if s >> bits:  # s >= 2**bits makes the relative width small enough
            return Fraction(s, d << shift)
        shift *= 2


def sqrt_upper(q: Fraction, bits: int) -> Fraction:
    """Small rational r with r*r >= q, within relative 2**-bits."""
    if q < 0:
        raise ValueError("square root of a negative rational")
    if q == 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    shift = max(bits, 1)
    while True:
        target = (n * d) << (2 * shift)
        s = isqrt(target)
        if s * s == target:
            return Fraction(s, d << shift)
        if s >> bits:
            return Fraction(s + 1, d << shift)
        shift *= 2


class Interval:
    """Closed interval [lo, hi] with rational endpoints, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _frac(lo)
        hi = lo if hi is None else _frac(hi)
        if lo > hi:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- constructors ---------------------------------------------------
    @classmethod
    def point(cls, q) -> "Interval":
        return cls(_frac(q))

    # -- predicates -----------------------------------------------------
    def is_point(self) -> bool:
        return self.lo == self.hi

    def is_zero(self) -> bool:
        """Certified zero: the enclosure is exactly [0, 0]."""
        return self.lo == 0 and self.hi == 0

    def contains(self, q) -> bool:
        q = _frac(q)
        return self.lo <= q <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def width(self) -> Fraction:
        return self.hi - self.lo

    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    # -- arithmetic (exact on rational endpoints) ------------------------
    def __add__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        products = (
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        )
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        if o.contains_zero():
            raise ZeroDivisionError("division by an interval containing zero")
        quotients = (
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        )
        return Interval(min(quotients), max(quotients))

    def __rtruediv__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        return o / self

    def square(self) -> "Interval":
        """Exact image of x -> x*x (sharper than self*self when 0 inside)."""
        if self.lo >= 0:
            return Interval(self.lo * self.lo, self.hi * self.hi)
        if self.hi <= 0:
            return Interval(self.hi * self.hi, self.lo * self.lo)
        return Interval(0, max(self.lo * self.lo, self.hi * self.hi))

    def sqrt(self, bits: int = 64) -> "Interval":
        """Enclosure of sqrt over [lo, hi]; requires lo >= 0.

        The result has relative width <= 2**-bits beyond the width
        inherited from the operand.
        """
        if self.lo < 0:
            raise ValueError("sqrt of an interval with negative lower end")
        return Interval(sqrt_lower(self.lo, bits), sqrt_upper(self.hi, bits))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- comparison / display --------------------------------------------
    def __eq__(self, other):
        o = _as_interval(other)
        if o is None:
            return NotImplemented
        return self.lo == o.lo and self.hi == o.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        if self.is_point():
            return f"Interval({self.lo!r})"
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self):
        if self.is_point():
            return str(self.lo)
        return f"[{self.lo}, {self.hi}]"

    def to_json(self) -> dict:
        return {"lo": str(self.lo), "hi": str(self.hi), "exact": self.is_point()}


def _as_interval(x):
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction)):
        return Interval(_frac(x))
    return None

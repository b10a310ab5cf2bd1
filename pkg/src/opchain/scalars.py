"""Exact scalar arithmetic: Gaussian rationals and kind-agnostic helpers.

The exact scalar field is Q(i): pairs of arbitrary-precision rationals.
All operations are exact and equality is decidable, so verification sweeps
in exact mode never involve tolerances.

Vectors and operators stay agnostic about which scalar kind they hold
(Fraction, GaussianRational, or an AlgebraicReal from :mod:`opchain.algebraic`);
the ``sc_*`` helpers below dispatch on the kind.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


class GaussianRational:
    """Exact complex number a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_fraction(re)
        self.im = _as_fraction(im)

    # -- constructors -------------------------------------------------
    @classmethod
    def of(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        return cls(_as_fraction(x))

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self.im == 0 and o.im == 0:
            return GaussianRational(self.re * o.re)
        return GaussianRational(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def mag_sq(self) -> Fraction:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im_part = f"{abs(self.im)}i"
        if self.re == 0:
            return f"{self.im}i" if self.im > 0 else f"-{im_part}"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{im_part}"


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return None


_GAUSSIAN_RE = _re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?"
    r"\s*(?P<im>[+-]\s*\d+(?:/\d+)?|[+-])?\s*(?P<i>i)?\s*$"
)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse "3/2", "-1/2i", "1/2+1/3i", "2-i" into a GaussianRational."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar string")
    if s.endswith("i"):
        body = s[:-1]
        # split into real part and imaginary coefficient
        m = _re.match(r"^(?P<re>[+-]?\d+(?:/\d+)?)(?P<im>[+-](?:\d+(?:/\d+)?)?)$", body)
        if m:
            im = m.group("im")
            if im in ("+", "-"):
                im += "1"
            return GaussianRational(Fraction(m.group("re")), Fraction(im))
        if body in ("", "+"):
            return GaussianRational(0, 1)
        if body == "-":
            return GaussianRational(0, -1)
        return GaussianRational(0, Fraction(body))
    return GaussianRational(Fraction(s))


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


# ---------------------------------------------------------------------------
# Kind-agnostic scalar helpers.  Vectors/operators call these so the same
# machinery runs on Fractions, GaussianRationals and AlgebraicReals.
# ---------------------------------------------------------------------------

def sc_is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def sc_conj(x):
    if isinstance(x, (int, Fraction)):
        return x
    return x.conj()


def sc_mag_sq(x):
    """Squared modulus; exact in whatever kind x lives in."""
    if isinstance(x, (int, Fraction)):
        f = Fraction(x)
        return f * f
    return x.mag_sq()


def sc_str(x) -> str:
    """Canonical exact string for report serialization."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return str(x)

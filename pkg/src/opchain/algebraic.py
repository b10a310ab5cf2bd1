"""Exact real arithmetic in a tower of square-root extensions of Q.

The scheduled-shift construction needs scalars of the form q0 + q1/||u||
where ||u|| is a square root of an already-constructed value.  Plain
interval arithmetic cannot certify that a commutator vanishes (x - x over
intervals of positive width never encloses only zero), so values are kept
exact: a :class:`SquareRootField` adjoins generators g with g*g equal to a
previously built element, and :class:`AlgebraicReal` elements are Q-linear
combinations of square-free generator monomials.

Every element produces a certified :class:`~opchain.intervals.Interval`
enclosure at any requested precision; that is the only lossy step and it is
confined to reporting and sign decisions.

Exact square detection (`_try_sqrt`) keeps the tower a genuine field: if a
candidate square root already exists in the field it is returned instead of
adjoining a redundant (and ring-breaking) generator.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import PrecisionExhausted
from .intervals import Interval

_EMPTY = frozenset()


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected rational, got {type(x).__name__}")


class SquareRootField:
    """Incrementally built real field Q(g0, g1, ...), gi = sqrt(si)."""

    def __init__(self, max_sign_bits: int = 1 << 13):
        self._squares: list[AlgebraicReal] = []
        self._encl: list[tuple[int, Interval] | None] = []
        self.max_sign_bits = max_sign_bits

    # -- element constructors -------------------------------------------
    def rational(self, q) -> "AlgebraicReal":
        q = _frac(q)
        return AlgebraicReal(self, {} if q == 0 else {_EMPTY: q})

    @property
    def zero(self) -> "AlgebraicReal":
        return AlgebraicReal(self, {})

    @property
    def one(self) -> "AlgebraicReal":
        return self.rational(1)

    def generator(self, g: int) -> "AlgebraicReal":
        return AlgebraicReal(self, {frozenset((g,)): Fraction(1)})

    def generator_count(self) -> int:
        return len(self._squares)

    # -- square root -----------------------------------------------------
    def sqrt(self, x: "AlgebraicReal") -> "AlgebraicReal":
        """Exact nonnegative square root; adjoins a generator if needed."""
        x = self.coerce(x)
        sgn = x.sign()
        if sgn < 0:
            raise ValueError("square root of a negative value")
        if sgn == 0:
            return self.zero
        y = self._try_sqrt(x, len(self._squares))
        if y is not None:
            return y if y.sign() >= 0 else -y
        gid = len(self._squares)
        self._squares.append(x)
        self._encl.append(None)
        return self.generator(gid)

    def _try_sqrt(self, x: "AlgebraicReal", level: int) -> "AlgebraicReal | None":
        """Exact square root of x inside Q(g0..g_{level-1}), else None."""
        if level == 0:
            q = x.as_fraction()
            if q < 0:
                return None
            rn, rd = isqrt(q.numerator), isqrt(q.denominator)
            if rn * rn == q.numerator and rd * rd == q.denominator:
                return self.rational(Fraction(rn, rd))
            return None
        g = level - 1
        a, b = x._split(g)
        s = self._squares[g]
        if b.is_zero():
            r = self._try_sqrt(a, g)
            if r is not None:
                return r
            r = self._try_sqrt(a / s, g)
            if r is not None:
                return r * self.generator(g)
            return None
        # y = c + d*gamma with 2cd = b != 0 and c^2 + d^2 s = a
        disc = a * a - b * b * s
        w = self._try_sqrt(disc, g)
        if w is None:
            return None
        for z in ((a + w) / 2, (a - w) / 2):
            c = self._try_sqrt(z, g)
            if c is not None and not c.is_zero():
                d = b / (c + c)
                y = c + d * self.generator(g)
                if (y * y - x).is_zero():
                    return y
        return None

    # -- enclosures --------------------------------------------------------
    def _gen_enclosure(self, g: int, bits: int) -> Interval:
        cached = self._encl[g]
        if cached is not None and cached[0] >= bits:
            return cached[1]
        sq = self._squares[g].enclosure(bits + 4)
        iv = sq.sqrt(bits + 4)
        self._encl[g] = (bits, iv)
        return iv

    # -- coercion -----------------------------------------------------------
    def coerce(self, x) -> "AlgebraicReal":
        if isinstance(x, AlgebraicReal):
            if x.ctx is not self:
                raise ValueError("mixing elements from different towers")
            return x
        return self.rational(x)


class AlgebraicReal:
    """Element of a SquareRootField: sum of rationals times generator monomials."""

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: SquareRootField, terms: dict):
        self.ctx = ctx
        self._terms = {m: c for m, c in terms.items() if c != 0}

    # -- structure -----------------------------------------------------------
    def _split(self, g: int) -> "tuple[AlgebraicReal, AlgebraicReal]":
        """x = a + b*gamma_g with a, b free of generator g."""
        a: dict = {}
        b: dict = {}
        for m, c in self._terms.items():
            if g in m:
                b[m - {g}] = c
            else:
                a[m] = c
        return AlgebraicReal(self.ctx, a), AlgebraicReal(self.ctx, b)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or set(self._terms) == {_EMPTY}

    def as_fraction(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) != {_EMPTY}:
            raise ValueError("not a rational element")
        return self._terms[_EMPTY]

    # -- ring operations ------------------------------------------------------
    def _coerced(self, other) -> "AlgebraicReal | None":
        if isinstance(other, AlgebraicReal):
            if other.ctx is not self.ctx:
                raise ValueError("mixing elements from different towers")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.rational(other)
        return None

    def __add__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in o._terms.items():
            acc[m] = acc.get(m, Fraction(0)) + c
        return AlgebraicReal(self.ctx, acc)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        acc = dict(self._terms)
        for m, c in o._terms.items():
            acc[m] = acc.get(m, Fraction(0)) - c
        return AlgebraicReal(self.ctx, acc)

    def __rsub__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return AlgebraicReal(self.ctx, {m: -c for m, c in self._terms.items()})

    def _mul_mono(self, m1: frozenset, m2: frozenset) -> "AlgebraicReal":
        shared = m1 & m2
        out = AlgebraicReal(self.ctx, {m1 ^ m2: Fraction(1)})
        for g in sorted(shared, reverse=True):
            out = out * self.ctx._squares[g]
        return out

    def __mul__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        # fast path: rational scaling
        if o.is_rational():
            q = o.as_fraction()
            if q == 0:
                return self.ctx.zero
            return AlgebraicReal(self.ctx, {m: c * q for m, c in self._terms.items()})
        if self.is_rational():
            return o * self
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                prod = self._mul_mono(m1, m2)
                cc = c1 * c2
                for m, c in prod._terms.items():
                    acc[m] = acc.get(m, Fraction(0)) + cc * c
        return AlgebraicReal(self.ctx, acc)

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicReal":
        if not self._terms:
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return self.ctx.rational(1 / self.as_fraction())
        top = max(max(m) for m in self._terms if m)
        a, b = self._split(top)
        s = self.ctx._squares[top]
        norm = a * a - b * b * s
        ninv = norm.inverse()
        return (a - b * self.ctx.generator(top)) * ninv

    def __truediv__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        if o.is_rational():
            q = o.as_fraction()
            if q == 0:
                raise ZeroDivisionError("division by zero")
            return AlgebraicReal(self.ctx, {m: c / q for m, c in self._terms.items()})
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o / self

    # -- real-scalar protocol ---------------------------------------------------
    def conj(self) -> "AlgebraicReal":
        return self

    def mag_sq(self) -> "AlgebraicReal":
        return self * self

    # -- decisions ----------------------------------------------------------------
    def sign(self) -> int:
        if not self._terms:
            return 0
        if self.is_rational():
            q = self.as_fraction()
            return 1 if q > 0 else -1
        bits = 32
        while bits <= self.ctx.max_sign_bits:
            e = self.enclosure(bits)
            if e.lo > 0:
                return 1
            if e.hi < 0:
                return -1
            bits <<= 1
        raise PrecisionExhausted(
            "sign undecided at maximum refinement; tower may be degenerate"
        )

    def __eq__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        if self.is_rational():
            return hash(self.as_fraction())
        return hash(frozenset((m, c) for m, c in self._terms.items()))

    def __lt__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __bool__(self):
        return not self.is_zero()

    # -- enclosure ------------------------------------------------------------------
    def _eval(self, bits: int) -> Interval:
        total = Interval(0)
        for m, c in self._terms.items():
            factor = Interval(c)
            for g in sorted(m):
                factor = factor * self.ctx._gen_enclosure(g, bits)
            total = total + factor
        return total

    def enclosure(self, bits: int = 64) -> Interval:
        """Certified interval of relative width <= 2**-bits around the value."""
        if self.is_rational():
            return Interval(self.as_fraction())
        work = bits + 8
        while True:
            e = self._eval(work)
            bound = Fraction(1, 1 << bits) * (1 + max(abs(e.lo), abs(e.hi)))
            if e.width() <= bound:
                return e
            work *= 2

    def __float__(self):
        return float(self.enclosure(64).mid())

    def __repr__(self):
        if self.is_rational():
            return f"AlgebraicReal({self.as_fraction()!r})"
        return f"AlgebraicReal(<{len(self._terms)} terms>~{float(self):.6g})"

    def __str__(self):
        if self.is_rational():
            return str(self.as_fraction())
        parts = []
        for m in sorted(self._terms, key=lambda mm: (len(mm), sorted(mm))):
            c = self._terms[m]
            if not m:
                parts.append(str(c))
            else:
                gens = "*".join(f"s{g}" for g in sorted(m))
                parts.append(f"{c}*{gens}")
        return " + ".join(parts)

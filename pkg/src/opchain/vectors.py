"""Finitely supported sequences over an exact scalar kind.

A FinVec models an element of c00: a map from nonnegative indices to
scalars with finite support.  Canonical form never stores a zero entry
(for certified scalars "zero" means certifiably zero), so equality of
vectors is plain dict equality.

A vector should hold one scalar kind throughout (Fraction/GaussianRational
for exact constructions, AlgebraicReal for certified ones); the helpers in
:mod:`opchain.scalars` dispatch transparently.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .scalars import sc_conj, sc_is_zero, sc_mag_sq, sc_str


class FinVec:
    __slots__ = ("_entries",)

    def __init__(self, entries: dict | None = None):
        self._entries = {}
        if entries:
            for n, c in entries.items():
                if n < 0:
                    raise ValueError(f"negative index {n}")
                if not sc_is_zero(c):
                    self._entries[n] = c

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls) -> "FinVec":
        return cls()

    @classmethod
    def unit(cls, n: int, one=1) -> "FinVec":
        return cls({n: one})

    @classmethod
    def from_items(cls, items: Iterable[tuple[int, object]]) -> "FinVec":
        acc: dict = {}
        for n, c in items:
            if n in acc:
                acc[n] = acc[n] + c
            else:
                acc[n] = c
        return cls(acc)

    # -- access ---------------------------------------------------------------
    def get(self, n: int):
        """Entry at index n, or int 0 when absent."""
        return self._entries.get(n, 0)

    def items(self):
        return sorted(self._entries.items())

    def support(self) -> list[int]:
        return sorted(self._entries)

    def max_index(self) -> int | None:
        return max(self._entries) if self._entries else None

    def is_zero(self) -> bool:
        return not self._entries

    def __len__(self):
        return len(self._entries)

    def __contains__(self, n):
        return n in self._entries

    # -- linear structure -------------------------------------------------------
    def add(self, other: "FinVec") -> "FinVec":
        acc = dict(self._entries)
        for n, c in other._entries.items():
            if n in acc:
                acc[n] = acc[n] + c
            else:
                acc[n] = c
        return FinVec(acc)

    __add__ = add

    def sub(self, other: "FinVec") -> "FinVec":
        acc = dict(self._entries)
        for n, c in other._entries.items():
            if n in acc:
                acc[n] = acc[n] - c
            else:
                acc[n] = -c
        return FinVec(acc)

    __sub__ = sub

    def neg(self) -> "FinVec":
        return FinVec({n: -c for n, c in self._entries.items()})

    __neg__ = neg

    def scale(self, scalar) -> "FinVec":
        if sc_is_zero(scalar):
            return FinVec()
        return FinVec({n: scalar * c for n, c in self._entries.items()})

    def conj(self) -> "FinVec":
        return FinVec({n: sc_conj(c) for n, c in self._entries.items()})

    def map_entries(self, f: Callable) -> "FinVec":
        return FinVec({n: f(c) for n, c in self._entries.items()})

    def norm_sq(self):
        """Sum of squared entry moduli; exact in the vector's scalar kind."""
        total = None
        for _, c in self._entries.items():
            m = sc_mag_sq(c)
            total = m if total is None else total + m
        return 0 if total is None else total

    def functional_at(self, x: "FinVec"):
        """Apply self as the linear functional v -> sum_n self[n] * v[n]."""
        total = None
        for n, c in self._entries.items():
            if n in x._entries:
                t = c * x._entries[n]
                total = t if total is None else total + t
        return 0 if total is None else total

    # -- comparison / display -------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, FinVec):
            return NotImplemented
        if set(self._entries) != set(other._entries):
            return False
        return all(other._entries[n] == c for n, c in self._entries.items())

    def __hash__(self):
        return hash(tuple(self.items()))

    def __repr__(self):
        inner = ", ".join(f"e{n}: {sc_str(c)}" for n, c in self.items())
        return f"FinVec({{{inner}}})"

    def to_json(self, scalar_str=sc_str) -> list:
        return [[n, scalar_str(c)] for n, c in self.items()]

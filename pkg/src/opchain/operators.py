"""Column-finite operators on c00 and prefix commutation verification.

An operator is given by its column rule n -> T e_n (a FinVec), so applying
it to a finitely supported vector stays finitely supported.  Optional
metadata makes more operations possible:

* band offsets (lo, hi): support(T e_n) is contained in [n+lo, n+hi]
  (either side may be None for "unbounded");
* a row oracle m -> finite list of (n, coefficient) with <T e_n, e_m> != 0,
  which certifies rows finite and makes the adjoint constructive.

Verification is prefix-based throughout: a report saying "defect 0 to
depth N" asserts (AB-BA)e_n = 0 for all n <= N and claims nothing beyond.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import UnboundedRow, ZeroFactor
from .scalars import sc_conj, sc_is_zero, sc_mag_sq, sc_str
from .vectors import FinVec

Band = tuple[Optional[int], Optional[int]]


class ColumnFiniteOperator:
    """Operator defined by a column rule, with lazy memoized columns."""

    def __init__(
        self,
        name: str,
        column_fn: Callable[[int], FinVec],
        *,
        band: Band | None = None,
        row_oracle: Callable[[int], list] | None = None,
        tail_kind: str | None = None,
        tail_reason: str = "",
        provenance: tuple[str, ...] = (),
    ):
        self.name = name
        self._column_fn = column_fn
        self.band = band
        self.row_oracle = row_oracle
        self.tail_kind = tail_kind
        self.tail_reason = tail_reason
        self.provenance = provenance
        self._cols: dict[int, FinVec] = {}

    def column(self, n: int) -> FinVec:
        if n < 0:
            raise ValueError(f"negative basis index {n}")
        col = self._cols.get(n)
        if col is None:
            col = self._column_fn(n)
            if self.band is not None and not col.is_zero():
                lo, hi = self.band
                top, bot = col.max_index(), col.support()[0]
                if hi is not None and top > n + hi:
                    raise AssertionError(
                        f"{self.name}: column {n} exceeds declared band above"
                    )
                if lo is not None and bot < n + lo:
                    raise AssertionError(
                        f"{self.name}: column {n} exceeds declared band below"
                    )
            self._cols[n] = col
        return col

    def entry(self, m: int, n: int):
        """Matrix entry <T e_n, e_m>."""
        return self.column(n).get(m)

    def apply(self, x: FinVec) -> FinVec:
        """Linear extension of the column rule to c00."""
        acc = FinVec()
        for n, c in x.items():
            acc = acc.add(self.column(n).scale(c))
        return acc

    # -- builders -----------------------------------------------------------
    @classmethod
    def identity(cls, one=1) -> "ColumnFiniteOperator":
        return cls("I", lambda n: FinVec.unit(n, one), band=(0, 0),
                   row_oracle=lambda m: [(m, one)])

    @classmethod
    def zero(cls) -> "ColumnFiniteOperator":
        return cls("0", lambda n: FinVec.zero(), band=(0, 0),
                   row_oracle=lambda m: [], tail_kind="zero",
                   tail_reason="zero operator")

    @classmethod
    def diagonal(cls, name: str, diag_fn: Callable[[int], object]) -> "ColumnFiniteOperator":
        def col(n):
            return FinVec({n: diag_fn(n)})

        return cls(name, col, band=(0, 0),
                   row_oracle=lambda m: [(m, diag_fn(m))] if not sc_is_zero(diag_fn(m)) else [])

    def __repr__(self):
        return f"<ColumnFiniteOperator {self.name}>"

    def to_json(self, depth: int = 8, scalar_str=sc_str) -> dict:
        cols = {}
        for n in range(depth + 1):
            col = self.column(n)
            if not col.is_zero():
                cols[str(n)] = col.to_json(scalar_str)
        return {
            "name": self.name,
            "band": list(self.band) if self.band is not None else None,
            "columns_to_depth": depth,
            "columns": cols,
            "tail_kind": self.tail_kind,
            "provenance": list(self.provenance),
        }


# ---------------------------------------------------------------------------
# Algebra of operators
# ---------------------------------------------------------------------------

def _band_add(a: Band | None, b: Band | None) -> Band | None:
    if a is None or b is None:
        return None
    lo = None if (a[0] is None or b[0] is None) else a[0] + b[0]
    hi = None if (a[1] is None or b[1] is None) else a[1] + b[1]
    return (lo, hi)


def _band_hull(bands: list[Band | None]) -> Band | None:
    if any(b is None for b in bands):
        return None
    los = [b[0] for b in bands]
    his = [b[1] for b in bands]
    lo = None if any(v is None for v in los) else min(los)
    hi = None if any(v is None for v in his) else max(his)
    return (lo, hi)


def compose(a: ColumnFiniteOperator, b: ColumnFiniteOperator,
            name: str | None = None) -> ColumnFiniteOperator:
    """Operator product a.b: column n = a applied to b's column n."""
    label = name or f"({a.name}.{b.name})"
    row_oracle = None
    if a.row_oracle is not None and b.row_oracle is not None:
        a_rows, b_rows = a.row_oracle, b.row_oracle

        def row_oracle(m):
            acc: dict = {}
            for k, av in a_rows(m):
                for n, bv in b_rows(k):
                    acc[n] = acc.get(n, 0) + av * bv
            return [(n, v) for n, v in sorted(acc.items()) if not sc_is_zero(v)]

    return ColumnFiniteOperator(
        label,
        lambda n: a.apply(b.column(n)),
        band=_band_add(a.band, b.band),
        row_oracle=row_oracle,
    )


def linear_combine(coeffs: list, ops: list[ColumnFiniteOperator],
                   name: str | None = None) -> ColumnFiniteOperator:
    """Column-wise linear combination sum_i coeffs[i] * ops[i]."""
    if len(coeffs) != len(ops):
        raise ValueError("coefficient and operator lists differ in length")
    label = name or "+".join(f"{sc_str(c)}*{op.name}" for c, op in zip(coeffs, ops))

    def col(n):
        acc = FinVec()
        for c, op in zip(coeffs, ops):
            if not sc_is_zero(c):
                acc = acc.add(op.column(n).scale(c))
        return acc

    row_oracle = None
    if all(op.row_oracle is not None for op in ops):
        def row_oracle(m):
            acc: dict = {}
            for c, op in zip(coeffs, ops):
                if sc_is_zero(c):
                    continue
                for n, v in op.row_oracle(m):
                    acc[n] = acc.get(n, 0) + c * v
            return [(n, v) for n, v in sorted(acc.items()) if not sc_is_zero(v)]

    return ColumnFiniteOperator(
        label, col, band=_band_hull([op.band for op in ops]), row_oracle=row_oracle
    )


def adjoint(t: ColumnFiniteOperator, search_bound: int | None = None) -> ColumnFiniteOperator:
    """Matrix adjoint: <T* e_m, e_n> = conj(<T e_n, e_m>).

    Rows of T must be certifiably finite: either a row oracle is present,
    or declared band offsets bound the contributing columns, or the caller
    asserts completeness of a column scan up to ``search_bound``.
    """
    if t.row_oracle is not None:
        rows = t.row_oracle
        prov = f"adjoint of {t.name} via row oracle"
    elif t.band is not None and t.band[0] is not None and t.band[1] is not None:
        lo, hi = t.band

        def rows(m):
            out = []
            for n in range(max(0, m - hi), m - lo + 1):
                c = t.column(n).get(m)
                if not sc_is_zero(c):
                    out.append((n, c))
            return out

        prov = f"adjoint of {t.name} via band offsets ({lo}, {hi})"
    elif search_bound is not None:
        bound = search_bound
        if t.band is not None and t.band[0] is not None:
            bound = search_bound - min(0, t.band[0])

        def rows(m):
            out = []
            for n in range(0, bound + 1):
                c = t.column(n).get(m)
                if not sc_is_zero(c):
                    out.append((n, c))
            return out

        prov = (f"adjoint of {t.name} via caller-asserted column scan"
                f" to {bound}")
    else:
        raise UnboundedRow(
            f"{t.name}: no row oracle, band, or search bound; rows not certifiably finite"
        )

    def col(m):
        return FinVec({n: sc_conj(c) for n, c in rows(m)})

    flipped = None
    if t.band is not None:
        lo, hi = t.band
        flipped = (None if hi is None else -hi, None if lo is None else -lo)

    return ColumnFiniteOperator(
        f"adj({t.name})",
        col,
        band=flipped,
        # rows of the adjoint are conjugated columns of the original
        row_oracle=lambda q: [(m, sc_conj(c)) for m, c in t.column(q).items()],
        tail_kind=t.tail_kind,
        tail_reason=t.tail_reason,
        provenance=t.provenance + (prov,),
    )


def rank_one(f: FinVec, y: FinVec, name: str | None = None) -> ColumnFiniteOperator:
    """Rank-one operator x -> f(x) y for a finitely supported functional f."""
    if f.is_zero() or y.is_zero():
        raise ZeroFactor("rank-one factors must be nonzero")
    label = name or "f⊗y"

    def col(n):
        c = f.get(n)
        if sc_is_zero(c):
            return FinVec.zero()
        return y.scale(c)

    def row(m):
        v = y.get(m)
        if sc_is_zero(v):
            return []
        return [(n, c * v) for n, c in f.items()]

    return ColumnFiniteOperator(
        label, col, row_oracle=row,
        tail_kind="finite-rank", tail_reason="rank-one f⊗y by construction",
    )


def truncate(t: ColumnFiniteOperator, size: int) -> list[list]:
    """Dense size x size compression: entry[m][n] = <T e_n, e_m>."""
    if size < 1:
        raise ValueError("truncation size must be >= 1")
    rows = [[0] * size for _ in range(size)]
    for n in range(size):
        for m, c in t.column(n).items():
            if m < size:
                rows[m][n] = c
    return rows


# ---------------------------------------------------------------------------
# Commutation verification
# ---------------------------------------------------------------------------

@dataclass
class DefectReport:
    """Largest commutation defect of (AB-BA)e_n over a basis prefix."""

    left: str
    right: str
    depth: int
    max_defect_sq: object  # Fraction / AlgebraicReal; None means identically 0
    worst_index: int | None

    def is_zero(self) -> bool:
        return self.max_defect_sq is None or sc_is_zero(self.max_defect_sq)

    def defect_str(self) -> str:
        if self.max_defect_sq is None:
            return "0"
        return sc_str(self.max_defect_sq)

    def to_json(self) -> dict:
        return {
            "left": self.left,
            "right": self.right,
            "depth": self.depth,
            "max_defect_sq": self.defect_str(),
            "worst_index": self.worst_index,
            "zero": self.is_zero(),
        }


def _sq_greater(a, b) -> bool:
    """a > b for squared magnitudes (Fractions or same-tower AlgebraicReals)."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return a > b
    diff = a - b
    return diff.sign() > 0


def commutator_column(a: ColumnFiniteOperator, b: ColumnFiniteOperator,
                      n: int) -> FinVec:
    """(AB - BA) e_n."""
    return a.apply(b.column(n)).sub(b.apply(a.column(n)))


def commutation_defect(a: ColumnFiniteOperator, b: ColumnFiniteOperator,
                       depth: int) -> DefectReport:
    """Sweep (AB-BA)e_n for n <= depth; exact zero expected in exact mode."""
    worst = None
    worst_index = None
    for n in range(depth + 1):
        d = a.apply(b.column(n)).sub(b.apply(a.column(n)))
        for _, c in d.items():
            m = sc_mag_sq(c)
            if worst is None or _sq_greater(m, worst):
                worst = m
                worst_index = n
    return DefectReport(a.name, b.name, depth, worst, worst_index)


# ---------------------------------------------------------------------------
# Chains with verification records
# ---------------------------------------------------------------------------

@dataclass
class NonScalarWitness:
    """Evidence that an operator is not a scalar multiple of the identity."""

    kind: str            # "off-axis" or "diagonal-jump"
    index_a: int
    index_b: int | None
    note: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "index_a": self.index_a,
                "index_b": self.index_b, "note": self.note}


def nonscalar_witness(t: ColumnFiniteOperator, depth: int) -> NonScalarWitness | None:
    """Search n <= depth for evidence t != lambda*I; None if scalar on prefix."""
    diag = {}
    for n in range(depth + 1):
        col = t.column(n)
        sup = col.support()
        if sup and sup != [n]:
            off = sup[0] if sup[0] != n else sup[-1]
            return NonScalarWitness(
                "off-axis", n, None,
                f"image of e_{n} has a component at index {off} != {n}",
            )
        diag[n] = col.get(n)
    for n in range(depth):
        if not (diag[n] == diag[n + 1]):
            return NonScalarWitness(
                "diagonal-jump", n, n + 1,
                f"diagonal entries at {n} and {n + 1} differ",
            )
    return None


@dataclass
class EdgeReport:
    left: str
    right: str
    depth: int
    defect: DefectReport

    def to_json(self) -> dict:
        return self.defect.to_json()


@dataclass
class Chain:
    """Ordered commuting family with per-edge verification records."""

    operators: list[ColumnFiniteOperator]
    edges: list[EdgeReport]
    witnesses: dict[int, NonScalarWitness]
    tail_kind: str
    tail_reason: str
    depth: int
    warnings: list[str] = field(default_factory=list)

    def all_edges_zero(self) -> bool:
        return all(e.defect.is_zero() for e in self.edges)

    def labels(self) -> list[str]:
        return [op.name for op in self.operators]

    def to_json(self) -> dict:
        return {
            "operators": self.labels(),
            "depth": self.depth,
            "edges": [e.to_json() for e in self.edges],
            "nonscalar_witnesses": {
                str(i): w.to_json() for i, w in sorted(self.witnesses.items())
            },
            "tail_kind": self.tail_kind,
            "tail_reason": self.tail_reason,
            "warnings": list(self.warnings),
            "all_edges_zero": self.all_edges_zero(),
        }


def verify_chain(
    operators: list[ColumnFiniteOperator],
    depth: int,
    interior: list[int],
    tail_kind: str,
    tail_reason: str,
    warnings: list[str] | None = None,
) -> Chain:
    """Verify adjacent commutation and interior non-scalarity for a chain."""
    edges = []
    for a, b in zip(operators, operators[1:]):
        edges.append(EdgeReport(a.name, b.name, depth, commutation_defect(a, b, depth)))
    witnesses = {}
    for i in interior:
        w = nonscalar_witness(operators[i], depth)
        if w is not None:
            witnesses[i] = w
    return Chain(operators, edges, witnesses, tail_kind, tail_reason, depth,
                 warnings or [])

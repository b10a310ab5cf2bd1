"""Weighted-shift chains on sequence spaces.

Given an injective index map s and weights w, the shift T e_n = w_n e_{s(n)}
commutes with T^2, which commutes with the diagonal projection onto an
orbit-parity set B (n in B iff s(s(n)) in B), which commutes with a
rank-one tail.  This module builds that chain of length 3 with exact
prefix verification, plus the adjoint transport, kernel/cokernel rank-one
commutants, and the interleaved direct-sum example with disjoint point
spectra.

Basis indices start at 0 throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import (
    BudgetExhausted,
    NotInKernel,
    RangeNotAnnihilated,
    ScalarIntermediate,
)
from .operators import (
    Chain,
    ColumnFiniteOperator,
    adjoint,
    commutation_defect,
    compose,
    rank_one,
    verify_chain,
)
from .scalars import GaussianRational, sc_is_zero
from .vectors import FinVec


# ---------------------------------------------------------------------------
# Injective index maps
# ---------------------------------------------------------------------------

@dataclass
class IndexMap:
    """A total injective map on nonnegative indices, with verified metadata.

    surjective is True / False / None (unknown).  When declared False the
    base point n0 is asserted to lie outside the range; the assertion is
    spot-checked up to ``spotcheck_bound`` and recorded, never proven.
    When declared True an inverse oracle must be supplied.
    """

    fn: Callable[[int], int]
    name: str
    surjective: Optional[bool]
    inverse: Optional[Callable[[int], Optional[int]]] = None
    n0: int = 0
    spotcheck_bound: int = 1000
    # bounds on fn(n) - n when known; feeds operator band metadata
    offset_bounds: Optional[tuple[Optional[int], Optional[int]]] = None

    def __post_init__(self):
        seen: dict[int, int] = {}
        for n in range(self.spotcheck_bound + 1):
            v = self.fn(n)
            if v < 0:
                raise ValueError(f"{self.name}: image of {n} is negative")
            if v in seen:
                raise ValueError(
                    f"{self.name}: not injective, {seen[v]} and {n} both map to {v}"
                )
            seen[v] = n
        if self.surjective is False:
            if self.n0 in seen:
                raise ValueError(
                    f"{self.name}: n0={self.n0} is hit by {seen[self.n0]}; "
                    "non-surjectivity assertion refuted by spot check"
                )
        if self.surjective is True and self.inverse is None:
            raise ValueError(f"{self.name}: surjective map needs an inverse oracle")

    # -- stock constructions ---------------------------------------------
    @staticmethod
    def shift(gap: int = 1, n0: int = 0, spotcheck_bound: int = 1000) -> "IndexMap":
        if gap < 1:
            raise ValueError("shift gap must be >= 1")
        return IndexMap(
            lambda n: n + gap,
            f"n+{gap}",
            surjective=False,
            inverse=lambda m: m - gap if m >= gap else None,
            n0=n0,
            spotcheck_bound=spotcheck_bound,
            offset_bounds=(gap, gap),
        )

    @staticmethod
    def swap(a: int, b: int, n0: int | None = None) -> "IndexMap":
        def fn(n):
            if n == a:
                return b
            if n == b:
                return a
            return n

        d = abs(a - b)
        return IndexMap(fn, f"swap({a},{b})", surjective=True, inverse=fn,
                        n0=a if n0 is None else n0, offset_bounds=(-d, d))

    @staticmethod
    def affine(a: int, b: int, spotcheck_bound: int = 1000) -> "IndexMap":
        """n -> a*n + b with a >= 1; non-surjective unless the identity."""
        if a < 1 or b < 0:
            raise ValueError("need a >= 1 and b >= 0")
        if a == 1 and b == 0:
            return IndexMap(lambda n: n, "id", surjective=True,
                            inverse=lambda m: m, offset_bounds=(0, 0))
        n0 = 1 if b == 0 else 0  # smallest index outside {a*n + b}
        return IndexMap(lambda n: a * n + b, f"{a}n+{b}", surjective=False,
                        n0=n0, spotcheck_bound=spotcheck_bound,
                        offset_bounds=(b if a > 1 else b, None if a > 1 else b))

    @staticmethod
    def perm_block(perm: list[int], tail_gap: int = 0,
                   spotcheck_bound: int = 1000) -> "IndexMap":
        """Permute [0, len(perm)), then n -> n + tail_gap beyond the block."""
        m = len(perm)
        if sorted(perm) != list(range(m)):
            raise ValueError("perm must be a permutation of 0..len-1")
        inv = [0] * m
        for i, v in enumerate(perm):
            inv[v] = i

        def fn(n):
            return perm[n] if n < m else n + tail_gap

        if tail_gap == 0:
            def inverse(q):
                return inv[q] if q < m else q

            return IndexMap(fn, f"perm{m}", surjective=True, inverse=inverse,
                            n0=0, spotcheck_bound=spotcheck_bound,
                            offset_bounds=(-(m - 1), m - 1) if m > 1 else (0, 0))
        # images are [0, m) union [m+gap, inf); index m is missed
        return IndexMap(fn, f"perm{m}+gap{tail_gap}", surjective=False, n0=m,
                        spotcheck_bound=spotcheck_bound,
                        offset_bounds=(min(-(m - 1), tail_gap), max(m - 1, tail_gap)))

    @staticmethod
    def from_table(table: dict[int, int], tail_gap: int = 1,
                   surjective: bool = False, n0: int | None = None,
                   spotcheck_bound: int = 1000,
                   name: str = "table") -> "IndexMap":
        def fn(n):
            return table[n] if n in table else n + tail_gap

        inverse = None
        if surjective:
            inv = {v: k for k, v in table.items()}

            def inverse(q):
                if q in inv:
                    return inv[q]
                back = q - tail_gap
                return back if back >= 0 and back not in table else None

        return IndexMap(fn, name, surjective=surjective, inverse=inverse,
                        n0=0 if n0 is None else n0,
                        spotcheck_bound=spotcheck_bound)


def random_index_map(rng: random.Random) -> IndexMap:
    """Random mixture: shifts, finite permutation blocks, gap maps."""
    flavor = rng.choice(["shift", "perm", "perm-gap", "affine", "swap"])
    if flavor == "shift":
        return IndexMap.shift(rng.randint(1, 4))
    if flavor == "swap":
        a = rng.randint(0, 6)
        b = rng.randint(0, 6)
        while b == a:
            b = rng.randint(0, 6)
        return IndexMap.swap(a, b)
    if flavor == "affine":
        return IndexMap.affine(rng.randint(2, 3), rng.randint(0, 3))
    size = rng.randint(2, 8)
    perm = list(range(size))
    rng.shuffle(perm)
    if flavor == "perm":
        return IndexMap.perm_block(perm, 0)
    return IndexMap.perm_block(perm, rng.randint(1, 3))


# ---------------------------------------------------------------------------
# Orbit-parity sets
# ---------------------------------------------------------------------------

@dataclass
class OrbitSet:
    """Membership oracle for B = even orbit of n0 under the index map.

    Three-valued: decided members, decided nonmembers, and unknown-at-budget.
    When the orbit closes into a cycle within budget the whole set is
    decided (everything off the orbit is a nonmember).
    """

    base: int
    spec: IndexMap
    budget: int
    decided: dict[int, bool] = field(default_factory=dict)
    fully_decided: bool = False
    cycle_length: int | None = None

    def decide(self, n: int) -> Optional[bool]:
        if n in self.decided:
            return self.decided[n]
        if self.fully_decided:
            return False
        return None

    def member(self, n: int) -> bool:
        d = self.decide(n)
        if d is None:
            raise BudgetExhausted(n)
        return d

    def decided_member(self) -> int | None:
        for n, m in self.decided.items():
            if m:
                return n
        return None

    def decided_nonmember(self) -> int | None:
        for n, m in self.decided.items():
            if not m:
                return n
        if self.fully_decided:
            # anything off the (finite) orbit; pick the smallest
            n = 0
            while n in self.decided:
                n += 1
            return n
        return None


def orbit_set(spec: IndexMap, budget: int = 10000) -> OrbitSet:
    """Build the even-orbit set of spec.n0, forward or two-sided.

    Non-surjective case: B = {s^(2k)(n0) : k >= 0}; a revisit would refute
    the n0-outside-range assertion and raises.  Surjective case: two-sided
    orbit via the inverse oracle; a closed cycle of odd length L makes B
    the whole orbit, even L alternates.
    """
    if spec.surjective is None:
        raise ValueError(
            f"{spec.name}: surjectivity must be declared yes or no to pick an orbit"
        )
    n0 = spec.n0
    if not spec.surjective:
        decided: dict[int, bool] = {n0: True}
        x = n0
        for step in range(1, budget + 1):
            x = spec.fn(x)
            if x in decided:
                raise ValueError(
                    f"{spec.name}: forward orbit of {n0} revisits {x}; "
                    "n0 is in the range, non-surjectivity assertion false"
                )
            decided[x] = step % 2 == 0
        return OrbitSet(n0, spec, budget, decided)

    # surjective: walk forward with cycle detection, then backward
    position = {n0: 0}
    x = n0
    cycle_len = None
    for step in range(1, budget + 1):
        x = spec.fn(x)
        if x in position:
            if position[x] != 0:
                # an injective map can only re-enter a forward walk at its start
                raise ValueError(
                    f"{spec.name}: forward orbit re-enters at interior position "
                    f"{position[x]}; injectivity violated beyond the spot check"
                )
            cycle_len = step
            break
        position[x] = step
    if cycle_len is None:
        y = n0
        for step in range(1, budget + 1):
            prev = spec.inverse(y)
            if prev is None:
                raise ValueError(
                    f"{spec.name}: inverse oracle failed at {y} despite "
                    "declared surjectivity"
                )
            y = prev
            if y in position:
                cycle_len = position[y] + step
                break
            position[y] = -step
    if cycle_len is not None:
        # finite orbit: re-walk the full cycle so every index is decided
        decided = {}
        v = n0
        all_even = cycle_len % 2 == 1  # odd cycles are covered by even powers
        for step in range(cycle_len):
            decided[v] = True if all_even else step % 2 == 0
            v = spec.fn(v)
        if v != n0:
            raise ValueError(f"{spec.name}: cycle of length {cycle_len} fails to close")
        return OrbitSet(n0, spec, budget, decided, fully_decided=True,
                        cycle_length=cycle_len)
    decided = {v: p % 2 == 0 for v, p in position.items()}
    return OrbitSet(n0, spec, budget, decided)


# ---------------------------------------------------------------------------
# Operators from index maps
# ---------------------------------------------------------------------------

def diag_projection(b: OrbitSet, name: str | None = None) -> ColumnFiniteOperator:
    """0/1 diagonal projection onto span{e_n : n in B}."""
    label = name or f"P[{b.spec.name};n0={b.base}]"
    one = GaussianRational(1)

    def col(n):
        return FinVec({n: one}) if b.member(n) else FinVec.zero()

    def row(m):
        return [(m, one)] if b.member(m) else []

    return ColumnFiniteOperator(label, col, band=(0, 0), row_oracle=row)


def weighted_shift(w: Callable[[int], object], spec: IndexMap,
                   name: str | None = None) -> ColumnFiniteOperator:
    """T e_n = w(n) e_{spec.fn(n)}."""
    label = name or f"T[w;{spec.name}]"

    def col(n):
        c = GaussianRational.of(w(n))
        if c.is_zero():
            return FinVec.zero()
        return FinVec({spec.fn(n): c})

    row_oracle = None
    if spec.inverse is not None:
        def row_oracle(m):
            n = spec.inverse(m)
            if n is None:
                return []
            c = GaussianRational.of(w(n))
            return [] if c.is_zero() else [(n, c)]

    op = ColumnFiniteOperator(label, col, band=spec.offset_bounds,
                              row_oracle=row_oracle)
    op.index_map = spec
    return op


def chain_for_weighted_shift(t: ColumnFiniteOperator, depth: int,
                             budget: int = 10000) -> Chain:
    """Chain [T, T^2, P_B, F] verified edge-by-edge to the given depth.

    F is the rank-one coordinate projection at the orbit base point; it
    commutes with the diagonal P_B whether or not the base point is a
    member.  Raises ScalarIntermediate when T^2 is scalar on the prefix
    (degenerate weights).
    """
    spec: IndexMap = getattr(t, "index_map", None)
    if spec is None:
        raise ValueError("shift operator must carry its index map")
    t2 = compose(t, t, name=f"{t.name}^2")
    b = orbit_set(spec, budget)
    p = diag_projection(b)
    one = GaussianRational(1)
    tail = rank_one(FinVec.unit(spec.n0, one), FinVec.unit(spec.n0, one),
                    name=f"e{spec.n0}*⊗e{spec.n0}")

    warnings = []
    if b.decided_member() is None or b.decided_nonmember() is None:
        warnings.append(
            "properness of P_B not witnessed within budget: missing a decided "
            "member or nonmember"
        )

    chain = verify_chain(
        [t, t2, p, tail],
        depth,
        interior=[1, 2],
        tail_kind="finite-rank",
        tail_reason=f"rank-one coordinate projection at index {spec.n0}",
        warnings=warnings,
    )
    if 1 not in chain.witnesses:
        raise ScalarIntermediate(
            f"{t2.name} is scalar on the prefix n <= {depth}; the interior of "
            "the chain degenerates (e.g. zero or involution-like weights)"
        )
    if 2 not in chain.witnesses:
        chain.warnings.append(
            f"no non-scalarity witness for {p.name} within depth {depth}"
        )
    return chain


def kernel_rank_one(t: ColumnFiniteOperator, y: FinVec, f: FinVec,
                    depth: int) -> ColumnFiniteOperator:
    """Rank-one f⊗y commuting with t, from y in ker t and f killing range t.

    The range condition is a prefix certificate: f annihilates every column
    n <= depth; commutation is then re-verified on the same prefix.
    """
    if not t.apply(y).is_zero():
        raise NotInKernel(f"candidate vector has nonzero image under {t.name}")
    for n in range(depth + 1):
        if not sc_is_zero(f.functional_at(t.column(n))):
            raise RangeNotAnnihilated(n)
    op = rank_one(f, y)
    defect = commutation_defect(op, t, depth)
    if not defect.is_zero():
        raise AssertionError(
            f"rank-one tail fails to commute at index {defect.worst_index}"
        )
    return op


def adjoint_chain(chain: Chain, bound: int | None = None) -> Chain:
    """Adjoint of every chain element, with edges re-verified at the same depth."""
    adj_ops = [adjoint(op, search_bound=bound) for op in chain.operators]
    interior = sorted(chain.witnesses)
    out = verify_chain(
        adj_ops,
        chain.depth,
        interior=interior,
        tail_kind=chain.tail_kind,
        tail_reason=f"adjoint preserves finite rank: {chain.tail_reason}",
        warnings=list(chain.warnings),
    )
    return out


# ---------------------------------------------------------------------------
# Direct-sum example with disjoint point spectra
# ---------------------------------------------------------------------------

def embed_left(n: int) -> int:
    """1-based index of the first summand -> even interleaved index."""
    return 2 * (n - 1)


def embed_right(n: int) -> int:
    """1-based index of the second summand -> odd interleaved index."""
    return 2 * n - 1


def disjoint_spectra_example(depth: int = 200):
    """Interleaved model of (backward shift) ⊕ (I - forward shift).

    Both summands use weights 1/n.  Returns the operator and the two
    finitely checkable eigen-identities: the left embedding of the first
    basis vector is annihilated (eigenvalue 0 of T), and the adjoint fixes
    the right embedding of the first basis vector (eigenvalue 1 of T*).
    The full disjointness of the point spectra is analytic background, not
    something a finite check decides.
    """
    def col(idx):
        if idx % 2 == 0:
            n = idx // 2 + 1          # 1-based index in the left summand
            if n == 1:
                return FinVec.zero()
            return FinVec({embed_left(n - 1): GaussianRational(Fraction(1, n))})
        n = (idx + 1) // 2            # 1-based index in the right summand
        return FinVec({
            embed_right(n): GaussianRational(1),
            embed_right(n + 1): GaussianRational(-Fraction(1, n)),
        })

    t = ColumnFiniteOperator("S2⊕(I-S1)", col, band=(-2, 2))
    t_star = adjoint(t)

    kernel_vec = FinVec.unit(embed_left(1), GaussianRational(1))
    fixed_vec = FinVec.unit(embed_right(1), GaussianRational(1))
    checks = {
        "kernel_witness": t.apply(kernel_vec).is_zero(),
        "adjoint_fixed_point": t_star.apply(fixed_vec) == fixed_vec,
        "identity_commutes": commutation_defect(
            t, ColumnFiniteOperator.identity(GaussianRational(1)), depth
        ).is_zero(),
        "note": (
            "point spectra {0} and {1} are disjoint for the full operators; "
            "only the two eigen-identities above are finitely checkable"
        ),
    }
    return t, checks

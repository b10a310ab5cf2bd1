"""Scheduled-feedback backward shift and its commutant separation evidence.

The operator acts on c00 as a backward shift T e_j = e_{j-1}, except at an
increasing family of anchor columns r_1 < r_2 < ... where the column picks
up a damped copy of an earlier auxiliary vector:

    T e_{r_k} = eps_k e_{r_k - 1} + (sqrt(eps_k) / ||u_{h(k)}||) u_{h(k)}.

The anchor spacing (4 r_k < r_{k+1} < 6 r_k), the recycling rule h(k) <= k-1,
and a fair congruence service (condition on r_k mod n) are produced by a
deterministic fair-queue generator.  Polynomials A = sum c_i T^i in the
commutant map the basis tails e_{r_k - 1} to vectors that stay uniformly
separated, which is the finite evidence that no nonzero compact operator
commutes with T.

Scalars are exact algebraic reals (see :mod:`opchain.algebraic`), so
commutation defects and expansion residuals are certified by exact
cancellation; enclosures appear only in norm caches and reports.
"""

from __future__ import annotations

import hashlib
import json
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterator, Optional

from .algebraic import AlgebraicReal, SquareRootField
from .errors import (
    DependencyViolation,
    OutOfRange,
    UnsatisfiableStep,
    WitnessBelowBound,
    ZeroCoefficients,
)
from .errors import ExpansionMismatch
from .intervals import Interval, sqrt_upper
from .operators import (
    ColumnFiniteOperator,
    DefectReport,
    commutation_defect,
    compose,
    linear_combine,
)
from .vectors import FinVec


# ---------------------------------------------------------------------------
# Anchor schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FairnessParams:
    """Queue policy: prefill the triple queue, then inject slowly.

    Slow injection keeps the queue small enough that every early triple is
    re-served several times over a finite horizon; in the limit every triple
    is served infinitely often.
    """

    prefill: int = 96
    inject_every: int = 12

    def __post_init__(self):
        if self.prefill < 0 or self.inject_every < 1:
            raise ValueError("need prefill >= 0 and inject_every >= 1")


def _triples() -> Iterator[tuple[int, int, int]]:
    """Fixed diagonal enumeration of (j, n, s): j >= 1, n >= 1, 0 <= s < n."""
    total = 2
    while True:
        for j in range(1, total):
            n = total - j
            for s in range(n):
                yield (j, n, s)
        total += 1


def _least_congruent_in(lo_excl: int, hi_excl: int, s: int, n: int) -> Optional[int]:
    """Least x with lo_excl < x < hi_excl and x = s (mod n), else None."""
    start = lo_excl + 1
    x = start + ((s - start) % n)
    return x if x < hi_excl else None


def _select_triple(queue: deque, k: int, r_prev: int) -> tuple[int, int, int, int]:
    """Oldest satisfiable triple and its least admissible anchor value."""
    for idx, (j, n, s) in enumerate(queue):
        if j > k - 1:
            continue
        cand = _least_congruent_in(4 * r_prev, 6 * r_prev, s, n)
        if cand is not None:
            return idx, j, s, cand
    raise UnsatisfiableStep(f"no queued triple satisfiable at step {k}")


@dataclass
class FeedbackSchedule:
    """Anchors r[0..K], recycle targets h[1..K], and the service log."""

    r: list[int]
    h: list[Optional[int]]
    served_log: list[dict]
    fairness: FairnessParams

    @property
    def K(self) -> int:
        return len(self.r) - 1

    def validate(self) -> None:
        if self.r[0] != 0 or (self.K >= 1 and self.r[1] != 4):
            raise ValueError("schedule must start with r0=0, r1=4")
        for k in range(1, self.K):
            if not (4 * self.r[k] < self.r[k + 1] < 6 * self.r[k]):
                raise ValueError(f"anchor spacing violated at step {k + 1}")
        for k in range(1, self.K + 1):
            if not (0 <= self.h[k] <= k - 1):
                raise ValueError(f"recycle target out of range at step {k}")
        for rec in self.served_log:
            if rec.get("kind") != "triple":
                continue
            k, j, n, s = rec["k"], rec["j"], rec["n"], rec["s"]
            if self.h[k] != j or self.r[k] % n != s % n:
                raise ValueError(f"service record inconsistent at step {k}")

    def block_of(self, j: int) -> int:
        """k with r[k] <= j < r[k+1] (j = r[K] maps to block K)."""
        if j < 0 or j > self.r[-1]:
            raise OutOfRange(f"index {j} outside built range [0, {self.r[-1]}]")
        return bisect_right(self.r, j) - 1

    def anchor_step(self, j: int) -> Optional[int]:
        k = self.block_of(j)
        return k if k >= 1 and self.r[k] == j else None

    def served_counts(self) -> dict[tuple[int, int, int], int]:
        counts: dict[tuple[int, int, int], int] = {}
        for rec in self.served_log:
            if rec.get("kind") == "triple":
                key = (rec["j"], rec["n"], rec["s"])
                counts[key] = counts.get(key, 0) + 1
        return counts

    def digest(self) -> dict:
        blob = json.dumps(self.served_log, sort_keys=True).encode()
        return {
            "steps": len(self.served_log),
            "bootstrap_steps": sum(
                1 for rec in self.served_log if rec.get("kind") == "bootstrap"
            ),
            "distinct_triples_served": len(self.served_counts()),
            "sha256": hashlib.sha256(blob).hexdigest(),
        }

    def to_json(self) -> dict:
        return {
            "r": list(self.r),
            "h": [None] + [self.h[k] for k in range(1, self.K + 1)],
            "fairness": {"prefill": self.fairness.prefill,
                         "inject_every": self.fairness.inject_every},
            "served_log_digest": self.digest(),
        }


def generate_schedule(K: int, fairness: FairnessParams | None = None) -> FeedbackSchedule:
    """Deterministic schedule satisfying the spacing, recycling and
    congruence-fairness conditions.

    Step 1 is a bootstrap (h=0, r=4).  At each later step the oldest
    satisfiable queued triple (j, n, s) is served: h(k) = j and r(k) is the
    least value in the open spacing interval congruent to s mod n; the
    triple then re-enters the queue.  If nothing is satisfiable the step
    falls back to a bootstrap and the queue is retried next step.
    """
    if K < 1:
        raise ValueError("schedule length K must be >= 1")
    fairness = fairness or FairnessParams()
    r: list[int] = [0, 4]
    h: list[Optional[int]] = [None, 0]
    served: list[dict] = [{"k": 1, "kind": "bootstrap"}]
    enum = _triples()
    queue: deque = deque(islice(enum, fairness.prefill))
    for k in range(2, K + 1):
        if (k - 2) % fairness.inject_every == 0:
            queue.append(next(enum))
        r_prev = r[k - 1]
        try:
            idx, j, s, r_next = _select_triple(queue, k, r_prev)
        except UnsatisfiableStep:
            r.append(4 * r_prev + 1)
            h.append(0)
            served.append({"k": k, "kind": "bootstrap"})
            continue
        triple = queue[idx]
        del queue[idx]
        queue.append(triple)
        r.append(r_next)
        h.append(j)
        served.append({"k": k, "kind": "triple", "j": triple[0],
                       "n": triple[1], "s": triple[2]})
    out = FeedbackSchedule(r, h, served, fairness)
    out.validate()
    return out


# ---------------------------------------------------------------------------
# Damping schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpsSchedule:
    """Strictly decreasing damping weights in (0, 1/2), rational squares.

    Both stock rules are perfect rational squares so sqrt(eps_k) is exact;
    the only irrational factors anywhere are the 1/||u|| normalizations.
    """

    name: str
    base: int  # eps_k = base**-k

    @staticmethod
    def from_name(name: str) -> "EpsSchedule":
        if name == "4^-k":
            return EpsSchedule(name, 4)
        if name == "16^-k":
            return EpsSchedule(name, 16)
        raise ValueError(f"unsupported damping rule {name!r}")

    def value(self, k: int) -> Fraction:
        if k < 1:
            raise OutOfRange(f"damping index {k} out of range")
        return Fraction(1, self.base ** k)

    def sqrt_value(self, k: int) -> Fraction:
        root = 2 if self.base == 4 else 4
        return Fraction(1, root ** k)


# ---------------------------------------------------------------------------
# The operator
# ---------------------------------------------------------------------------

class FeedbackShiftOperator:
    """Backward shift with damped feedback columns at the anchors.

    Columns and auxiliary vectors are built in dependency order; auxiliary
    vectors are cached densely on a small prefix and recomputed on demand
    beyond it (the recursion u_j = T^(r_k - j) u_{r_k} is cheap per query).
    """

    U_CACHE_LIMIT = 512

    def __init__(self, schedule: FeedbackSchedule, eps: EpsSchedule,
                 sqrt_bits: int = 64):
        self.schedule = schedule
        self.eps = eps
        self.sqrt_bits = sqrt_bits
        self.field = SquareRootField()
        self._one = self.field.one
        self.r = schedule.r
        self._anchor_cols: dict[int, FinVec] = {}
        self._u_cache: dict[int, FinVec] = {}
        self.norm_cache: dict[int, tuple[AlgebraicReal, Interval]] = {}
        self.operator = ColumnFiniteOperator(
            f"T[K={schedule.K},eps={eps.name}]",
            self._column,
            band=(None, -1),
            provenance=(f"anchors r={schedule.r!r}",),
        )
        for k in range(1, schedule.K + 1):
            self._anchor_cols[self.r[k]] = self._build_anchor(k)

    # -- columns -----------------------------------------------------------
    def _column(self, j: int) -> FinVec:
        if j == 0:
            return FinVec.zero()
        if j > self.r[-1]:
            raise OutOfRange(
                f"column {j} beyond built range [0, {self.r[-1]}]; extend K"
            )
        col = self._anchor_cols.get(j)
        if col is not None:
            return col
        return FinVec.unit(j - 1, self._one)

    def _build_anchor(self, k: int) -> FinVec:
        hk = self.schedule.h[k]
        if hk != 0 and not (hk <= k - 1 and (k == 1 or hk < self.r[k - 1])):
            raise DependencyViolation(
                f"anchor {k} recycles u_{hk}, which is not built yet"
            )
        u = self.u_vector(hk)
        norm, _ = self.u_norm(hk)
        eps_k = self.field.rational(self.eps.value(k))
        scale = self.field.rational(self.eps.sqrt_value(k)) / norm
        return FinVec({self.r[k] - 1: eps_k}).add(u.scale(scale))

    # -- auxiliary vectors ----------------------------------------------------
    def u_vector(self, j: int) -> FinVec:
        """u_j: u_0 = e_0, u_{r_k} = e_{r_k} / (eps_1 ... eps_k), and
        u_j = T^(r_k - j) u_{r_k} inside block k."""
        if j < 0:
            return FinVec.zero()
        if j == 0:
            return FinVec.unit(0, self._one)
        cached = self._u_cache.get(j)
        if cached is not None:
            return cached
        if j > self.r[-1]:
            raise OutOfRange(f"u_{j} beyond built range [0, {self.r[-1]}]")
        k = self.schedule.block_of(j)
        if self.r[k] == j:
            prod = Fraction(1)
            for i in range(1, k + 1):
                prod *= self.eps.value(i)
            vec = FinVec.unit(j, self.field.rational(1 / prod))
        else:
            # inside block k+1: descend from the anchor above
            top = self.r[k + 1]
            vec = self.u_vector(top)
            for step in range(top - j):
                vec = self.operator.apply(vec)
                idx = top - 1 - step
                if idx <= self.U_CACHE_LIMIT and idx not in self._u_cache:
                    self._u_cache[idx] = vec
        if j <= self.U_CACHE_LIMIT:
            self._u_cache[j] = vec
        return vec

    def u_norm(self, j: int) -> tuple[AlgebraicReal, Interval]:
        """Exact norm of u_j plus its certified enclosure at sqrt_bits."""
        cached = self.norm_cache.get(j)
        if cached is not None:
            return cached
        u = self.u_vector(j)
        nsq = u.norm_sq()
        if isinstance(nsq, int):
            raise DependencyViolation(f"u_{j} is zero; construction broken")
        norm = self.field.sqrt(nsq)
        entry = (norm, norm.enclosure(self.sqrt_bits))
        self.norm_cache[j] = entry
        return entry

    # -- descent weights ----------------------------------------------------------
    def descent_weight(self, j: int) -> Fraction:
        """Weight picked up moving one step down from e_j: 1 off the anchors,
        eps_k at the anchor r_k."""
        if j < 1 or j > self.r[-1]:
            raise OutOfRange(f"descent weight asked outside [1, {self.r[-1]}]")
        k = self.schedule.anchor_step(j)
        return Fraction(1) if k is None else self.eps.value(k)


def build_operator(schedule: FeedbackSchedule, eps: EpsSchedule,
                   sqrt_bits: int = 64) -> FeedbackShiftOperator:
    return FeedbackShiftOperator(schedule, eps, sqrt_bits)


# ---------------------------------------------------------------------------
# Commutant polynomials
# ---------------------------------------------------------------------------

@dataclass
class CommutantElement:
    """A = sum_i c_i T^i with finitely supported rational coefficients."""

    coeffs: list[Fraction]
    operator: ColumnFiniteOperator
    source: FeedbackShiftOperator
    j0: Optional[int]
    commutation: DefectReport

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_json(self) -> dict:
        return {
            "coeffs": [str(c) for c in self.coeffs],
            "j0": self.j0,
            "commutation": self.commutation.to_json(),
        }


def polynomial_element(t: FeedbackShiftOperator, coeffs,
                       depth: int = 200) -> CommutantElement:
    """Build A = sum c_i T^i and certify commutation with T on a prefix.

    The defect is exactly zero: the scalars are exact, so the two
    evaluation orders of (AT - TA)e_n cancel bit-for-bit.
    """
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise ZeroCoefficients("all commutant coefficients vanish")
    j0 = next((i for i, c in enumerate(cs) if i >= 1 and c != 0), None)

    powers = [ColumnFiniteOperator.identity(t.field.one)]
    for _ in range(len(cs) - 1):
        powers.append(compose(t.operator, powers[-1]))
    name = "A[c=" + ",".join(str(c) for c in cs) + "]"
    a = linear_combine([t.field.rational(c) for c in cs], powers, name=name)

    cap = min(depth, t.r[-1])
    defect = commutation_defect(a, t.operator, cap)
    return CommutantElement(cs, a, t, j0, defect)


# ---------------------------------------------------------------------------
# Expansion check against the descent-weight formula
# ---------------------------------------------------------------------------

@dataclass
class ExpansionReport:
    j: int
    block: int
    residual_support: list[int]
    strict_bound_held: bool      # support(v) within {0..block-1}
    checked_coords: int
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "block": self.block,
            "residual_support": self.residual_support,
            "strict_bound_held": self.strict_bound_held,
            "checked_coords": self.checked_coords,
            "exact": self.exact,
        }


def expansion_check(elem: CommutantElement, j: int) -> ExpansionReport:
    """Compare A e_j with c_0 e_j + sum_i c_i (product of descent weights) e_{j-i}.

    The two must agree exactly on every coordinate >= k (the block index of
    j); the residual v lives in span{e_0, ..., e_{k-1}}.  A certified
    disagreement raises ExpansionMismatch.
    """
    t = elem.source
    k = t.schedule.block_of(j)
    direct = elem.operator.column(j)

    main_entries: dict[int, AlgebraicReal] = {}
    cs = elem.coeffs
    if cs[0] != 0:
        main_entries[j] = t.field.rational(cs[0])
    weight = Fraction(1)
    for i in range(1, min(j, elem.degree()) + 1):
        weight *= t.descent_weight(j - i + 1)
        if i < len(cs) and cs[i] != 0:
            coeff = cs[i] * weight
            prev = main_entries.get(j - i)
            val = t.field.rational(coeff)
            main_entries[j - i] = prev + val if prev is not None else val
    main = FinVec(main_entries)

    residual = direct.sub(main)
    for idx, _ in residual.items():
        if idx >= k:
            raise ExpansionMismatch(idx, f"residual escapes span{{e_0..e_{k - 1}}}")
    return ExpansionReport(
        j=j,
        block=k,
        residual_support=residual.support(),
        strict_bound_held=all(idx <= k - 1 for idx in residual.support()),
        checked_coords=len(direct.support()) + len(main.support()),
    )


# ---------------------------------------------------------------------------
# Non-compactness witness table
# ---------------------------------------------------------------------------

@dataclass
class WitnessEntry:
    n: int
    k: int
    infimum: Fraction          # certified lower bound on the squared distance
    plain_sum: Fraction        # exact sum of |c_i|^2 over the plain region
    bound: Fraction            # |c_{j0}|^2
    ok: bool

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "infimum": str(self.infimum),
                "plain_sum": str(self.plain_sum), "bound": str(self.bound),
                "ok": self.ok}


@dataclass
class WitnessTable:
    j0: int
    k0: int
    k_max: int
    bound: Fraction
    entries: list[WitnessEntry]

    def all_ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict:
        return {
            "j0": self.j0,
            "k0": self.k0,
            "k_max": self.k_max,
            "bound": str(self.bound),
            "all_ok": self.all_ok(),
            "pairs": [e.to_json() for e in self.entries],
        }


def _certified_lower(value: AlgebraicReal, bound: Fraction,
                     bits: int) -> tuple[Fraction, bool]:
    """Certified rational lower bound of value, refined until it clears bound."""
    work = bits
    while True:
        lo = value.enclosure(work).lo
        if lo >= bound:
            return lo, True
        if value.enclosure(work).hi < bound:
            return lo, False
        if work > value.ctx.max_sign_bits:
            return lo, (value - value.ctx.rational(bound)).sign() >= 0
        work *= 2


def noncompactness_witness(elem: CommutantElement, k_max: int | None = None,
                           k0: int | None = None) -> WitnessTable:
    """Pairwise certified separation of the images of the pre-anchor basis.

    For k0 <= n < k <= k_max the squared distance ||A e_{r_k - 1} - A e_{r_n - 1}||^2
    is computed exactly; its certified infimum must be at least |c_{j0}|^2.
    The plain-region coordinates are additionally checked to be exactly
    c_0, ..., c_{r_k - r_{k-1} - 1}, confirming the expansion used by the
    separation argument.
    """
    t = elem.source
    if elem.j0 is None:
        raise ValueError(
            "separation witness needs a coefficient c_j != 0 with j >= 1; "
            "a pure multiple of the identity is excluded"
        )
    K = t.schedule.K
    k_max = K if k_max is None else k_max
    if not (1 <= k_max <= K):
        raise OutOfRange(f"k_max must lie in [1, {K}]")
    if k0 is None:
        k0 = next(
            (k for k in range(1, k_max + 1)
             if elem.j0 <= t.r[k] - t.r[k - 1] - 1),
            None,
        )
        if k0 is None:
            raise OutOfRange("no block wide enough for j0 within k_max")
    bound = elem.coeffs[elem.j0] ** 2

    images = {k: elem.operator.column(t.r[k] - 1) for k in range(k0, k_max + 1)}
    entries = []
    for n in range(k0, k_max + 1):
        for k in range(n + 1, k_max + 1):
            diff = images[k].sub(images[n])
            # plain region carries exactly c_0 .. c_{gap-1}, in descending order
            gap = t.r[k] - t.r[k - 1]
            plain_sum = Fraction(0)
            for i in range(gap):
                idx = t.r[k] - 1 - i
                want = elem.coeffs[i] if i < len(elem.coeffs) else Fraction(0)
                got = diff.get(idx)
                if not (t.field.coerce(got) == t.field.rational(want)):
                    raise WitnessBelowBound(
                        f"plain-region coordinate {idx} of pair ({n},{k}) is not c_{i}"
                    )
                plain_sum += want * want
            nsq = diff.norm_sq()
            value = t.field.coerce(nsq)
            infimum, ok = _certified_lower(value, bound, t.sqrt_bits)
            if not ok or plain_sum < bound:
                raise WitnessBelowBound(
                    f"certified separation below |c_j0|^2 for pair ({n},{k})"
                )
            entries.append(WitnessEntry(n, k, infimum, plain_sum, bound, ok))
    return WitnessTable(elem.j0, k0, k_max, bound, entries)


# ---------------------------------------------------------------------------
# Compression norms
# ---------------------------------------------------------------------------

@dataclass
class CompressionReport:
    size: int
    iterations: int
    estimate: float            # float Rayleigh estimate (lower-bound evidence)
    residual: float
    schur_upper: Fraction      # certified upper bound for the compression
    note: str

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "iterations": self.iterations,
            "estimate": self.estimate,
            "estimate_is_float": True,
            "residual": self.residual,
            "schur_upper": str(self.schur_upper),
            "note": self.note,
        }


def _entry_float(c) -> float:
    if isinstance(c, (int, Fraction)):
        return float(c)
    if isinstance(c, AlgebraicReal):
        return float(c)
    if hasattr(c, "im") and c.im == 0:
        return float(c.re)
    raise ValueError("compression estimates support real entries only")


def _entry_abs_upper(c, bits: int) -> Fraction:
    if isinstance(c, (int, Fraction)):
        return abs(Fraction(c))
    if isinstance(c, AlgebraicReal):
        e = c.enclosure(bits)
        return max(abs(e.lo), abs(e.hi))
    return sqrt_upper(c.mag_sq(), bits)


def compression_norm(t: ColumnFiniteOperator, size: int,
                     iterations: int = 200, bits: int = 64) -> CompressionReport:
    """Largest singular value of the size x size compression.

    The float estimate comes from deterministic power iteration (Rayleigh
    quotient, hence never above the true compression norm); the certified
    Schur bound sqrt(max row sum * max column sum) is an upper bound for the
    compression only.  Compression norms lower-bound the operator norm; no
    full-operator upper bound is claimed.
    """
    import numpy as np
    from scipy import sparse

    rows_idx, cols_idx, vals = [], [], []
    col_sums: dict[int, Fraction] = {}
    row_sums: dict[int, Fraction] = {}
    for n in range(size):
        for m, c in t.column(n).items():
            if m >= size:
                continue
            rows_idx.append(m)
            cols_idx.append(n)
            vals.append(_entry_float(c))
            ub = _entry_abs_upper(c, bits)
            col_sums[n] = col_sums.get(n, Fraction(0)) + ub
            row_sums[m] = row_sums.get(m, Fraction(0)) + ub

    note = ("compression norm is a lower bound for the operator norm; "
            "schur_upper bounds the compression only")
    if not vals:
        return CompressionReport(size, 0, 0.0, 0.0, Fraction(0), note)

    a = sparse.csr_matrix(
        (np.array(vals), (np.array(rows_idx), np.array(cols_idx))),
        shape=(size, size),
    )
    x = np.full(size, 1.0 / size ** 0.5)
    estimate = 0.0
    residual = 0.0
    for _ in range(iterations):
        y = a @ x
        z = a.T @ y
        lam = float(x @ z)
        new_est = lam ** 0.5 if lam > 0 else 0.0
        residual = abs(new_est - estimate)
        estimate = new_est
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            estimate = 0.0
            break
        x = z / nz

    max_row = max(row_sums.values())
    max_col = max(col_sums.values())
    schur = sqrt_upper(max_row * max_col, bits)
    return CompressionReport(size, iterations, estimate, residual, schur, note)

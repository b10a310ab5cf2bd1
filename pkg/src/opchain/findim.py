"""Exact finite-dimensional matrix lab over Gaussian rationals.

Realizes the eigenvalue-based rank-one and rank-two commutants, similarity
and quasi-similarity transport of chains, reducing-pair checks, and the
discretized half-interval convolution chain.  Every assertion here is
bit-exact; eigenvalues are supplied or planted by exact conjugation, never
hunted numerically.
"""

from __future__ import annotations

import random
import re as _re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DoesNotCommute,
    IntertwiningFails,
    NotAnEigenvalue,
    NotIdempotent,
    OddDimension,
    RealEigenvalue,
    ScalarProjection,
    SingularIntertwiner,
    SingularR,
    ZeroTransport,
)
from .scalars import GaussianRational, parse_gaussian

Q = GaussianRational


class Matrix:
    """Square matrix with exact Gaussian-rational entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows: list[list]):
        self.n = len(rows)
        if any(len(r) != self.n for r in rows):
            raise ValueError("matrix must be square")
        self.rows = [[Q.of(x) for x in r] for r in rows]

    # -- constructors ----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int) -> "Matrix":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def diagonal(cls, entries: list) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def subdiagonal_shift(cls, n: int) -> "Matrix":
        """S e_i = e_{i+1}: ones directly below the diagonal."""
        return cls([[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def outer(cls, y: list, f: list) -> "Matrix":
        """y f^T without conjugation: entry (i, j) = y_i * f_j."""
        n = len(y)
        y = [Q.of(v) for v in y]
        f = [Q.of(v) for v in f]
        return cls([[y[i] * f[j] for j in range(n)] for i in range(n)])

    # -- ring operations ----------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a + b for a, b in zip(ra, rb)]
                       for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix([[a - b for a, b in zip(ra, rb)]
                       for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return Matrix([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Matrix":
        c = Q.of(c)
        return Matrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        n = self.n
        out = [[Q(0)] * n for _ in range(n)]
        for i in range(n):
            ri = self.rows[i]
            for k in range(n):
                a = ri[k]
                if a.is_zero():
                    continue
                rk = other.rows[k]
                oi = out[i]
                for j in range(n):
                    b = rk[j]
                    if not b.is_zero():
                        oi[j] = oi[j] + a * b
        return Matrix(out)

    def apply(self, v: list) -> list:
        return [sum((self.rows[i][j] * Q.of(v[j]) for j in range(self.n)), Q(0))
                for i in range(self.n)]

    def transpose(self) -> "Matrix":
        return Matrix([[self.rows[j][i] for j in range(self.n)] for i in range(self.n)])

    def conj_transpose(self) -> "Matrix":
        return Matrix([[self.rows[j][i].conj() for j in range(self.n)]
                       for i in range(self.n)])

    def conj(self) -> "Matrix":
        return Matrix([[a.conj() for a in r] for r in self.rows])

    # -- predicates -------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.n == other.n and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_real(self) -> bool:
        return all(a.is_real() for r in self.rows for a in r)

    def is_scalar(self) -> bool:
        d = self.rows[0][0]
        for i in range(self.n):
            for j in range(self.n):
                want_zero = i != j
                if want_zero and not self.rows[i][j].is_zero():
                    return False
                if not want_zero and not (self.rows[i][j] == d):
                    return False
        return True

    def commutes_with(self, other: "Matrix") -> bool:
        return (self @ other) == (other @ self)

    # -- elimination ---------------------------------------------------------------
    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and the pivot column list."""
        m = [row[:] for row in self.rows]
        n = self.n
        pivots = []
        r = 0
        for c in range(n):
            pivot = None
            for i in range(r, n):
                if not m[i][c].is_zero():
                    pivot = i
                    break
            if pivot is None:
                continue
            m[r], m[pivot] = m[pivot], m[r]
            inv = m[r][c]
            m[r] = [x / inv for x in m[r]]
            for i in range(n):
                if i != r and not m[i][c].is_zero():
                    factor = m[i][c]
                    m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == n:
                break
        return Matrix(m), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[list]:
        """Exact basis of the nullspace (list of coordinate vectors)."""
        red, pivots = self.rref()
        free = [c for c in range(self.n) if c not in pivots]
        basis = []
        for fc in free:
            v = [Q(0)] * self.n
            v[fc] = Q(1)
            for r, pc in enumerate(pivots):
                v[pc] = -red.rows[r][fc]
            basis.append(v)
        return basis

    def column_space_basis(self) -> list[list]:
        red, pivots = self.rref()
        return [[self.rows[i][c] for i in range(self.n)] for c in pivots]

    def det(self) -> GaussianRational:
        m = [row[:] for row in self.rows]
        n = self.n
        det = Q(1)
        for c in range(n):
            pivot = None
            for i in range(c, n):
                if not m[i][c].is_zero():
                    pivot = i
                    break
            if pivot is None:
                return Q(0)
            if pivot != c:
                m[c], m[pivot] = m[pivot], m[c]
                det = -det
            det = det * m[c][c]
            inv = m[c][c]
            for i in range(c + 1, n):
                if not m[i][c].is_zero():
                    factor = m[i][c] / inv
                    m[i] = [a - factor * b for a, b in zip(m[i], m[c])]
        return det

    def inverse(self) -> "Matrix":
        n = self.n
        m = [row[:] + Matrix.identity(n).rows[i] for i, row in enumerate(self.rows)]
        r = 0
        for c in range(n):
            pivot = None
            for i in range(r, n):
                if not m[i][c].is_zero():
                    pivot = i
                    break
            if pivot is None:
                raise ZeroDivisionError("matrix is singular")
            m[r], m[pivot] = m[pivot], m[r]
            inv = m[r][c]
            m[r] = [x / inv for x in m[r]]
            for i in range(n):
                if i != r and not m[i][c].is_zero():
                    factor = m[i][c]
                    m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
            r += 1
        if r < n:
            raise ZeroDivisionError("matrix is singular")
        return Matrix([row[n:] for row in m])

    # -- serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "rows": [[str(a) for a in r] for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "Matrix":
        return cls([[parse_gaussian(s) for s in row] for row in data["rows"]])

    def __repr__(self):
        body = "; ".join(", ".join(str(a) for a in r) for r in self.rows)
        return f"Matrix[{body}]"


# ---------------------------------------------------------------------------
# Eigenvalue-based finite-rank commutants
# ---------------------------------------------------------------------------

def eigen_rank_one(k: Matrix, lam) -> Matrix:
    """Rank-one F with K F = F K, from a common eigenvalue of K and K*.

    F = y f^T where y spans ker(lam I - K) and f is the conjugate of a
    kernel vector of (conj(lam) I - K*); both kernels are computed by
    exact elimination.
    """
    lam = Q.of(lam)
    ident = Matrix.identity(k.n)
    ker_right = (ident.scale(lam) - k).kernel_basis()
    if not ker_right:
        raise NotAnEigenvalue(f"{lam} is not an eigenvalue of the matrix")
    ker_left = (ident.scale(lam.conj()) - k.conj_transpose()).kernel_basis()
    if not ker_left:
        raise NotAnEigenvalue(f"{lam} is not an eigenvalue of the adjoint")
    y = ker_right[0]
    f = [c.conj() for c in ker_left[0]]
    out = Matrix.outer(y, f)
    if not out.commutes_with(k):
        raise AssertionError("eigen rank-one construction failed to commute")
    if out.rank() != 1:
        raise AssertionError("eigen rank-one construction has wrong rank")
    return out


def real_rank_two(k: Matrix, lam) -> Matrix:
    """Real rank-<=2 commutant of a real matrix from a non-real eigenvalue.

    Works in the complexification: F2 = x f^T + conj(x) conj(f)^T is real,
    commutes with K exactly, and has rank at most 2.
    """
    lam = Q.of(lam)
    if lam.is_real():
        raise RealEigenvalue("real eigenvalue: use eigen_rank_one instead")
    if not k.is_real():
        raise ValueError("real_rank_two expects a real matrix")
    ident = Matrix.identity(k.n)
    ker_right = (ident.scale(lam) - k).kernel_basis()
    if not ker_right:
        raise NotAnEigenvalue(f"{lam} is not an eigenvalue of the complexification")
    ker_left = (ident.scale(lam.conj()) - k.conj_transpose()).kernel_basis()
    if not ker_left:
        raise NotAnEigenvalue(f"{lam} is not an eigenvalue of the adjoint")
    x = ker_right[0]
    f = [c.conj() for c in ker_left[0]]
    part = Matrix.outer(x, f)
    out = part + part.conj()
    if not out.is_real():
        raise AssertionError("rank-two combination is not real")
    if not out.commutes_with(k):
        raise AssertionError("rank-two construction failed to commute")
    if out.rank() > 2:
        raise AssertionError("rank-two construction has rank > 2")
    return out


# ---------------------------------------------------------------------------
# Chains of matrices
# ---------------------------------------------------------------------------

@dataclass
class FinChainReport:
    """Finite-dimensional chain with exact edge and witness records."""

    matrices: list[Matrix]
    labels: list[str]
    edge_zero: list[bool]
    nonscalar: list[bool]
    tail_rank: int
    notes: list[str] = field(default_factory=list)

    def all_edges_zero(self) -> bool:
        return all(self.edge_zero)

    def to_json(self) -> dict:
        return {
            "labels": self.labels,
            "dimension": self.matrices[0].n if self.matrices else 0,
            "edge_defect_zero": self.edge_zero,
            "interior_nonscalar": self.nonscalar,
            "tail_rank": self.tail_rank,
            "notes": self.notes,
        }


def build_fin_chain(matrices: list[Matrix], labels: list[str],
                    notes: list[str] | None = None) -> FinChainReport:
    edge_zero = [
        ((a @ b) - (b @ a)).is_zero() for a, b in zip(matrices, matrices[1:])
    ]
    nonscalar = [not m.is_scalar() for m in matrices[1:-1]]
    return FinChainReport(matrices, labels, edge_zero, nonscalar,
                          matrices[-1].rank(), notes or [])


def conjugate_chain(chain: FinChainReport, r: Matrix) -> FinChainReport:
    """Map every element S -> R^-1 S R and re-verify everything exactly."""
    if r.det().is_zero():
        raise SingularR("conjugating matrix has determinant 0")
    r_inv = r.inverse()
    mapped = [r_inv @ m @ r for m in chain.matrices]
    out = build_fin_chain(mapped, [f"R^-1({lbl})R" for lbl in chain.labels],
                          list(chain.notes))
    if out.tail_rank != chain.tail_rank:
        raise AssertionError("conjugation changed the tail rank")
    return out


def quasi_transport(k1: Matrix, t1: Matrix, t2: Matrix,
                    a: Matrix, b: Matrix) -> Matrix:
    """Transport K1 in {T1}' to K2 = B K1 A in {T2}' along intertwiners.

    Requires T1 A = A T2 and B T1 = T2 B exactly, with A and B invertible
    (the finite-dimensional form of injective with dense range).
    """
    if a.det().is_zero() or b.det().is_zero():
        raise SingularIntertwiner("intertwiners must be invertible in finite dimension")
    if not ((t1 @ a) == (a @ t2) and (b @ t1) == (t2 @ b)):
        raise IntertwiningFails("T1 A = A T2 and B T1 = T2 B must hold exactly")
    if k1.is_zero():
        raise ValueError("K1 must be nonzero")
    if not k1.commutes_with(t1):
        raise DoesNotCommute("K1 does not commute with T1")
    k2 = b @ k1 @ a
    if not k2.commutes_with(t2):
        raise AssertionError("transported element fails to commute with T2")
    if k2.is_zero():
        raise ZeroTransport("B K1 A = 0 despite invertible A and B")
    return k2


# ---------------------------------------------------------------------------
# Discretized half-interval convolution
# ---------------------------------------------------------------------------

def volterra_chain(n: int) -> FinChainReport:
    """Chain [K, M, F] for the discretized cumulative-sum / half-shift pair.

    K = (1/n) * sum_{d=1}^{n-1} S^d is the left-rectangle discretization of
    integration; M = (1/n) * sum_{d=n/2}^{n-1} S^d discretizes convolution
    with the indicator of the upper half interval.  Both are polynomials in
    the subdiagonal shift S, so K M = M K exactly, and M^2 = 0 because the
    band of M^2 starts at offset n (outside an n x n matrix).
    """
    if n % 2 != 0 or n < 4:
        raise OddDimension("dimension must be even and at least 4")
    inv_n = Fraction(1, n)
    k = Matrix([[inv_n if i > j else 0 for j in range(n)] for i in range(n)])
    m = Matrix([[inv_n if i - j >= n // 2 else 0 for j in range(n)] for i in range(n)])

    if not (m @ m).is_zero():
        raise AssertionError("half-shift convolution square is not zero")
    if not k.commutes_with(m):
        raise AssertionError("polynomials in the shift failed to commute")

    # y = last basis vector lies in ker M; f = first coordinate functional
    # annihilates range M (strict band of M starts at offset n/2)
    y = [Q(0)] * n
    y[n - 1] = Q(1)
    f = [Q(0)] * n
    f[0] = Q(1)
    tail = Matrix.outer(y, f)
    chain = build_fin_chain(
        [k, m, tail],
        ["K", "M", f"e0*⊗e{n - 1}"],
        notes=[
            "M^2 = 0 exactly; nilpotency index 2",
            "K and M are polynomials in the subdiagonal shift",
        ],
    )
    return chain


# ---------------------------------------------------------------------------
# Reducing projections
# ---------------------------------------------------------------------------

def reducing_check(t: Matrix, p: Matrix) -> dict:
    """Verify P is a non-scalar idempotent commuting with T.

    On success returns the reducing pair as exact bases of range(P) and
    range(I - P).
    """
    if not ((p @ p) == p):
        raise NotIdempotent("P^2 != P")
    if p.is_zero() or p == Matrix.identity(p.n):
        raise ScalarProjection("P is 0 or I")
    if not t.commutes_with(p):
        raise DoesNotCommute("T P != P T")
    complement = Matrix.identity(p.n) - p
    v_basis = p.column_space_basis()
    w_basis = complement.column_space_basis()
    if len(v_basis) + len(w_basis) != p.n:
        raise AssertionError("ranges of P and I-P do not decompose the space")
    return {
        "idempotent": True,
        "nonscalar": True,
        "commutes": True,
        "V_basis": [[str(c) for c in v] for v in v_basis],
        "W_basis": [[str(c) for c in v] for v in w_basis],
    }


# ---------------------------------------------------------------------------
# Seeded trial batches (planted spectra; no numerical eigenhunting)
# ---------------------------------------------------------------------------

def _random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-4, 4), rng.randint(1, 4))


def random_invertible(rng: random.Random, n: int) -> Matrix:
    """Unit lower times unit upper triangular: determinant 1 by construction."""
    lower = Matrix([[1 if i == j else (_random_fraction(rng) if i > j else 0)
                     for j in range(n)] for i in range(n)])
    upper = Matrix([[1 if i == j else (_random_fraction(rng) if i < j else 0)
                     for j in range(n)] for i in range(n)])
    return lower @ upper


def eigen_rank_one_trial(rng: random.Random) -> dict:
    n = rng.randint(2, 5)
    values = [Fraction(rng.randint(-6, 6)) for _ in range(n)]
    lam = rng.choice(values)
    r = random_invertible(rng, n)
    k = r @ Matrix.diagonal(values) @ r.inverse()
    f = eigen_rank_one(k, lam)
    return {"n": n, "lambda": str(Q.of(lam)), "rank": f.rank(),
            "commutes": f.commutes_with(k)}


def real_rank_two_trial(rng: random.Random) -> dict:
    # plant a rotation-like block [[a, -b], [b, a]] with eigenvalues a ± bi
    a = Fraction(rng.randint(-3, 3))
    b = Fraction(rng.randint(1, 3))
    extra = rng.randint(0, 2)
    n = 2 + extra
    block = [[a, -b] + [0] * extra, [b, a] + [0] * extra]
    for i in range(extra):
        row = [0] * n
        row[2 + i] = Fraction(rng.randint(-5, 5))
        block.append(row)
    r = random_invertible(rng, n)
    k = r @ Matrix(block) @ r.inverse()
    lam = Q(a, b)
    f2 = real_rank_two(k, lam)
    return {"n": n, "lambda": str(lam), "rank": f2.rank(),
            "real": f2.is_real(), "commutes": f2.commutes_with(k)}


def quasi_transport_trial(rng: random.Random) -> dict:
    n = rng.randint(2, 4)
    t1 = Matrix([[_random_fraction(rng) for _ in range(n)] for _ in range(n)])
    # commuting nonzero K1: a polynomial in T1
    k1 = t1 @ t1 + t1.scale(Fraction(rng.randint(1, 3)))
    if k1.is_zero():
        k1 = Matrix.identity(n)
    r = random_invertible(rng, n)
    t2 = r.inverse() @ t1 @ r
    k2 = quasi_transport(k1, t1, t2, r, r.inverse())
    return {"n": n, "nonzero": not k2.is_zero(),
            "commutes": k2.commutes_with(t2)}


def conjugate_chain_trial(rng: random.Random) -> dict:
    n = rng.choice([4, 6])
    chain = volterra_chain(n)
    r = random_invertible(rng, n)
    mapped = conjugate_chain(chain, r)
    return {"n": n, "edges_zero": mapped.all_edges_zero(),
            "tail_rank": mapped.tail_rank}


TRIALS = {
    "eigen-rank-one": eigen_rank_one_trial,
    "real-rank-two": real_rank_two_trial,
    "quasi": quasi_transport_trial,
    "conjugate": conjugate_chain_trial,
}


def run_trials(kind: str, seed: int, trials: int) -> dict:
    rng = random.Random(seed)
    fn = TRIALS[kind]
    results = [fn(rng) for _ in range(trials)]
    ok = all(
        all(v is not False for v in r.values()) and r.get("commutes", True)
        for r in results
    )
    return {"kind": kind, "seed": seed, "trials": trials, "all_passed": ok,
            "sample": results[:3]}

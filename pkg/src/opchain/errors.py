"""Exception types shared across the library.

Every failure a verifier can certify has its own class so callers (and the
CLI exit-code mapping) can distinguish "assertion certifiably failed" from
"could not decide".
"""


class OpChainError(Exception):
    """Base class for all library errors."""


class UnboundedRow(OpChainError):
    """A row of an operator cannot be certified finite from available metadata."""


class ZeroFactor(OpChainError):
    """A rank-one factor (functional or vector) is zero."""


class BudgetExhausted(OpChainError):
    """Orbit membership undecided within the exploration budget."""

    def __init__(self, index: int):
        super().__init__(f"membership of index {index} undecided within budget")
        self.index = index


class NotInKernel(OpChainError):
    """Candidate kernel vector has a nonzero image."""


class RangeNotAnnihilated(OpChainError):
    """The functional fails to annihilate a column of the operator."""

    def __init__(self, index: int):
        super().__init__(f"functional does not annihilate column {index}")
        self.index = index


class ScalarIntermediate(OpChainError):
    """An interior chain operator turned out to be a scalar multiple of I."""


class UnsatisfiableStep(OpChainError):
    """No queued congruence triple can be served at this schedule step."""


class DependencyViolation(OpChainError):
    """Internal construction-order invariant broken (always a bug)."""


class OutOfRange(OpChainError):
    """Index outside the built range of a finitely constructed operator."""


class ZeroCoefficients(OpChainError):
    """Commutant polynomial given an all-zero coefficient list."""


class ExpansionMismatch(OpChainError):
    """Certified disagreement between direct and formula expansion."""

    def __init__(self, coordinate: int, detail: str = ""):
        msg = f"expansion mismatch at coordinate {coordinate}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.coordinate = coordinate


class WitnessBelowBound(OpChainError):
    """Certified separation fell below the required lower bound (a bug)."""


class NotAnEigenvalue(OpChainError):
    """Requested eigenvalue has a trivial kernel on one of the two sides."""


class RealEigenvalue(OpChainError):
    """real_rank_two called with a real eigenvalue; use eigen_rank_one."""


class SingularR(OpChainError):
    """Conjugating matrix is not invertible."""


class SingularIntertwiner(OpChainError):
    """Quasi-similarity intertwiner A or B is singular (not injective/dense)."""


class IntertwiningFails(OpChainError):
    """The intertwining identities T1 A = A T2, B T1 = T2 B do not hold."""


class ZeroTransport(OpChainError):
    """Transported commutant element is zero (impossible for invertible A, B)."""


class OddDimension(OpChainError):
    """Discretized half-interval convolution needs an even dimension."""


class NotIdempotent(OpChainError):
    """P^2 != P."""


class ScalarProjection(OpChainError):
    """Idempotent is 0 or I, hence scalar."""


class DoesNotCommute(OpChainError):
    """A required commutation identity fails."""


class PrecisionExhausted(OpChainError):
    """Sign of an algebraic number unresolved at the maximum refinement depth."""

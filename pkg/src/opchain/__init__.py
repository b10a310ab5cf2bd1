"""Exact and certified verification of commuting chains of operators on c00."""

from .algebraic import AlgebraicReal, SquareRootField
from .chains import (
    IndexMap,
    OrbitSet,
    adjoint_chain,
    chain_for_weighted_shift,
    diag_projection,
    disjoint_spectra_example,
    kernel_rank_one,
    orbit_set,
    random_index_map,
    weighted_shift,
)
from .feedback import (
    CommutantElement,
    EpsSchedule,
    FairnessParams,
    FeedbackSchedule,
    FeedbackShiftOperator,
    build_operator,
    compression_norm,
    expansion_check,
    generate_schedule,
    noncompactness_witness,
    polynomial_element,
)
from .findim import (
    FinChainReport,
    Matrix,
    build_fin_chain,
    conjugate_chain,
    eigen_rank_one,
    quasi_transport,
    real_rank_two,
    reducing_check,
    volterra_chain,
)
from .intervals import Interval
from .operators import (
    Chain,
    ColumnFiniteOperator,
    DefectReport,
    adjoint,
    commutation_defect,
    compose,
    linear_combine,
    rank_one,
    truncate,
    verify_chain,
)
from .scalars import GaussianRational
from .vectors import FinVec

__version__ = "0.1.0"

__all__ = [
    "AlgebraicReal",
    "SquareRootField",
    "IndexMap",
    "OrbitSet",
    "adjoint_chain",
    "chain_for_weighted_shift",
    "diag_projection",
    "disjoint_spectra_example",
    "kernel_rank_one",
    "orbit_set",
    "random_index_map",
    "weighted_shift",
    "CommutantElement",
    "EpsSchedule",
    "FairnessParams",
    "FeedbackSchedule",
    "FeedbackShiftOperator",
    "build_operator",
    "compression_norm",
    "expansion_check",
    "generate_schedule",
    "noncompactness_witness",
    "polynomial_element",
    "FinChainReport",
    "Matrix",
    "build_fin_chain",
    "conjugate_chain",
    "eigen_rank_one",
    "quasi_transport",
    "real_rank_two",
    "reducing_check",
    "volterra_chain",
    "Interval",
    "Chain",
    "ColumnFiniteOperator",
    "DefectReport",
    "adjoint",
    "commutation_defect",
    "compose",
    "linear_combine",
    "rank_one",
    "truncate",
    "verify_chain",
    "GaussianRational",
    "FinVec",
]

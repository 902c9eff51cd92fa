"""Mixed Poisson distributions generated by real-valued mixing laws."""

from .errors import (
    DomainError,
    InsufficientMassError,
    InvalidSpecError,
    MixPoissonError,
    NegativeProbabilityError,
    OracleOverflowError,
    UnsupportedFamilyError,
)
from .families import (
    AsymLaplace,
    ExtremeStable,
    GaussianMix,
    TailDescriptor,
    TwoPoint,
    laplace,
    sample_mixing,
    split,
    tail_descriptor,
    term_neg,
    term_pos,
)
from .oracle import OracleEstimate, mc_estimate, quad_estimate, term_quad
from .pmf import (
    PmfTable,
    RecursionState,
    cdf,
    pgf_coeffs,
    pgf_eval,
    pmf_closed,
    pmf_table,
    quantile,
    sample_count,
)
from .validity import (
    NecessityReport,
    ValidityReport,
    Verdict,
    check_family,
    check_necessary,
    check_sufficient_numeric,
)

__version__ = "0.1.0"

"""Exact efficiency analysis of reversible Markov chains on finite state spaces.

Computes asymptotic variances of path-average estimators by independent
exact routes, decides efficiency / entrywise / spectral dominance between
reversible kernels, certifies chains as non-dominated via trace
minimality, and verifies that component-wise improvements to mixtures and
random-scan Gibbs samplers improve the whole chain.
"""

from .chains import (
    Functional,
    StructureReport,
    TargetDistribution,
    TransitionMatrix,
    chain_period,
    detailed_balance_violation,
    iid_operator,
    is_irreducible,
    new_distribution,
    pi_mean,
    project_zero_mean,
    stationarity_violation,
    stationary_distribution,
    struct_tol,
    uniform,
    validate_structure,
    weighted_inner,
)
from .composition import (
    GibbsBlock,
    GibbsComponent,
    MixtureSpec,
    ProductSpec,
    block_gap_eigs,
    component_improvement_verdict,
    gibbs_component,
    mix,
    mixture_improvement_equivalence,
    random_scan_chain,
    replace_block,
)
from .dominance import (
    DominanceVerdict,
    Relation,
    TraceCertificate,
    covariance_order_holds,
    efficiency_dominates,
    eigen_dominates,
    find_witness,
    gap_spectrum,
    identical_spectrum_incomparable,
    is_antithetic,
    peskun_dominates,
    psd_order_inverse_flip,
    spectral_interval_dominates,
    strict_trace_check,
    trace_certificate,
    verdict_tolerance,
)
from .errors import (
    BadComponentIndex,
    BadMixingProbability,
    BadStartState,
    BadWeights,
    ChainError,
    ChainFileError,
    DimensionMismatch,
    InvalidDistribution,
    NoNegativeEigenvalue,
    NonPositiveWeight,
    NotIrreducible,
    NotIrreducibleMixture,
    NotReversible,
    NotReversibleForConditional,
    NotRowStochastic,
    NotStationary,
    NotStrictlyPositive,
    PeriodicChain,
    RouteRefusal,
    SingularSystem,
    StructureMismatch,
    TooFewStates,
)
from .sampling import McEstimate, mc_asym_var, simulate, walk_backend
from .spectral import SpectralDecomposition, spectral_decompose
from .variance import (
    AutocovSequence,
    VarianceResult,
    asym_var_autocov,
    asym_var_resolvent,
    asym_var_spectral,
    autocovariances,
    resolvent_operator,
)

__version__ = "0.1.0"

"""seqgap: a numerical laboratory for the gap between adaptive and
non-adaptive randomized approximation of summable sequences.

The package builds and certifies, at desk scale: an adversarial input
distribution on the l1 ball that defeats any non-adaptive measurement matrix,
the Gaussian-mixture posterior machinery that turns identification failure
into certified error lower bounds, the constructive column-shrinkage
certificates behind them, and an adaptive sparse-recovery algorithm whose
information cost grows only doubly-logarithmically in the ambient dimension.
"""

__version__ = "0.1.0"

from .constants import EPS0, C_POINTS, A_EXP, hard_instance_m_threshold, inflation_radius
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DomainError,
    InconsistentObservation,
    IndefiniteMatrix,
    Infeasible,
    InvalidDimensions,
    InvalidGeometry,
    NotConvergedWarning,
    NotSymmetric,
    ProtocolViolation,
    SeqgapError,
    UnsupportedGeometry,
)
from .gaussian_core import (
    Ellipsoid,
    ellipsoid_membership,
    ellipsoid_membership_many,
    psd_sqrt,
    sample_std_gaussian,
    tail_bound_check,
)
from .hard_instance import (
    HardInstanceSpec,
    HardSample,
    build_spec,
    draw_sample,
    estimate_truncation_delta,
    mu_average_error,
    separation_distances,
    spec_from_json,
    spec_to_json,
)
from .posterior import (
    CertificateResult,
    GaussianMixtureModel,
    PosteriorVector,
    bayes_mode_decoder,
    certificate_value,
    conditional_error_bound,
    conditioned_mixture,
    distinctness_probability,
    lower_bound_certificate,
    normalize_log_weights,
    posterior,
)
from .column_shrinkage import (
    ShrinkageTrace,
    exact_kn_law,
    inflated_count_probability,
    kn_law_check,
    measured_minimal_inflation,
    run_shrinkage,
    verify_column_in_rectangle,
    verify_rectangle_in_ellipsoid,
)
from .protocol import (
    CallbackAlgorithm,
    Finish,
    InformationSession,
    Mode,
    Query,
    SparseFunctional,
    open_session,
    run_algorithm,
)
from .recovery import (
    RecoveryConfig,
    adaptive_k_sparse_recover,
    adaptive_one_sparse,
    best_k_term_error,
    gaussian_linear_sketch,
    greedy_decode,
    l1_min_decode,
    make_algorithm,
    measurement_budget,
)
from .rng import make_rng, sample_subset, split
from .stats import Estimate, mean_ci, wilson

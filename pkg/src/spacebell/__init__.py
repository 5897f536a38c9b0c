"""Distance-dependent Bell-CHSH analysis: spin correlators, spatial overlap,
SPDC coincidence rates, local-hidden-variable decompositions and Monte Carlo
coincidence counting."""

from .coincidence import (
    BellEstimate,
    CountsTable,
    NoDataError,
    estimate_bell,
    joint_probabilities,
    rational_estimator,
    simulate_counts,
    unnormalized_estimator,
)
from .lhv import (
    DeterministicStrategy,
    LHVDecomposition,
    LHVModel,
    all_chsh_variants,
    enumerate_strategies,
    lhv_decompose,
    verify_model,
)
from .spatial import (
    DetectorRegion,
    GaussianPairState,
    OverlapMethod,
    OverlapResult,
    chsh_spin_space,
    correlation_spin_space,
    overlap_probability,
    spin_space_correlators,
)
from .spdc import (
    ConvergenceError,
    SPDCParams,
    SpdcEvaluation,
    asymptotic_constant,
    asymptotic_limit,
    beam_size_at,
    bell_value_space,
    coincidence_rate,
    spectral_width,
)
from .spin import (
    ChshSettings,
    Correlators,
    TwoQubitState,
    UnitVector3,
    chsh_value,
    correlation_spin,
    correlators_from_state,
    optimize_chsh,
    singlet_state,
    spin_observable,
)

__version__ = "0.1.0"

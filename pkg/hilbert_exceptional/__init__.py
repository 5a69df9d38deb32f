from .constants_and_enums import (
    DEFAULT_TOLERANCES,
    KernelNormalization,
    OscillationPhase,
    Tolerances,
)
from .constructions import (
    ClosedSetBlock,
    DivergenceWitness,
    ExceptionalSeed,
    StageRecord,
    lemma2_select,
    lemma2_verify,
    lemma3_step,
    lemma4_divergence_check,
    lemma4_phi,
    thm1_construct,
    thm1_witness,
    thm2_closed_set_assembly,
    thm2_construct,
    thm2_witness,
    trapezoid_approximant,
)
from .distribution import (
    DistributionReport,
    distribution_curve,
    level_set_measure,
    stein_weiss_rhs,
    superlevel_bound_check,
    superlevel_set_abs,
    verify_stein_weiss,
)
from .exceptions import (
    ConfigError,
    ConstructionError,
    ConvergenceError,
    EmptySetError,
    HilbertExceptionalError,
    InvalidIntervalError,
    SingularityError,
)
from .hilbert import (
    PiecewiseLinearFunction,
    hilbert_indicator,
    hilbert_indicator_many,
    hilbert_piecewise_linear,
    maximal_hilbert_indicator,
    quadrature_oracle,
    tail_integral,
    truncated_hilbert_indicator,
)
from .intervals import (
    FiniteOpenSet,
    Interval,
    WhitneyCell,
    WhitneyPartition,
    difference,
    intersection,
    measure,
    normalize,
    symm_diff_measure,
    union,
    verify_whitney,
    whitney_partition,
)
from .kk_polynomial import (
    ComplexTrigPolynomial,
    OscillatingIndicator,
    PeriodicPattern,
    fejer_polynomial,
    fourier_coefficients,
    kk_construct,
    kk_split,
    lipschitz_bound,
    mean_oscillation_check,
    modified_partial_sum,
    partial_sum,
    shrink_set,
)
from .level_set import (
    LevelBound,
    LevelSetConfig,
    approx_sublevel_for_open,
    bezout_polynomial,
    lambda_from_mu,
    mu_from_lambda,
    sublevel_set,
    sum_of_roots,
    superlevel_set,
    verify_bezout,
    verify_inclusion_open,
    verify_roundtrip,
)

__all__ = [
    "DEFAULT_TOLERANCES",
    "KernelNormalization",
    "OscillationPhase",
    "Tolerances",
    "ClosedSetBlock",
    "DivergenceWitness",
    "ExceptionalSeed",
    "StageRecord",
    "lemma2_select",
    "lemma2_verify",
    "lemma3_step",
    "lemma4_divergence_check",
    "lemma4_phi",
    "thm1_construct",
    "thm1_witness",
    "thm2_closed_set_assembly",
    "thm2_construct",
    "thm2_witness",
    "trapezoid_approximant",
    "DistributionReport",
    "distribution_curve",
    "level_set_measure",
    "stein_weiss_rhs",
    "superlevel_bound_check",
    "superlevel_set_abs",
    "verify_stein_weiss",
    "ConfigError",
    "ConstructionError",
    "ConvergenceError",
    "EmptySetError",
    "HilbertExceptionalError",
    "InvalidIntervalError",
    "SingularityError",
    "PiecewiseLinearFunction",
    "hilbert_indicator",
    "hilbert_indicator_many",
    "hilbert_piecewise_linear",
    "maximal_hilbert_indicator",
    "quadrature_oracle",
    "tail_integral",
    "truncated_hilbert_indicator",
    "FiniteOpenSet",
    "Interval",
    "WhitneyCell",
    "WhitneyPartition",
    "difference",
    "intersection",
    "measure",
    "normalize",
    "symm_diff_measure",
    "union",
    "verify_whitney",
    "whitney_partition",
    "ComplexTrigPolynomial",
    "OscillatingIndicator",
    "PeriodicPattern",
    "fejer_polynomial",
    "fourier_coefficients",
    "kk_construct",
    "kk_split",
    "lipschitz_bound",
    "mean_oscillation_check",
    "modified_partial_sum",
    "partial_sum",
    "shrink_set",
    "LevelBound",
    "LevelSetConfig",
    "approx_sublevel_for_open",
    "bezout_polynomial",
    "lambda_from_mu",
    "mu_from_lambda",
    "sublevel_set",
    "sum_of_roots",
    "superlevel_set",
    "verify_bezout",
    "verify_inclusion_open",
    "verify_roundtrip",
]

"""moranspec: exact spectral-structure toolkit for Cantor-Moran convolutions."""

from .bounds import (
    CompositeTail,
    ConstantTail,
    EventuallyZeroTail,
    GeometricTail,
    PSeriesTail,
    TailBound,
)
from .constructions import (
    consecutive_system,
    factorial_squared_schedule,
    intermediate_dimension_system,
    jorgensen_pedersen_system,
    log_ratio_scale,
    schedule_decay_quotient,
    section5_form_system,
    unbounded_square_system,
    unbounded_support_report,
)
from .convergence import (
    CONVERGES,
    DIVERGES,
    UNKNOWN,
    SeriesReport,
    TruncationStats,
    max_norm_report,
    nonnegative_existence_report,
    square_mean_report,
    three_series_report,
    truncate_measure,
    truncation_stats,
)
from .cyclotomic import OrderTooLargeError, cyclotomic_sparse, vanishing_root_sum
from .digitsets import (
    ConsecutiveDigits,
    ExplicitDigits,
    ShiftedConsecutiveDigits,
    mask_on_rational_grid,
    symmetric_rational_grid,
)
from .dimensions import (
    DimensionEstimate,
    StolzCesaroBounds,
    SupportPatchIndex,
    dimension_quotients,
    enumerate_patch_mass,
    group_mass_formula,
    patch_measure_formula,
    stolz_cesaro_bounds,
    support_partition,
)
from .hadamard import (
    HadamardTriple,
    NearlyConsecutiveReport,
    canonical_spectrum_digits,
    is_hadamard_triple,
    nearly_consecutive_report,
    triple_of_level,
    unitarity_defect,
)
from .measures import (
    AtomCollisionError,
    DiscreteMeasure,
    convolve,
    convolve_all,
    dirac,
    exact_fourier_zero,
    finite_level,
    fourier_transform,
    fourier_transform_grid,
    level_factors,
    uniform_measure,
)
from .spectra import (
    EquiPositivityCertificate,
    SpectrumLevel,
    equi_positivity_certificate,
    gram_matrix,
    mask_bound_margins,
    mask_lower_bound,
    scaled_tail_measure,
    seeded_frequencies,
    spectrum_level,
    tail_transform_bound_check,
    tail_transform_on_grid,
    verify_orthogonality,
    verify_parseval,
)
from .systems import (
    ExplicitAtomSequence,
    ExplicitRule,
    MoranSystem,
    RuleAtomSequence,
    system_from_document,
    system_to_document,
)

__version__ = "0.1.0"

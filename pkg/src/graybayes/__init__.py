"""Bayesian boundary and interior detection for gray-level images.

Per-pixel likelihoods and posteriors for window features under explicit
noise models, two-pixel gradient analysis with monotonicity checking, and
an exhaustive tiny-world enumerator for validating the closed forms.
"""

from .bayes import (
    DomainWeight,
    FeatureSet,
    LikelihoodSet,
    PriorVector,
    ProbabilityMap,
    combine_disjoint,
    posterior,
    posterior_map,
    probability_map_to_pgm_samples,
    save_probability_map_csv,
)
from .errors import ImpossibleObservationError, PgmFormatError, SingularNoiseMatrixError
from .gradient import (
    LookupTable,
    MonotonicityReport,
    PixelPair,
    boundary_posterior_two_pixel,
    build_lookup_table,
    check_monotonicity,
    check_monotonicity_condition,
    circular_magnitude,
    diff_region_likelihood,
    gradient_magnitude,
    same_region_likelihood,
)
from .image import GrayImage
from .noise import (
    GaussianAdditive,
    Mixture,
    NoiseMatrix,
    Replacement,
    build_noise_matrix,
    corruption_prob,
    identity_noise,
    is_additive,
    load_noise_matrix_csv,
    save_noise_matrix_csv,
)
from .oracle import (
    PosteriorEnumerator,
    SceneSpec,
    TinyModelSpec,
    actuals_monochrome,
    apply_noise,
    enumerate_posterior,
    generate_scene,
    load_tiny_model,
    save_tiny_model,
    score_boundary_map,
    structure_is,
)
from .pgm import quantize_levels, read_pgm, write_pgm
from .priors import (
    ColorDistribution,
    deconvolve_histogram,
    load_distribution_csv,
    observed_histogram,
    save_distribution_csv,
    uniform_distribution,
)
from .windows import (
    CostCounter,
    DetectorConfig,
    LikelihoodPairMap,
    Window,
    boundary_likelihood_constant,
    boundary_likelihood_exact,
    exterior_likelihood,
    interior_likelihood,
    pixel_really_is,
    pruned_interior_likelihood,
    save_pair_map_csv,
    scan_image,
)

__version__ = "0.1.0"

__all__ = [
    "ColorDistribution",
    "CostCounter",
    "DetectorConfig",
    "DomainWeight",
    "FeatureSet",
    "GaussianAdditive",
    "GrayImage",
    "ImpossibleObservationError",
    "LikelihoodPairMap",
    "LikelihoodSet",
    "LookupTable",
    "Mixture",
    "MonotonicityReport",
    "NoiseMatrix",
    "PgmFormatError",
    "PixelPair",
    "PosteriorEnumerator",
    "PriorVector",
    "ProbabilityMap",
    "Replacement",
    "SceneSpec",
    "SingularNoiseMatrixError",
    "TinyModelSpec",
    "Window",
    "actuals_monochrome",
    "apply_noise",
    "boundary_likelihood_constant",
    "boundary_likelihood_exact",
    "boundary_posterior_two_pixel",
    "build_lookup_table",
    "build_noise_matrix",
    "check_monotonicity",
    "check_monotonicity_condition",
    "circular_magnitude",
    "combine_disjoint",
    "corruption_prob",
    "deconvolve_histogram",
    "diff_region_likelihood",
    "enumerate_posterior",
    "exterior_likelihood",
    "generate_scene",
    "gradient_magnitude",
    "identity_noise",
    "interior_likelihood",
    "is_additive",
    "load_distribution_csv",
    "load_noise_matrix_csv",
    "load_tiny_model",
    "observed_histogram",
    "pixel_really_is",
    "posterior",
    "posterior_map",
    "probability_map_to_pgm_samples",
    "pruned_interior_likelihood",
    "quantize_levels",
    "read_pgm",
    "same_region_likelihood",
    "save_distribution_csv",
    "save_noise_matrix_csv",
    "save_pair_map_csv",
    "save_probability_map_csv",
    "save_tiny_model",
    "scan_image",
    "score_boundary_map",
    "structure_is",
    "uniform_distribution",
    "write_pgm",
]

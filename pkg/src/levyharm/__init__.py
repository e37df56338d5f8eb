"""levyharm: stationary signals as harmonics with random frequencies.

The spectrum is set by a frequency distribution and the marginal law by a
jump (Levy) measure; amplitudes come from the measure's inverse tail
evaluated at Poisson arrivals, Rayleigh-modulated. The package synthesizes
such signals, evaluates their exact characteristic functions, densities and
autocovariance, and quantifies the non-ergodicity of their time averages.
"""

from .charfn import (
    autocovariance,
    empirical_cf,
    fdd_cf,
    laplace_fdd_cf,
    laplace_marginal_cf,
    marginal_cf,
    marginal_density,
    quad_form,
    value_derivative_cf,
)
from .config import ConfigError, RunConfig
from .ergodics import (
    EnsembleReport,
    TimeAverageReport,
    ensemble_diagnostics,
    kay_variance,
    make_expansion,
    random_limit_acov,
    stationarity_shift_ks,
    suggested_dt,
    time_average_acov,
    time_average_mean,
    time_average_report,
)
from .levy import (
    AtomLevyMeasure,
    DensityTableLevyMeasure,
    GammaLevyMeasure,
    LevyMeasure,
    NormalizationReport,
    ScaledLevyMeasure,
    TruncatedLevyMeasure,
    check_normalization,
    laplace_exponent_quadrature,
    truncation_for_variance,
)
from .quadrature import NumericalError, adaptive_panels, integrate_half_line
from .special import exp_integral_e1, exp_integral_e1_inverse
from .spectrum import (
    DiscreteFrequencies,
    ExponentialFrequencies,
    SpectralDistribution,
    TableFrequencies,
    UniformFrequencies,
    frequency_from_config,
)
from .streams import (
    RandomStream,
    exponential_from_uniform,
    poisson_arrivals,
    rayleigh_from_uniform,
)
from .synthesis import (
    HarmonicExpansion,
    SignalPath,
    default_truncation_level,
    deterministic_increments,
    evaluate,
    evaluate_at,
    gamma_increments,
    generate_conditioned,
    generate_discrete,
    generate_gamma_shotnoise,
    generate_gaussian_limit,
    generate_inverse_levy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

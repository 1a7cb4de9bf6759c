"""mesospec: a Monte Carlo laboratory for mesoscopic eigenvalue statistics.

Generates dense random-matrix realizations (Wigner and sample-covariance),
evaluates the Cauchy-smoothed spectral density at resolution N^(-alpha), and
measures convergence to the limiting laws plus the Gaussian fluctuation
covariance around them.
"""

__version__ = "0.1.0"

from .ensembles import EnsembleSpec, expected_trace, generate, realized_m
from .eigensolve import (
    EigensolveError,
    SingularPivotError,
    SpectrumSample,
    eigenvalues_tridiagonal,
    resolvent_trace_oracle,
    spectrum,
    tridiagonalize,
)
from .laws import (
    LimitingLaw,
    covariance_kernel,
    kernel_asymptote_check,
    marchenko_pastur,
    mp_density,
    semicircle,
    semicircle_density,
    stieltjes,
    support_and_mass,
)
from .meso import (
    CovarianceReport,
    FluctuationBatch,
    MesoGrid,
    covariance_report,
    empirical_cdf,
    fluctuations,
    run_batch,
    smoothed_density,
    variance_scaling_study,
)
from .rng import EntryDistribution, SeedSpec, make_stream, moment_check, sample

__all__ = [
    "__version__",
    "CovarianceReport",
    "EigensolveError",
    "EnsembleSpec",
    "EntryDistribution",
    "FluctuationBatch",
    "LimitingLaw",
    "MesoGrid",
    "SeedSpec",
    "SingularPivotError",
    "SpectrumSample",
    "covariance_kernel",
    "covariance_report",
    "eigenvalues_tridiagonal",
    "empirical_cdf",
    "expected_trace",
    "fluctuations",
    "generate",
    "kernel_asymptote_check",
    "make_stream",
    "marchenko_pastur",
    "moment_check",
    "mp_density",
    "realized_m",
    "resolvent_trace_oracle",
    "run_batch",
    "sample",
    "semicircle",
    "semicircle_density",
    "smoothed_density",
    "spectrum",
    "stieltjes",
    "support_and_mass",
    "tridiagonalize",
    "variance_scaling_study",
]

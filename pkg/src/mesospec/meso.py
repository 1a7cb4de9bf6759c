"""Mesoscopic statistics: smoothed spectral density, scaled fluctuations,
and Monte Carlo estimation of their covariance, Gaussianity and scaling.

A realization is generated, reduced to its k smoothed-density values and
immediately discarded, so memory stays at one matrix per worker. Results are
a pure function of (master seed, grid, M): realizations use per-index streams
and land in index-addressed slots, independent of worker count or completion
order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import laws
from .eigensolve import EigensolveError, SpectrumSample, spectrum
from .ensembles import EnsembleSpec, generate

DEFAULT_MIN_REALIZATIONS = 30


@dataclass(frozen=True)
class MesoGrid:
    """Evaluation points lambda0 + tau_i N^(-alpha) at shared width N^(-alpha)."""

    lambda0: float
    alpha: float
    offsets: tuple
    N: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if len(self.offsets) == 0:
            raise ValueError("offsets must be nonempty")
        object.__setattr__(self, "offsets", tuple(float(t) for t in self.offsets))

    @property
    def eta(self) -> float:
        return float(self.N) ** (-self.alpha)

    @property
    def k(self) -> int:
        return len(self.offsets)

    def points(self) -> np.ndarray:
        return self.lambda0 + np.asarray(self.offsets) * self.eta


@dataclass
class FluctuationBatch:
    """M x k matrix of smoothed-density values across realizations."""

    values: np.ndarray
    grid: MesoGrid
    ensemble: EnsembleSpec
    M: int


@dataclass
class CovarianceReport:
    """Estimated vs predicted fluctuation covariance plus Gaussianity stats."""

    estimate: np.ndarray
    standard_errors: np.ndarray
    predicted: np.ndarray
    skewness: np.ndarray
    excess_kurtosis: np.ndarray
    M: int


def smoothed_density_from_eigenvalues(eigenvalues: np.ndarray, points, eta: float) -> np.ndarray:
    """Cauchy-kernel average (1/N) sum_j eta / ((pt - lam_j)^2 + eta^2)."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    diff = pts[:, None] - eigenvalues[None, :]
    return (eta / (diff * diff + eta * eta)).mean(axis=1)


def smoothed_density(sample: SpectrumSample, lam: float, alpha: float) -> float:
    """Smoothed empirical density at resolution eta = N^(-alpha).

    This is the exact finite-N evaluation against the atomic spectral
    measure, and equals Im Tr (A - (lam + i eta))^-1 / N.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if sample.N == 0:
        raise ValueError("empty spectrum")
    eta = float(sample.N) ** (-alpha)
    return float(smoothed_density_from_eigenvalues(sample.eigenvalues, lam, eta)[0])


def empirical_cdf(sample: SpectrumSample, lam: float) -> float:
    """Fraction of eigenvalues at or below lam."""
    if sample.N == 0:
        raise ValueError("empty spectrum")
    return float(np.searchsorted(sample.eigenvalues, lam, side="right")) / sample.N


def _reduce_realization(ensemble: EnsembleSpec, grid: MesoGrid, stream_id: int) -> np.ndarray:
    spec = ensemble.with_stream(stream_id)
    try:
        sample = spectrum(generate(spec), source_spec=spec)
    except EigensolveError as err:
        raise EigensolveError(f"stream {stream_id}: {err}") from err
    return smoothed_density_from_eigenvalues(sample.eigenvalues, grid.points(), grid.eta)


def run_batch(ensemble: EnsembleSpec, grid: MesoGrid, M: int, workers: int | None = None) -> FluctuationBatch:
    """M independent realizations reduced to their k smoothed-density values.

    Realization r uses stream_id r; a failed solve is reported with its
    stream id so the offending realization can be replayed in isolation.
    """
    ensemble.validate()
    if grid.N != ensemble.N:
        raise ValueError(f"grid.N = {grid.N} does not match ensemble.N = {ensemble.N}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if workers is None:
        workers = os.cpu_count() or 1
    values = np.empty((M, grid.k))
    if workers <= 1 or M == 1:
        for r in range(M):
            values[r] = _reduce_realization(ensemble, grid, r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, row in enumerate(pool.map(lambda r: _reduce_realization(ensemble, grid, r), range(M))):
                values[r] = row
    if not (values > 0).all():
        raise EigensolveError("smoothed density produced a non-positive value")
    return FluctuationBatch(values=values, grid=grid, ensemble=ensemble, M=M)


def fluctuations(batch: FluctuationBatch) -> np.ndarray:
    """Centered, N^(1-alpha)-scaled fluctuation matrix (M x k).

    The unavailable ensemble mean is replaced by the per-column sample mean,
    so every output column has mean zero up to rounding; the O(1/M) bias this
    introduces is absorbed in the covariance standard errors.
    """
    if batch.M < 2:
        raise ValueError(f"need M >= 2 to center, got M = {batch.M}")
    scale = float(batch.grid.N) ** (1.0 - batch.grid.alpha)
    return scale * (batch.values - batch.values.mean(axis=0))


def covariance_report(gamma: np.ndarray, grid: MesoGrid, min_realizations: int = DEFAULT_MIN_REALIZATIONS) -> CovarianceReport:
    """Unbiased covariance of the fluctuation vectors with error bars.

    Standard errors use the asymptotic Gaussian formula
    SE(C_ij) = sqrt((C_ii C_jj + C_ij^2) / (M - 1)); skewness and excess
    kurtosis are the bias-uncorrected sample statistics per offset.
    """
    gamma = np.asarray(gamma, dtype=float)
    m = gamma.shape[0]
    if m < min_realizations:
        raise ValueError(f"M = {m} is below the minimum {min_realizations} for covariance estimation")
    estimate = np.atleast_2d(np.cov(gamma, rowvar=False))
    diag = np.diag(estimate)
    standard_errors = np.sqrt((np.outer(diag, diag) + estimate**2) / (m - 1))
    predicted = laws.kernel_matrix(grid.offsets)
    centered = gamma - gamma.mean(axis=0)
    m2 = (centered**2).mean(axis=0)
    skewness = (centered**3).mean(axis=0) / m2**1.5
    excess_kurtosis = (centered**4).mean(axis=0) / m2**2 - 3.0
    return CovarianceReport(
        estimate=estimate,
        standard_errors=standard_errors,
        predicted=predicted,
        skewness=skewness,
        excess_kurtosis=excess_kurtosis,
        M=m,
    )


@dataclass
class ScalingStudy:
    """Variance of the smoothed density versus N and the fitted decay slope."""

    N_list: tuple
    variances: np.ndarray
    slope: float
    slope_stderr: float
    reference_slope: float


def variance_scaling_study(
    ensemble: EnsembleSpec,
    alpha: float,
    lam: float,
    N_list,
    M: int,
    workers: int | None = None,
) -> ScalingStudy:
    """Least-squares slope of log Var[R(lam)] against log N.

    The scaled-fluctuation limit predicts Var[R] ~ N^(2 alpha - 2), so the
    reference slope is 2 alpha - 2.
    """
    sizes = sorted(set(int(n) for n in N_list))
    if len(sizes) < 3:
        raise ValueError(f"need at least 3 distinct N values, got {sizes}")
    variances = np.empty(len(sizes))
    for i, n in enumerate(sizes):
        spec = replace(ensemble, N=n)
        grid = MesoGrid(lambda0=lam, alpha=alpha, offsets=(0.0,), N=n)
        batch = run_batch(spec, grid, M, workers=workers)
        variances[i] = batch.values[:, 0].var(ddof=1)
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(variances)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    dof = len(sizes) - 2
    sigma2 = (residuals**2).sum() / dof if dof > 0 else np.nan
    slope_stderr = float(np.sqrt(sigma2 / ((x - x.mean()) ** 2).sum()))
    return ScalingStudy(
        N_list=tuple(sizes),
        variances=variances,
        slope=float(slope),
        slope_stderr=slope_stderr,
        reference_slope=2.0 * alpha - 2.0,
    )

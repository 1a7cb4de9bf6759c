import numpy as np
import pytest

from mesospec import EnsembleSpec, EntryDistribution, SeedSpec
from mesospec.meso import MesoGrid, covariance_report, fluctuations, run_batch


def wigner_spec(N, seed=1, entry="gaussian", scale=1.0, stream=0):
    return EnsembleSpec(
        kind="wigner",
        N=N,
        entry_dist=EntryDistribution(entry, scale),
        seed=SeedSpec(seed, stream),
    )


def sc_spec(N, c=2.0, seed=1, scale=1.0, stream=0):
    return EnsembleSpec(
        kind="sample_covariance",
        N=N,
        entry_dist=EntryDistribution("gaussian", scale),
        c=c,
        seed=SeedSpec(seed, stream),
    )


# Heavy Monte Carlo batches shared by several acceptance criteria.
ACCEPTANCE_TAUS = (0.0, 1.0, 2.0, 4.0)
ACCEPTANCE_M = 4000


@pytest.fixture(scope="session")
def sc_fluct_report():
    """Sample-covariance fluctuation run: c=2, N=512, alpha=0.25, bulk center."""
    spec = sc_spec(512, c=2.0, seed=20260810)
    grid = MesoGrid(lambda0=3.0, alpha=0.25, offsets=ACCEPTANCE_TAUS, N=512)
    batch = run_batch(spec, grid, ACCEPTANCE_M)
    return covariance_report(fluctuations(batch), grid)


@pytest.fixture(scope="session")
def wigner_rademacher_fluct_report():
    """Wigner-Rademacher fluctuation run at alpha=0.1, N=512."""
    spec = wigner_spec(512, seed=20260810, entry="rademacher")
    grid = MesoGrid(lambda0=0.0, alpha=0.1, offsets=ACCEPTANCE_TAUS, N=512)
    batch = run_batch(spec, grid, ACCEPTANCE_M)
    return covariance_report(fluctuations(batch), grid)


def assert_within(actual, bound, label=""):
    actual = np.asarray(actual)
    bound = np.asarray(bound)
    worst = np.max(np.abs(actual) - bound)
    assert (np.abs(actual) <= bound).all(), f"{label}: exceeds bound by {worst:.3e}"

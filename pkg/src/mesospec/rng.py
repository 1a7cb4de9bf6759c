"""Deterministic, splittable random streams and the scalar entry distributions.

Streams are counter-based (Philox) and keyed by ``(master_seed, stream_id)``,
so stream_id can simply be the Monte Carlo realization index: any worker can
reconstruct realization r from scratch, in any order, and get identical draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_UINT64_MAX = 2**64 - 1

DISTRIBUTION_KINDS = ("gaussian", "rademacher", "uniform")


@dataclass(frozen=True)
class SeedSpec:
    """Key of one random stream: a master seed plus a stream index."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= _UINT64_MAX:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")


@dataclass(frozen=True)
class EntryDistribution:
    """Mean-zero scalar law with standard deviation ``scale``.

    gaussian    Normal(0, scale^2)
    rademacher  +/- scale with probability 1/2 each
    uniform     uniform on [-scale*sqrt(3), scale*sqrt(3)]
    """

    kind: str
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValueError(f"kind must be one of {DISTRIBUTION_KINDS}, got {self.kind!r}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be a positive finite real, got {self.scale!r}")


def make_stream(seed: SeedSpec) -> np.random.Generator:
    """Build the deterministic generator for one (master_seed, stream_id) pair.

    Distinct stream ids give distinct Philox keys and therefore independent
    counter-based streams; no coordination between workers is needed.
    """
    key = np.array([seed.master_seed, seed.stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def draw(dist: EntryDistribution, stream: np.random.Generator, size=None) -> np.ndarray:
    """Draw ``size`` i.i.d. values from ``dist`` (scalar array if size is None)."""
    if dist.kind == "gaussian":
        return dist.scale * stream.standard_normal(size)
    if dist.kind == "rademacher":
        return dist.scale * (2.0 * stream.integers(0, 2, size=size) - 1.0)
    half_width = dist.scale * math.sqrt(3.0)
    return stream.uniform(-half_width, half_width, size=size)


def sample(dist: EntryDistribution, stream: np.random.Generator) -> float:
    """One draw from ``dist``."""
    return float(draw(dist, stream))


def moment_check(dist: EntryDistribution, n_draws: int, stream: np.random.Generator):
    """Empirical (mean, variance, fourth moment) of ``n_draws`` samples.

    The variance is central; the fourth moment is raw (about zero), which for
    these mean-zero laws is the quantity the bounded-moment hypotheses bound.
    """
    if n_draws < 2:
        raise ValueError(f"n_draws must be >= 2, got {n_draws}")
    x = draw(dist, stream, size=n_draws)
    mean = float(x.mean())
    variance = float(((x - mean) ** 2).mean())
    fourth = float((x**4).mean())
    return mean, variance, fourth

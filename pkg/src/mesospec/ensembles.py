"""Random-matrix ensemble generators.

A realization is a plain (N, N) float64 C-order ndarray that is bitwise
symmetric; matrices live in memory only for as long as a spectrum is needed.
Draw order is contractual so that factored and accumulated constructions of
the same spec coincide: wigner consumes the upper triangle row by row,
sample_covariance consumes vectors mu = 1..m, each filled x = 1..N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .rng import EntryDistribution, SeedSpec, draw, make_stream

ENSEMBLE_KINDS = ("wigner", "sample_covariance")


@dataclass(frozen=True)
class EnsembleSpec:
    """Full description of one random-matrix ensemble realization.

    kind        "wigner" or "sample_covariance"
    N           matrix dimension
    entry_dist  scalar law of the independent entries (std dev = v or u)
    c           sample_covariance only: vector count ratio, m = round(c N)
    seed        stream key; stream_id is the realization index
    """

    kind: str
    N: int
    entry_dist: EntryDistribution
    c: float | None = None
    seed: SeedSpec = SeedSpec(0, 0)

    def validate(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"kind must be one of {ENSEMBLE_KINDS}, got {self.kind!r}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if self.kind == "sample_covariance":
            if self.c is None or not (self.c > 0):
                raise ValueError(f"sample_covariance requires c > 0, got {self.c!r}")
            if self.entry_dist.kind != "gaussian":
                raise ValueError(
                    "sample_covariance requires gaussian entries, "
                    f"got {self.entry_dist.kind!r}"
                )
        return self

    def with_stream(self, stream_id: int) -> "EnsembleSpec":
        return replace(self, seed=SeedSpec(self.seed.master_seed, stream_id))


def realized_m(spec: EnsembleSpec) -> int:
    """Vector count m = round(c N), halves rounded away from zero."""
    return int(math.floor(spec.c * spec.N + 0.5))


def generate(spec: EnsembleSpec) -> np.ndarray:
    """One realization of ``spec`` as an exactly symmetric dense matrix."""
    spec.validate()
    stream = make_stream(spec.seed)
    n = spec.N
    if spec.kind == "wigner":
        upper = draw(spec.entry_dist, stream, size=n * (n + 1) // 2)
        a = np.zeros((n, n))
        a[np.triu_indices(n)] = upper
        a = a + np.triu(a, 1).T
        a /= math.sqrt(n)
        return a
    m = realized_m(spec)
    x = spec.entry_dist.scale * stream.standard_normal((m, n))
    h = x.T @ x
    h /= n
    # dgemm output is not guaranteed bitwise symmetric; (h + h.T)/2 is
    return (h + h.T) / 2.0


def expected_trace(spec: EnsembleSpec) -> float:
    """E[Tr A / N]: zero for wigner, c u^2 for sample_covariance."""
    spec.validate()
    if spec.kind == "wigner":
        return 0.0
    return spec.c * spec.entry_dist.scale**2

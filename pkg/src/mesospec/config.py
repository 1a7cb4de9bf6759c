"""Run configuration: defaults, config-file parsing, flag precedence, validation.

Precedence, lowest to highest: built-in defaults < MESOSPEC_SEED environment
variable (master seed only) < config file < command-line flags. Every
validation failure names the offending field and is fatal before any
computation starts.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import laws
from .ensembles import ENSEMBLE_KINDS, EnsembleSpec
from .meso import MesoGrid
from .rng import DISTRIBUTION_KINDS, EntryDistribution, SeedSpec

EXPERIMENTS = ("density", "fluct", "scaling", "oracle-check", "laws")
FORMATS = ("csv", "json")

SEED_ENV_VAR = "MESOSPEC_SEED"

# documented built-in defaults (see --help); alpha and M defaults depend on
# the experiment and ensemble and are resolved in _fill_derived_defaults
DEFAULTS = {
    "kind": "wigner",
    "N": 512,
    "c": 2.0,
    "scale": 1.0,
    "entry": "gaussian",
    "alpha": None,
    "lambda0": None,
    "offsets": "0,1,2,4",
    "n_points": 21,
    "M": None,
    "N_list": "256,512,1024",
    "workers": 0,  # 0 = available hardware parallelism
    "master_seed": 1,
    "output_dir": None,
    "format": "csv",
    "oracle_cap": 128,
    "trials": 10,
}

DEFAULT_ALPHA = {"density": 0.5, "scaling": 0.5, "oracle-check": 0.5, "laws": 0.5}
DEFAULT_ALPHA_FLUCT = {"wigner": 0.1, "sample_covariance": 0.25}
DEFAULT_M = {"density": 20, "fluct": 4000, "scaling": 500, "oracle-check": 1, "laws": 1}

# support margin excluded at each edge for density grids (bulk-only contract)
DENSITY_EDGE_MARGIN = 0.10


class ValidationError(ValueError):
    """A configuration field failed validation; message names the field."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class RunConfig:
    """Fully validated description of one experiment run."""

    experiment: str
    ensemble: EnsembleSpec
    grid: MesoGrid | None
    M: int
    workers: int
    output_dir: str
    format: str
    n_points: int = 21
    N_list: tuple = (256, 512, 1024)
    oracle_cap: int = 128
    trials: int = 10
    density_points: np.ndarray | None = None
    raw: dict = field(default_factory=dict)

    @property
    def law(self) -> laws.LimitingLaw:
        if self.ensemble.kind == "wigner":
            return laws.semicircle(self.ensemble.entry_dist.scale)
        return laws.marchenko_pastur(self.ensemble.c, self.ensemble.entry_dist.scale)


def parse_config_file(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError("config", f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in DEFAULTS and key != "experiment":
            raise ValidationError(key, f"unknown config key (line {lineno})")
        values[key] = value.strip()
    return values


def _parse_int(name, value):
    try:
        return int(str(value))
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected an integer, got {value!r}") from None


def _parse_float(name, value):
    try:
        return float(str(value))
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a real number, got {value!r}") from None


def _parse_float_list(name, value):
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    try:
        return tuple(float(tok) for tok in str(value).split(",") if tok.strip())
    except ValueError:
        raise ValidationError(name, f"expected comma-separated reals, got {value!r}") from None


def _parse_int_list(name, value):
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    try:
        return tuple(int(tok) for tok in str(value).split(",") if tok.strip())
    except ValueError:
        raise ValidationError(name, f"expected comma-separated integers, got {value!r}") from None


def density_grid(law: laws.LimitingLaw, n_points: int) -> np.ndarray:
    """Default density-scan energies: bulk only, edges inset by 10%.

    Pointwise convergence of the smoothed density holds strictly inside the
    support, so scans exclude DENSITY_EDGE_MARGIN of the width at each edge.
    """
    lower, upper, _, _ = laws.support_and_mass(law)
    margin = DENSITY_EDGE_MARGIN * (upper - lower)
    return np.linspace(lower + margin, upper - margin, n_points)


def resolve_config(experiment: str, file_values: dict | None = None, flag_values: dict | None = None) -> RunConfig:
    """Merge defaults, environment, file and flags into a validated RunConfig."""
    if experiment not in EXPERIMENTS:
        raise ValidationError("experiment", f"must be one of {EXPERIMENTS}, got {experiment!r}")
    merged = dict(DEFAULTS)
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        merged["master_seed"] = _parse_int(SEED_ENV_VAR, env_seed)
    provided = set()
    for source in (file_values or {}), (flag_values or {}):
        for key, value in source.items():
            if value is None or key == "experiment":
                continue
            if key not in DEFAULTS:
                raise ValidationError(key, "unknown config key")
            merged[key] = value
            provided.add(key)
    return _validate(experiment, merged, provided)


def _fill_derived_defaults(experiment: str, kind: str, merged: dict):
    if merged["alpha"] is None:
        merged["alpha"] = DEFAULT_ALPHA_FLUCT[kind] if experiment == "fluct" else DEFAULT_ALPHA[experiment]
    if merged["M"] is None:
        merged["M"] = DEFAULT_M[experiment]
    if merged["output_dir"] is None:
        merged["output_dir"] = os.path.join("runs", experiment)


def _validate(experiment: str, merged: dict, provided: set) -> RunConfig:
    kind = str(merged["kind"])
    if kind not in ENSEMBLE_KINDS:
        raise ValidationError("kind", f"must be one of {ENSEMBLE_KINDS}, got {kind!r}")
    _fill_derived_defaults(experiment, kind, merged)

    n = _parse_int("N", merged["N"])
    if n < 1:
        raise ValidationError("N", f"must be a positive integer, got {n}")
    entry = str(merged["entry"])
    if entry not in DISTRIBUTION_KINDS:
        raise ValidationError("entry", f"must be one of {DISTRIBUTION_KINDS}, got {entry!r}")
    scale = _parse_float("scale", merged["scale"])
    if scale <= 0:
        raise ValidationError("scale", f"must be positive, got {scale}")
    master_seed = _parse_int("master_seed", merged["master_seed"])
    if master_seed < 0 or master_seed > 2**64 - 1:
        raise ValidationError("master_seed", f"must fit in unsigned 64 bits, got {master_seed}")

    c = None
    if kind == "sample_covariance":
        c = _parse_float("c", merged["c"])
        if c <= 0:
            raise ValidationError("c", f"must be positive for sample_covariance, got {c}")
        if entry != "gaussian":
            raise ValidationError("entry", "sample_covariance requires gaussian entries")
    try:
        ensemble = EnsembleSpec(
            kind=kind,
            N=n,
            entry_dist=EntryDistribution(kind=entry, scale=scale),
            c=c,
            seed=SeedSpec(master_seed, 0),
        ).validate()
    except ValueError as err:
        raise ValidationError("ensemble", str(err)) from None

    alpha = _parse_float("alpha", merged["alpha"])
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha", f"must lie strictly inside (0, 1), got {alpha}")

    law = laws.semicircle(scale) if kind == "wigner" else laws.marchenko_pastur(c, scale)
    lambda0 = merged["lambda0"]
    lambda0 = laws.bulk_center(law) if lambda0 is None else _parse_float("lambda0", lambda0)

    offsets = _parse_float_list("offsets", merged["offsets"])
    if not offsets:
        raise ValidationError("offsets", "must contain at least one value")
    grid = MesoGrid(lambda0=lambda0, alpha=alpha, offsets=offsets, N=n)

    m_value = _parse_int("M", merged["M"])
    if m_value < 1:
        raise ValidationError("M", f"must be >= 1, got {m_value}")
    if experiment == "fluct" and m_value < 30:
        raise ValidationError("M", f"fluct needs M >= 30 for usable standard errors, got {m_value}")

    n_points = _parse_int("n_points", merged["n_points"])
    if n_points < 2:
        raise ValidationError("n_points", f"must be >= 2, got {n_points}")

    n_list = _parse_int_list("N_list", merged["N_list"])
    if experiment == "scaling":
        if len(set(n_list)) < 3:
            raise ValidationError("N_list", f"needs >= 3 distinct sizes, got {n_list}")
        if any(v < 1 for v in n_list):
            raise ValidationError("N_list", f"sizes must be positive, got {n_list}")

    workers = _parse_int("workers", merged["workers"])
    if workers < 0:
        raise ValidationError("workers", f"must be >= 0 (0 = auto), got {workers}")
    if workers == 0:
        workers = os.cpu_count() or 1

    fmt = str(merged["format"])
    if fmt not in FORMATS:
        raise ValidationError("format", f"must be one of {FORMATS}, got {fmt!r}")

    oracle_cap = _parse_int("oracle_cap", merged["oracle_cap"])
    trials = _parse_int("trials", merged["trials"])
    if experiment == "oracle-check":
        if trials < 1:
            raise ValidationError("trials", f"must be >= 1, got {trials}")
        if n > oracle_cap:
            raise ValidationError("N", f"oracle-check requires N <= oracle_cap = {oracle_cap}, got {n}")

    density_points = None
    if experiment == "density":
        if provided & {"lambda0", "offsets"}:
            # user positioned the grid: bulk-only contract applies point by point
            density_points = np.asarray(grid.points(), dtype=float)
            lower, upper, _, _ = laws.support_and_mass(law)
            margin = DENSITY_EDGE_MARGIN * (upper - lower)
            bad = (density_points < lower + margin - 1e-12) | (density_points > upper - margin + 1e-12)
            if bad.any():
                first = float(density_points[bad][0])
                raise ValidationError(
                    "offsets",
                    f"density point {first:g} lies outside the bulk window "
                    f"[{lower + margin:g}, {upper - margin:g}]",
                )
        else:
            density_points = density_grid(law, n_points)

    resolved = dict(merged)
    resolved.update(
        experiment=experiment, N=n, c=c, scale=scale, alpha=alpha, lambda0=lambda0,
        offsets=offsets, M=m_value, n_points=n_points, N_list=n_list,
        workers=workers, master_seed=master_seed, format=fmt,
    )
    return RunConfig(
        experiment=experiment,
        ensemble=ensemble,
        grid=grid,
        M=m_value,
        workers=workers,
        output_dir=str(merged["output_dir"]),
        format=fmt,
        n_points=n_points,
        N_list=n_list,
        oracle_cap=oracle_cap,
        trials=trials,
        density_points=density_points,
        raw=resolved,
    )

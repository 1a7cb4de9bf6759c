"""Experiment commands and bit-exact result serialization.

Five subcommands: density, fluct, scaling, oracle-check, laws. All file
writes happen after computation completes; CSV numbers carry 17 significant
digits so a rerun with the same config and seed is byte-identical. Exit
codes: 0 success, 1 validation error, 2 numerical failure (non-convergence,
oracle breach), 3 tolerance failure in the fluct self-test.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, laws
from .config import (
    DEFAULT_M,
    DEFAULTS,
    EXPERIMENTS,
    FORMATS,
    RunConfig,
    SEED_ENV_VAR,
    ValidationError,
    parse_config_file,
    resolve_config,
)
from .eigensolve import (
    EigensolveError,
    SingularPivotError,
    resolvent_trace_oracle,
    spectrum,
)
from .ensembles import generate, realized_m
from .meso import (
    MesoGrid,
    covariance_report,
    fluctuations,
    run_batch,
    smoothed_density_from_eigenvalues,
    variance_scaling_study,
)
from .rng import SeedSpec, make_stream

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_TOLERANCE = 3

# frozen desk-scale tolerance bands for the fluct self-test
COV_BAND_SE_MULT = 3.0
COV_BAND_ABS = 0.03
GAUSS_LIMIT_SIGMAS = 3.0

ORACLE_BUDGET = 1e-9  # per unit inverse resolution
ORACLE_POINTS_PER_TRIAL = 20
ORACLE_ETA_RANGE = (1e-2, 1.0)


class OracleBreachError(RuntimeError):
    """Smoothed density and the direct resolvent disagree beyond budget."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _write_atomic(path: str, data: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(data)
    os.replace(tmp, path)


def write_table(config: RunConfig, name: str, columns, rows) -> str:
    """Write one table in the configured format; returns the file path."""
    rows = [list(r) for r in rows]
    if config.format == "csv":
        path = os.path.join(config.output_dir, name + ".csv")
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        _write_atomic(path, "\n".join(lines) + "\n")
    else:
        path = os.path.join(config.output_dir, name + ".json")
        payload = {"columns": list(columns), "rows": [[_json_value(v) for v in row] for row in rows]}
        _write_atomic(path, json.dumps(payload, indent=1) + "\n")
    return path


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return str(value)


def write_manifest(config: RunConfig, started: float, phase_seconds: dict):
    spec = config.ensemble
    manifest = {
        "artifact_version": __version__,
        "experiment": config.experiment,
        "config": {k: _json_value(v) if not isinstance(v, (tuple, list)) else list(map(_json_value, v))
                   for k, v in config.raw.items()},
        "master_seed": spec.seed.master_seed,
        "realized_m_over_N": (realized_m(spec) / spec.N) if spec.kind == "sample_covariance" else None,
        "started_at": datetime.fromtimestamp(started, tz=timezone.utc).isoformat(),
        "finished_at": datetime.now(tz=timezone.utc).isoformat(),
        "phase_seconds": {k: round(v, 3) for k, v in phase_seconds.items()},
    }
    _write_atomic(os.path.join(config.output_dir, "manifest.json"), json.dumps(manifest, indent=1) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_density(config: RunConfig) -> int:
    """Mean smoothed density over M realizations against the analytic law."""
    started = time.time()
    points = np.asarray(config.density_points, dtype=float)
    eta = config.grid.eta
    offsets = tuple((points - config.grid.lambda0) / eta)
    grid = MesoGrid(lambda0=config.grid.lambda0, alpha=config.grid.alpha, offsets=offsets, N=config.ensemble.N)
    batch = run_batch(config.ensemble, grid, config.M, workers=config.workers)
    compute_done = time.time()

    actual_points = grid.points()
    r_mean = batch.values.mean(axis=0)
    r_stderr = batch.values.std(axis=0, ddof=1) / math.sqrt(config.M) if config.M > 1 else np.zeros_like(r_mean)
    analytic = math.pi * np.asarray(laws.density(config.law, actual_points), dtype=float)
    abs_error = np.abs(r_mean - analytic)
    rel_error = abs_error / analytic

    os.makedirs(config.output_dir, exist_ok=True)
    rows = zip(actual_points, r_mean, r_stderr, analytic, abs_error, rel_error)
    write_table(config, "density",
                ["lambda", "R_mean", "R_stderr", "analytic_pi_rho", "abs_error", "rel_error"], rows)
    write_manifest(config, started, {"compute": compute_done - started, "write": time.time() - compute_done})
    print(f"density: {len(actual_points)} points, M={config.M}, max rel error {rel_error.max():.4f} "
          f"-> {config.output_dir}")
    return EXIT_OK


def cmd_fluct(config: RunConfig) -> int:
    """Fluctuation covariance against the predicted kernel, with pass/fail bands."""
    started = time.time()
    batch = run_batch(config.ensemble, config.grid, config.M, workers=config.workers)
    gamma = fluctuations(batch)
    report = covariance_report(gamma, config.grid)
    compute_done = time.time()

    taus = config.grid.offsets
    band = np.maximum(COV_BAND_SE_MULT * report.standard_errors, COV_BAND_ABS)
    deviation = np.abs(report.estimate - report.predicted)
    within = deviation <= band

    cov_rows = []
    for i in range(len(taus)):
        for j in range(len(taus)):
            cov_rows.append([i, j, taus[i], taus[j], report.estimate[i, j], report.predicted[i, j],
                             report.standard_errors[i, j], deviation[i, j], band[i, j], bool(within[i, j])])

    skew_limit = GAUSS_LIMIT_SIGMAS * math.sqrt(6.0 / report.M)
    kurt_limit = GAUSS_LIMIT_SIGMAS * math.sqrt(24.0 / report.M)
    gauss_ok = (np.abs(report.skewness) <= skew_limit) & (np.abs(report.excess_kurtosis) <= kurt_limit)
    gauss_rows = [
        [taus[i], report.skewness[i], skew_limit, report.excess_kurtosis[i], kurt_limit, bool(gauss_ok[i])]
        for i in range(len(taus))
    ]

    covariance_pass = bool(within.all())
    gaussianity_pass = bool(gauss_ok.all())
    summary = {
        "M": report.M,
        "covariance_pass": covariance_pass,
        "gaussianity_pass": gaussianity_pass,
        "pass": covariance_pass and gaussianity_pass,
        "max_abs_deviation": float(deviation.max()),
        "band": {"se_multiplier": COV_BAND_SE_MULT, "absolute": COV_BAND_ABS},
        "skew_limit": skew_limit,
        "kurt_limit": kurt_limit,
    }

    os.makedirs(config.output_dir, exist_ok=True)
    write_table(config, "covariance",
                ["i", "j", "tau_i", "tau_j", "estimate", "predicted", "stderr",
                 "abs_deviation", "tolerance", "within_band"], cov_rows)
    write_table(config, "gaussianity",
                ["tau", "skewness", "skew_limit", "excess_kurtosis", "kurt_limit", "within_limits"],
                gauss_rows)
    _write_atomic(os.path.join(config.output_dir, "summary.json"), json.dumps(summary, indent=1) + "\n")
    write_manifest(config, started, {"compute": compute_done - started, "write": time.time() - compute_done})
    verdict = "pass" if summary["pass"] else "FAIL"
    print(f"fluct: M={config.M}, max |estimate - predicted| = {deviation.max():.4f} "
          f"({verdict}) -> {config.output_dir}")
    return EXIT_OK if summary["pass"] else EXIT_TOLERANCE


def cmd_scaling(config: RunConfig) -> int:
    """Variance of the smoothed density versus N with the fitted decay slope."""
    started = time.time()
    study = variance_scaling_study(
        config.ensemble, config.grid.alpha, config.grid.lambda0,
        config.N_list, config.M, workers=config.workers,
    )
    compute_done = time.time()

    rows = [
        [n, study.variances[i], study.slope, study.slope_stderr, study.reference_slope]
        for i, n in enumerate(study.N_list)
    ]
    os.makedirs(config.output_dir, exist_ok=True)
    write_table(config, "scaling",
                ["N", "variance", "fitted_slope", "slope_stderr", "reference_slope"], rows)
    write_manifest(config, started, {"compute": compute_done - started, "write": time.time() - compute_done})
    print(f"scaling: fitted slope {study.slope:.4f} vs reference {study.reference_slope:.4f} "
          f"-> {config.output_dir}")
    return EXIT_OK


def cmd_oracle_check(config: RunConfig) -> int:
    """Cross-check the smoothed density against the direct complex resolvent."""
    started = time.time()
    rows = []
    max_scaled = 0.0
    eta_lo, eta_hi = ORACLE_ETA_RANGE
    for trial in range(config.trials):
        spec = config.ensemble.with_stream(trial)
        matrix = generate(spec)
        sample = spectrum(matrix, source_spec=spec)
        lower, upper, _, _ = laws.support_and_mass(config.law)
        margin = 0.1 * (upper - lower)
        zstream = make_stream(SeedSpec(spec.seed.master_seed, 2**32 + trial))
        for _ in range(ORACLE_POINTS_PER_TRIAL):
            lam = zstream.uniform(lower + margin, upper - margin)
            eta = math.exp(zstream.uniform(math.log(eta_lo), math.log(eta_hi)))
            smoothed = float(smoothed_density_from_eigenvalues(sample.eigenvalues, lam, eta)[0])
            oracle = resolvent_trace_oracle(matrix, complex(lam, eta), cap=config.oracle_cap)
            disc = abs(smoothed - oracle.imag)
            budget = ORACLE_BUDGET / eta
            max_scaled = max(max_scaled, disc / budget)
            rows.append([trial, spec.kind, spec.N, lam, eta, smoothed, oracle.imag, disc, budget])
    compute_done = time.time()

    os.makedirs(config.output_dir, exist_ok=True)
    write_table(config, "oracle_check",
                ["trial", "kind", "N", "lambda", "eta", "smoothed", "oracle_im",
                 "abs_discrepancy", "budget"], rows)
    write_manifest(config, started, {"compute": compute_done - started, "write": time.time() - compute_done})
    if max_scaled > 1.0:
        print(f"oracle-check: FAIL, worst discrepancy {max_scaled:.3g}x budget -> {config.output_dir}")
        raise OracleBreachError(f"discrepancy exceeded budget by factor {max_scaled:.3g}")
    print(f"oracle-check: pass, worst discrepancy {max_scaled:.3g}x budget "
          f"({config.trials} matrices x {ORACLE_POINTS_PER_TRIAL} points) -> {config.output_dir}")
    return EXIT_OK


def cmd_laws(config: RunConfig) -> int:
    """Tabulate the analytic curves so nothing downstream recomputes them."""
    started = time.time()
    law = config.law
    lower, upper, ac_mass, atom = laws.support_and_mass(law)
    lam_grid = np.linspace(lower, upper, config.n_points)
    rho = np.asarray(laws.density(law, lam_grid), dtype=float)
    density_rows = zip(lam_grid, rho, math.pi * rho)

    deltas = (0.0, 1.0, 2.0, 3.0, 4.0, 10.0, 20.0, 100.0)
    kernel_rows = [[d, laws.covariance_kernel(0.0, d), laws.kernel_asymptote_check(d)] for d in deltas]
    compute_done = time.time()

    os.makedirs(config.output_dir, exist_ok=True)
    write_table(config, "law_density", ["lambda", "rho", "pi_rho"], density_rows)
    write_table(config, "law_kernel", ["delta", "kernel", "asymptote_check"], kernel_rows)
    _write_atomic(
        os.path.join(config.output_dir, "support.json"),
        json.dumps({"lower": lower, "upper": upper, "ac_mass": ac_mass, "atom_at_zero": atom}, indent=1) + "\n",
    )
    write_manifest(config, started, {"compute": compute_done - started, "write": time.time() - compute_done})
    print(f"laws: {config.n_points} density points, {len(kernel_rows)} kernel rows -> {config.output_dir}")
    return EXIT_OK


COMMANDS = {
    "density": cmd_density,
    "fluct": cmd_fluct,
    "scaling": cmd_scaling,
    "oracle-check": cmd_oracle_check,
    "laws": cmd_laws,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as validation errors (exit 1)."""

    def error(self, message):
        raise ValidationError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mesospec",
        description="Monte Carlo laboratory for mesoscopic eigenvalue statistics of random matrices.",
        epilog=f"The {SEED_ENV_VAR} environment variable overrides the default master seed "
               "(lowest precedence; config file and flags win).",
    )
    parser.add_argument("--version", action="version", version=f"mesospec {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="{" + ",".join(EXPERIMENTS) + "}")
    help_by_experiment = {
        "density": "mean smoothed density vs the analytic law on a bulk grid "
                   f"(defaults: alpha 0.5, M {DEFAULT_M['density']})",
        "fluct": "covariance of scaled fluctuations vs the predicted kernel "
                 f"(defaults: alpha 0.25 sample_covariance / 0.1 wigner, M {DEFAULT_M['fluct']})",
        "scaling": "variance of the smoothed density vs N, fitted log-log slope "
                   f"(defaults: alpha 0.5, M {DEFAULT_M['scaling']}, N_list {DEFAULTS['N_list']})",
        "oracle-check": "smoothed density vs direct complex resolvent on random bulk points",
        "laws": "tabulate analytic densities and the covariance kernel (no sampling)",
    }
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=help_by_experiment[name])
        p.add_argument("--config", metavar="FILE", help="flat key = value config file")
        p.add_argument("--kind", choices=["wigner", "sample_covariance"],
                       help=f"ensemble kind (default {DEFAULTS['kind']})")
        p.add_argument("--N", type=int, help=f"matrix dimension (default {DEFAULTS['N']})")
        p.add_argument("--c", type=float,
                       help=f"sample_covariance vector ratio m/N (default {DEFAULTS['c']})")
        p.add_argument("--scale", type=float,
                       help=f"entry standard deviation v or u (default {DEFAULTS['scale']})")
        p.add_argument("--entry", choices=["gaussian", "rademacher", "uniform"],
                       help=f"entry distribution (default {DEFAULTS['entry']})")
        p.add_argument("--alpha", type=float,
                       help="resolution exponent in (0,1); default depends on experiment")
        p.add_argument("--lambda0", type=float,
                       help="base energy (default: bulk center of the limiting law)")
        p.add_argument("--offsets", help=f"comma-separated tau offsets (default {DEFAULTS['offsets']})")
        p.add_argument("--n-points", dest="n_points", type=int,
                       help=f"density/laws grid size (default {DEFAULTS['n_points']})")
        p.add_argument("--M", type=int, help="realization count; default depends on experiment")
        p.add_argument("--N-list", dest="N_list",
                       help=f"scaling study sizes (default {DEFAULTS['N_list']})")
        p.add_argument("--workers", type=int,
                       help="worker threads; 0 = hardware parallelism (default 0); "
                            "results do not depend on this")
        p.add_argument("--seed", dest="master_seed", type=int,
                       help=f"master seed (default {DEFAULTS['master_seed']})")
        p.add_argument("--output-dir", dest="output_dir",
                       help="output directory (default runs/<experiment>)")
        p.add_argument("--format", choices=list(FORMATS), help="table format (default csv)")
        p.add_argument("--trials", type=int,
                       help=f"oracle-check matrix count (default {DEFAULTS['trials']})")
        p.add_argument("--oracle-cap", dest="oracle_cap", type=int,
                       help=f"size cap for the O(N^3) resolvent oracle (default {DEFAULTS['oracle_cap']})")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    file_values = None
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as err:
            raise ValidationError("config", f"cannot read {args.config}: {err}") from None
        file_values = parse_config_file(text)
    flag_values = {
        key: getattr(args, key)
        for key in DEFAULTS
        if hasattr(args, key) and getattr(args, key) is not None
    }
    return resolve_config(args.experiment, file_values, flag_values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args)
        return COMMANDS[config.experiment](config)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EigensolveError, SingularPivotError, OracleBreachError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

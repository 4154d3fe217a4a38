"""Command-line experiment runner.

Subcommands::

    lpconc tail-sweep      Monte Carlo tail estimates + analytic envelopes (+ optional fit row)
    lpconc sample          raw sphere or ball samples
    lpconc radial-check    ball measure from sphere measure vs direct ball sampling
    lpconc dist-tests      KS / chi-square suites for the samplers
    lpconc envelope        analytic envelopes only, no sampling
    lpconc print-constants frozen constants with provenance

Every subcommand accepts ``--config FILE``; flags given on the command line
override values from the file. Output is CSV (default) or JSON lines, floats
printed with 17 significant digits. ``wall_time`` is always the last column
and is the only field that varies between identical runs.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 insufficient
data for an exponent fit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .constants import CONSTANTS
from .distributions import PExponentialSpec, sample_p_exponential
from .oracle import beta_coordinate_cdf, reference_tail_xp
from .radial import nu_from_empirical, nu_from_mu, radial_cdf_check
from .samplers import (
    Normalization,
    Region,
    sample_ball,
    sample_full_sphere,
    sample_quadrant_sphere,
)
from .stats import chi2_independence, ks_test
from .streams import chunk_sizes, make_stream
from .tails import (
    Body,
    EmpiricalTail,
    InsufficientDataError,
    TailQuery,
    bound_envelope,
    estimate_tail_grid,
    fit_exponent,
    norm_cap,
    sample_statistics,
)

log = logging.getLogger("lpconc")

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INSUFFICIENT = 0, 2, 3, 4

# stream family for raw sample dumps (0 and 1 belong to the tail estimators)
SAMPLE_FAMILY = 2

TAIL_COLUMNS = [
    "schema_version", "row_type", "p", "q", "n", "t", "body", "hits", "trials", "p_hat", "ci_low",
    "ci_high", "exponent_arg", "env_lower", "env_upper", "c_used", "C_used", "T_used", "upper_valid",
    "lower_valid", "moreover", "caveat", "n_verified", "slope", "slope_low", "slope_high", "fit_points",
    "seed", "chunks", "wall_time",
]
RADIAL_COLUMNS = [
    "schema_version", "row_type", "p", "q", "n", "t", "trials", "nu_direct", "direct_low", "direct_high",
    "nu_radial", "radial_low", "radial_high", "quad_error", "nu_step", "agree", "order", "seed", "chunks",
    "wall_time",
]
DIST_COLUMNS = [
    "schema_version", "row_type", "test", "p", "n", "samples", "statistic", "pvalue", "critical",
    "passed", "underpowered", "seed", "wall_time",
]
ENVELOPE_COLUMNS = [
    "schema_version", "row_type", "p", "q", "n", "t", "cap", "exponent_arg", "env_lower", "env_upper",
    "c_used", "C_used", "T_used", "upper_valid", "lower_valid", "moreover", "caveat", "n_verified",
    "beyond_cap",
]
CONSTANT_COLUMNS = ["schema_version", "row_type", "name", "value", "provenance"]


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return json.dumps(_fmt(v)) if not math.isfinite(v) else format(v, ".17g")
    return json.dumps(str(v))


class RowWriter:
    """Writes rows with a fixed column order to CSV or JSON lines."""

    def __init__(self, stream, columns, fmt="csv"):
        self.stream, self.columns, self.fmt = stream, list(columns), fmt
        if fmt == "csv":
            self._csv = csv.writer(stream, lineterminator="\n")
            self._csv.writerow(self.columns)

    def write(self, row: dict):
        row = {"schema_version": SCHEMA_VERSION, **row}
        unknown = set(row) - set(self.columns)
        if unknown:
            raise KeyError(f"columns not in schema: {sorted(unknown)}")
        if self.fmt == "csv":
            self._csv.writerow([_fmt(row.get(c)) for c in self.columns])
        else:
            body = ", ".join(f"{json.dumps(c)}: {_json_value(row.get(c))}" for c in self.columns)
            self.stream.write("{" + body + "}\n")


class _Output:
    """Buffers rows in memory; the file is written once at the end."""

    def __init__(self, path):
        self.path = path
        self.buffer = io.StringIO()

    def flush(self):
        text = self.buffer.getvalue()
        if self.path is None or self.path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def _grid(cfg: ExperimentConfig):
    for p in cfg.p:
        for q in cfg.q:
            for n in cfg.n:
                yield float(p), float(q), int(n)


def run_tail_sweep(cfg: ExperimentConfig, out) -> int:
    writer = RowWriter(out, TAIL_COLUMNS, cfg.format)
    ts = cfg.t_values()
    status = EXIT_OK
    for p, q, n in _grid(cfg):
        if q <= p:
            raise ConfigError(f"q={q:g} must exceed p={p:g}", field_name="q")
        t0 = time.perf_counter()
        ests = estimate_tail_grid(p, q, n, ts, cfg.trials, cfg.seed, cfg.body, cfg.chunks, cfg.workers)
        wall = time.perf_counter() - t0
        for t, e in zip(ts, ests):
            env = bound_envelope(TailQuery(p, q, n, t, Body(cfg.body)))
            writer.write(dict(
                row_type="point", p=p, q=q, n=n, t=t, body=cfg.body, hits=e.hits, trials=e.trials,
                p_hat=e.p_hat, ci_low=e.ci_low, ci_high=e.ci_high, exponent_arg=env.exponent_arg,
                env_lower=env.lower, env_upper=env.upper, c_used=env.c_used, C_used=env.C_used,
                T_used=env.T_used, upper_valid=env.upper_valid, lower_valid=env.lower_valid,
                moreover=env.moreover, caveat=env.caveat, n_verified=env.n_verified,
                seed=cfg.seed, chunks=cfg.chunks, wall_time=wall / len(ts)))
        if cfg.fit:
            row = dict(row_type="fit", p=p, q=q, n=n, body=cfg.body, trials=cfg.trials,
                       seed=cfg.seed, chunks=cfg.chunks)
            try:
                fit = fit_exponent(p, q, n, ts, cfg.trials, cfg.seed, body=cfg.body,
                                   require_window=False, estimates=ests)
                row.update(slope=fit.slope, slope_low=fit.slope_low, slope_high=fit.slope_high,
                           fit_points=len(fit.used))
            except InsufficientDataError as exc:
                log.error("p=%g q=%g n=%d: %s", p, q, n, exc)
                row.update(fit_points=sum(pt.admissible for pt in exc.table))
                status = EXIT_INSUFFICIENT
            row["wall_time"] = time.perf_counter() - t0
            writer.write(row)
    return status


def _sample_chunk(cfg, p, n, rows, chunk):
    stream = make_stream(cfg.seed, chunk, SAMPLE_FAMILY)
    region = Region(cfg.region)
    if region is Region.FULL_BALL:
        pts = sample_ball(p, n, cfg.normalization, stream, size=rows)
    else:
        fn = sample_quadrant_sphere if region is Region.QUADRANT_SPHERE else sample_full_sphere
        pts = fn(p, n, stream, size=rows)
        if Normalization(cfg.normalization) is Normalization.BIG_L:
            pts = pts.to_big_l()
    return pts


def run_sample(cfg: ExperimentConfig, out) -> int:
    if len(cfg.p) != 1 or len(cfg.n) != 1:
        raise ConfigError("sample takes a single p and a single n", field_name="p")
    p, n = float(cfg.p[0]), int(cfg.n[0])
    columns = ["schema_version", "row_type", "index", "p", "n", "region", "normalization", "source_S"]
    columns += [f"x{i}" for i in range(n)] + ["wall_time"]
    writer = RowWriter(out, columns, cfg.format)
    idx = 0
    for chunk, rows in enumerate(chunk_sizes(cfg.samples, cfg.chunks)):
        t0 = time.perf_counter()
        pts = _sample_chunk(cfg, p, n, rows, chunk)
        wall = (time.perf_counter() - t0) / rows
        for coords, S in zip(pts.coords, pts.source_S):
            row = dict(row_type="sample", index=idx, p=p, n=n, region=cfg.region,
                       normalization=cfg.normalization, source_S=float(S), wall_time=wall)
            row.update({f"x{i}": float(c) for i, c in enumerate(coords)})
            writer.write(row)
            idx += 1
    return EXIT_OK


def run_radial_check(cfg: ExperimentConfig, out) -> int:
    writer = RowWriter(out, RADIAL_COLUMNS, cfg.format)
    ts = cfg.t_values()
    for p, q, n in _grid(cfg):
        if q <= p:
            raise ConfigError(f"q={q:g} must exceed p={p:g}", field_name="q")
        t0 = time.perf_counter()
        tail = EmpiricalTail(sample_statistics(p, q, n, cfg.trials, cfg.seed, Body.MU_SPHERE,
                                               cfg.chunks, cfg.workers), cfg.seed, cfg.chunks)
        direct = estimate_tail_grid(p, q, n, ts, cfg.trials, cfg.seed, Body.NU_BALL, cfg.chunks, cfg.workers)
        wall = (time.perf_counter() - t0) / len(ts)
        for t, d in zip(ts, direct):
            r = nu_from_mu(p, q, n, t, tail, order=cfg.order, breakpoints=_radial_breaks(tail, t, n, q, p))
            agree = r.low <= d.ci_high and d.ci_low <= r.high
            writer.write(dict(
                row_type="radial", p=p, q=q, n=n, t=t, trials=cfg.trials, nu_direct=d.p_hat,
                direct_low=d.ci_low, direct_high=d.ci_high, nu_radial=r.value, radial_low=r.low,
                radial_high=r.high, quad_error=r.quad_error, nu_step=nu_from_empirical(tail, t, n),
                agree=agree, order=cfg.order, seed=cfg.seed, chunks=cfg.chunks, wall_time=wall))
    return EXIT_OK


def _radial_breaks(tail, t, n, q, p):
    """Radii where the sphere estimate crosses a few of its own quantiles."""
    cap = norm_cap(p, q, n)
    qs = np.quantile(tail.sorted, [0.5, 0.9, 0.99, 0.999])
    return [t / v for v in qs if t < v < cap]


def run_dist_tests(cfg: ExperimentConfig, out) -> int:
    writer = RowWriter(out, DIST_COLUMNS, cfg.format)
    m = cfg.samples
    for p in cfg.p:
        p = float(p)
        t0 = time.perf_counter()
        x = sample_p_exponential(PExponentialSpec(p), make_stream(cfg.seed, 0, SAMPLE_FAMILY), m)
        r = ks_test(x**p, lambda u: 1.0 - np.array([reference_tail_xp(p, v) for v in np.atleast_1d(u)]))
        _write_test(writer, "gamma-power", p, 1, r, cfg.seed, t0)
        for n in cfg.n:
            n = int(n)
            if n < 2:
                continue
            t0 = time.perf_counter()
            pts = sample_quadrant_sphere(p, n, make_stream(cfg.seed, n, SAMPLE_FAMILY), size=m)
            r = ks_test(pts.coords[:, 0] ** p, lambda u: beta_coordinate_cdf(p, n, u))
            _write_test(writer, "beta-coordinate", p, n, r, cfg.seed, t0)
            t0 = time.perf_counter()
            chi = chi2_independence(pts.source_S, pts.coords[:, 0]) if m >= 100 else None
            if chi is not None:
                writer.write(dict(row_type="test", test="chi2-independence", p=p, n=n, samples=m,
                                  statistic=chi.statistic, pvalue=chi.pvalue, passed=chi.passed,
                                  underpowered=False, seed=cfg.seed, wall_time=time.perf_counter() - t0))
            t0 = time.perf_counter()
            ball = sample_ball(p, n, "small-ell", make_stream(cfg.seed, 10_000 + n, SAMPLE_FAMILY), size=m)
            _write_test(writer, "radial-uniform", p, n, radial_cdf_check(p, n, ball).ks, cfg.seed, t0)
    return EXIT_OK


def _write_test(writer, name, p, n, r, seed, t0):
    writer.write(dict(row_type="test", test=name, p=p, n=n, samples=r.samples, statistic=r.statistic,
                      pvalue=r.pvalue, critical=r.critical, passed=r.passed, underpowered=r.underpowered,
                      seed=seed, wall_time=time.perf_counter() - t0))


def run_envelope(cfg: ExperimentConfig, out) -> int:
    writer = RowWriter(out, ENVELOPE_COLUMNS, cfg.format)
    for p, q, n in _grid(cfg):
        if q <= p:
            raise ConfigError(f"q={q:g} must exceed p={p:g}", field_name="q")
        for t in cfg.t_values():
            query = TailQuery(p, q, n, t)
            env = bound_envelope(query)
            writer.write(dict(
                row_type="envelope", p=p, q=q, n=n, t=t, cap=query.cap, exponent_arg=env.exponent_arg,
                env_lower=env.lower, env_upper=env.upper, c_used=env.c_used, C_used=env.C_used,
                T_used=env.T_used, upper_valid=env.upper_valid, lower_valid=env.lower_valid,
                moreover=env.moreover, caveat=env.caveat, n_verified=env.n_verified,
                beyond_cap=env.beyond_cap))
    return EXIT_OK


def run_print_constants(cfg: ExperimentConfig, out) -> int:
    writer = RowWriter(out, CONSTANT_COLUMNS, cfg.format)
    d = CONSTANTS.as_dict()
    prov = d.pop("provenance")
    for name, value in d.items():
        writer.write(dict(row_type="constant", name=name, value=value, provenance=prov.get(name, "")))
    return EXIT_OK


COMMANDS = {
    "tail-sweep": (run_tail_sweep, True),
    "sample": (run_sample, True),
    "radial-check": (run_radial_check, True),
    "dist-tests": (run_dist_tests, True),
    "envelope": (run_envelope, False),
    "print-constants": (run_print_constants, False),
}


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(sp, sampling: bool):
    sp.add_argument("--config", help="flat key = value configuration file")
    sp.add_argument("--output", "-o", help="output path (default: stdout)")
    sp.add_argument("--format", choices=("csv", "jsonl"))
    if sampling:
        sp.add_argument("--seed", type=int)
        sp.add_argument("--chunks", type=int, help="number of RNG chunks (fixes the result)")
        sp.add_argument("--workers", type=int, help="worker processes (does not change the result)")


def _add_grid(sp, with_t=True):
    sp.add_argument("--p", type=float, nargs="+")
    sp.add_argument("--q", type=float, nargs="+", help="may include inf")
    sp.add_argument("--n", type=int, nargs="+")
    if with_t:
        sp.add_argument("--t", type=float, nargs="+", help="explicit t grid")
        sp.add_argument("--t-min", type=float)
        sp.add_argument("--t-max", type=float)
        sp.add_argument("--t-points", type=int)
        sp.add_argument("--t-spacing", choices=("linear", "log"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpconc", description="Concentration experiments on l_p spheres and balls.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("tail-sweep", help="tail estimates with envelopes")
    _add_common(sp, True)
    _add_grid(sp)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--body", choices=("mu-sphere", "nu-ball"))
    sp.add_argument("--fit", action="store_true", default=None, help="append a fitted-slope row per triple")

    sp = sub.add_parser("sample", help="dump raw samples")
    _add_common(sp, True)
    _add_grid(sp, with_t=False)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--region", choices=[r.value for r in Region])
    sp.add_argument("--normalization", choices=[c.value for c in Normalization])

    sp = sub.add_parser("radial-check", help="radial integral of sphere estimates vs direct ball estimates")
    _add_common(sp, True)
    _add_grid(sp)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--order", type=int)

    sp = sub.add_parser("dist-tests", help="KS and chi-square sampler checks")
    _add_common(sp, True)
    _add_grid(sp, with_t=False)
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("envelope", help="analytic envelopes only")
    _add_common(sp, False)
    _add_grid(sp)

    sp = sub.add_parser("print-constants", help="frozen constants with provenance")
    _add_common(sp, False)
    return ap


_NON_CONFIG = {"command", "config", "verbose"}


def config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {k: v for k, v in vars(args).items() if k not in _NON_CONFIG}
    return cfg.updated(**overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    fn, needs_seed = COMMANDS[args.command]
    try:
        cfg = config_from_args(args).validate(require_seed=needs_seed)
        out = _Output(cfg.output)
        status = fn(cfg, out.buffer)
    except ConfigError as exc:
        print(f"lpconc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"lpconc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"lpconc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        out.flush()
    except OSError as exc:
        print(f"lpconc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())

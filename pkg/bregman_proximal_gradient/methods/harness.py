#! /usr/bin/env python3
# -*- coding: utf-8 -*-

"""Command-line harness: instance generation, solver runs and comparisons, and convergence certificates.

    bpg-harness gen --family dopt --m 80 --n 200 --seed 1 --out inst.json
    bpg-harness run --instance inst.json --algo abpg-e --gamma0 3 --delta 0.2 --iters 1000 --out abpg-e.csv
    bpg-harness compare --instance inst.json --algos bpg,bpg-ls,abpg,abpg-g --gamma 2 --iters 1000 --out cmp.csv
    bpg-harness certify --trace cmp_abpg-g.csv --instance inst.json --summary cmp.json --algo abpg-g --out cert.csv

Relative '--out' and '--summary' paths are resolved against the directory named by the environment variable
'BPG_OUTPUT_DIR' (default: the working directory).
"""


from ..assisting_modules.errors import BregmanError, ConfigurationError, DomainError, InstanceError
from ..assisting_modules.useful_functions import loglog_slope
from .instances import InstanceSpec, generate, load_instance, save_instance
from .objectives import Regularizer
from .solvers import COLUMNS, SolverConfig, TraceRow, reference_optimum, run_solver
from .stepsize import ThetaSequence

import argparse
import concurrent.futures
import csv
import dataclasses
import json
import logging
import math
import os
import sys

import numpy as np


logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "BPG_OUTPUT_DIR"

TRACE_HEADER = ("k", "F", "gap", "theta", "gamma", "G", "Ghat", "inner", "grad_calls", "seconds")

CERTIFICATE_HEADER = ("k", "geo_mean_gain", "theory_bound", "observed_gap", "slope")

REFERENCE_PROCEDURE = ("F* is the smallest objective value among a restarted ABPG-g run with ten times the iteration "
                       "budget and the best iterates of all compared algorithms (0 for least-squares instances with a "
                       "known solution).")

_INTEGER_COLUMNS = ("k", "inner", "grad_calls")

_SLOPE_FRACTION = 0.1


@dataclasses.dataclass(frozen=True)
class Certificate:
    k: int
    geo_mean_gain: float
    theory_bound: float
    observed_gap: float
    slope: float


def geo_mean_gain(gains, gamma):
    """(G_0^gamma * G_1 * ... * G_k)^(1/(k + gamma)), computed in log space."""
    return float(geo_mean_gains(gains, gamma)[-1])


def geo_mean_gains(gains, gamma):
    """The weighted geometric means of every prefix G_0..G_k."""
    gains = np.asarray(gains, dtype=float)

    assert (gains.size > 0), "at least one gain is needed."

    if not (gains > 0).all():
        raise DomainError("gains must be positive, but found: {!r}.".format(gains[gains <= 0][0]))

    logs = np.log(gains)
    weighted = np.cumsum(logs) + (gamma - 1.0) * logs[0]

    return np.exp(weighted / (np.arange(gains.size) + gamma))


def fit_rate_slope(gaps, k_lo, k_hi):
    """Least-squares slope of log(gap_k) against log(k) for k_lo <= k <= k_hi. 'gaps' is indexed by iterate number."""
    assert (1 <= k_lo < k_hi < len(gaps)), "1 <= k_lo < k_hi < len(gaps) must hold."

    window = np.asarray(gaps[k_lo:k_hi + 1], dtype=float)

    if not (window > 0).all():
        raise DomainError("the optimality gaps must be positive on the window [{}, {}].".format(k_lo, k_hi))

    return loglog_slope(np.arange(k_lo, k_hi + 1), window)


def _trailing_slopes(gaps, fraction=_SLOPE_FRACTION):
    """For every iterate j, the slope over the window [fraction * j, j], or NaN where the window is too short or holds a
    nonpositive gap. Running sums keep the total cost linear."""
    gaps = np.asarray(gaps, dtype=float)
    count = gaps.size

    ks = np.arange(count, dtype=float)
    positive = gaps > 0

    log_k = np.log(np.maximum(ks, 1.0))
    log_g = np.log(np.where(positive, gaps, 1.0))

    def running(values):
        return np.concatenate(([0.0], np.cumsum(values)))

    s_x, s_y = running(log_k), running(log_g)
    s_xx, s_xy = running(log_k * log_k), running(log_k * log_g)
    s_bad = running(~positive)

    slopes = np.full(count, math.nan)

    for j in range(2, count):
        lo = max(1, int(fraction * j))
        hi = j + 1
        n = hi - lo

        if n < 2 or s_bad[hi] - s_bad[lo] > 0:
            continue

        sx, sy = s_x[hi] - s_x[lo], s_y[hi] - s_y[lo]
        denominator = n * (s_xx[hi] - s_xx[lo]) - sx * sx

        if denominator > 0:
            slopes[j] = (n * (s_xy[hi] - s_xy[lo]) - sx * sy) / denominator

    return slopes


def _window_slope(gaps, fraction=_SLOPE_FRACTION):
    """Slope over [fraction * K, K], with K cut back to the last iterate before the first nonpositive gap."""
    gaps = np.asarray(gaps, dtype=float)
    nonpositive = np.nonzero(gaps[1:] <= 0)[0]
    k_hi = (int(nonpositive[0]) if nonpositive.size else gaps.size - 1)
    k_lo = max(1, int(fraction * k_hi))

    if k_hi - k_lo < 1:
        return None

    return fit_rate_slope(gaps, k_lo, k_hi)


def certificate_series(rows, algorithm, problem, x0, F_star, x_hat):
    """One certificate per trace row. Row k carries F(x_{k+1}), so the bounds are evaluated with the same k.

    The bound is NaN where none applies: restarted runs, and dual averaging unless x0 minimizes h over the feasible set."""
    A = SolverConfig.ALGORITHM

    # Labels look like 'abpg-g', 'abpg-g-rs' or, for exponent sweeps, 'abpg-gamma1.5'.
    label = algorithm.split("-gamma")[0]
    restarted = label.endswith("-rs")

    if restarted:
        label = label[:-3]

    try:
        base = A(label)
    except ValueError:
        raise ConfigurationError("unknown algorithm: {}.".format(algorithm)) from None

    L = problem.L
    kernel = problem.kernel
    ks = np.array([row.k for row in rows], dtype=float)

    thetas_gamma = np.array([row.gamma for row in rows], dtype=float)
    gains = np.ones(len(rows))
    bounds = np.full(len(rows), math.nan)

    if rows:
        distance = L * kernel.divergence(x_hat, x0)

        if base == A.BPG:
            bounds = distance / (ks + 1)

        elif base == A.BPG_LS:
            G = np.array([row.G for row in rows], dtype=float)
            gains = geo_mean_gains(G, 1.0)
            bounds = distance / np.cumsum(1.0 / G)

        elif base in (A.ABPG, A.ABPG_E):
            bounds = (thetas_gamma / (ks + thetas_gamma)) ** thetas_gamma * distance

        elif base == A.ABPG_G:
            gamma = thetas_gamma[0]
            gains = geo_mean_gains([row.G for row in rows], gamma)
            bounds = (gamma / (ks + gamma)) ** gamma * gains * distance

        else:
            z0 = kernel.minimizer_on(problem.feasible_set)

            if z0 is not None and np.allclose(z0, x0, rtol=0.0, atol=1e-12):
                gamma = thetas_gamma[0]
                bounds = (gamma / (ks + gamma)) ** gamma * L * (kernel.value(x_hat) - kernel.value(z0))

        if restarted:
            bounds[:] = math.nan

    F_values = np.array([row.F for row in rows], dtype=float)
    iterate_gaps = np.concatenate(([problem.F(x0) - F_star], F_values - F_star))
    slopes = _trailing_slopes(iterate_gaps)

    return [Certificate(int(row.k), float(gains[i]), float(bounds[i]), float(F_values[i] - F_star), float(slopes[i + 1]))
            for i, row in enumerate(rows)]


def _format(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))

    if value is None or math.isnan(value):
        return ""

    return repr(float(value))


def _trace_lines(rows, F_star):
    for row in rows:
        values = dataclasses.asdict(row)
        values["gap"] = None if F_star is None else row.F - F_star

        yield [_format(values[name]) for name in TRACE_HEADER]


def write_trace_csv(trace, path, F_star=None):
    """Writes one row per iteration. The gap column stays empty until F* is known."""
    rows = trace.rows if hasattr(trace, "rows") else trace

    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow(TRACE_HEADER)
        writer.writerows(_trace_lines(rows, F_star))


def read_trace_csv(path):
    """The rows of a trace CSV. Empty fields become NaN; the gap column is dropped since it is derived."""
    rows = []

    with open(path, "r", newline="") as file:
        reader = csv.DictReader(file)

        if reader.fieldnames is None or tuple(reader.fieldnames[-len(TRACE_HEADER):]) != TRACE_HEADER:
            raise InstanceError("'{}' does not have the trace header.".format(path))

        for record in reader:
            values = {}

            try:
                for name in COLUMNS:
                    text = record[name]

                    if name in _INTEGER_COLUMNS:
                        values[name] = int(text)
                    else:
                        values[name] = float(text) if text else math.nan
            except (TypeError, ValueError):
                raise InstanceError("'{}' line {}: malformed trace row.".format(path, reader.line_num)) from None

            rows.append(TraceRow(**values))

    return rows


def write_certificate_csv(certificates, path):
    with open(path, "w", newline="") as file:
        writer = csv.writer(file)
        writer.writerow(CERTIFICATE_HEADER)

        for certificate in certificates:
            writer.writerow([_format(getattr(certificate, name)) for name in CERTIFICATE_HEADER])


def _output_path(path):
    if os.path.isabs(path):
        return path

    return os.path.join(os.environ.get(OUTPUT_DIR_ENV, "."), path)


def _json_number(value):
    return None if (value is None or math.isnan(value)) else float(value)


def _progress_hook(label, every):
    if not every:
        return None

    def hook(row):
        if (row.k + 1) % every == 0:
            logger.info("%s: k=%d F=%r grad_calls=%d", label, row.k, row.F, row.grad_calls)

    return hook


def _parse_algorithm(token):
    """'abpg-g-rs' -> (ALGORITHM.ABPG_G, restart=True)."""
    token = token.strip().lower()
    restart = token.endswith("-rs")
    name = token[:-3] if restart else token

    try:
        return SolverConfig.ALGORITHM(name), restart
    except ValueError:
        raise ConfigurationError("unknown algorithm: {}.".format(token)) from None


def _theta_mode(name):
    if name is None:
        return None

    try:
        return ThetaSequence.MODE(name)
    except ValueError:
        raise ConfigurationError("unknown theta mode: {}.".format(name)) from None


def _config(args, algorithm, restart, gamma=None):
    return SolverConfig(algorithm,
                        gamma=args.gamma if gamma is None else gamma,
                        gamma0=args.gamma0,
                        gamma_min=args.gamma_min,
                        delta=args.delta,
                        rho=args.rho,
                        G_min=args.G_min,
                        max_iter=args.iters,
                        theta_mode=_theta_mode(args.theta_mode),
                        restart=restart)


def _cmd_gen(args):
    F = InstanceSpec.FAMILY

    try:
        family = F(args.family)
    except ValueError:
        raise ConfigurationError("unknown family: {}.".format(args.family)) from None

    reg = None if args.reg is None else Regularizer.from_name(args.reg, args.lam)

    if family == F.DOPT_LIBSVM:
        if args.libsvm is None:
            raise ConfigurationError("the dopt-libsvm family needs --libsvm.")

        spec = InstanceSpec(family, 0, 0, None, reg, args.libsvm, args.unit_norm)
    else:
        spec = InstanceSpec(family, args.m, args.n, args.seed, reg)

    instance = generate(spec)
    save_instance(instance, _output_path(args.out))


def _cmd_run(args):
    instance = load_instance(args.instance)
    algorithm, restart = _parse_algorithm(args.algo)
    cfg = _config(args, algorithm, restart or args.restart)

    trace = run_solver(instance.problem, cfg, instance.x0, on_iteration=_progress_hook(cfg.label, args.log_every))
    write_trace_csv(trace, _output_path(args.out), args.F_star)

    logger.info("%s finished: F=%r after %d iterations.", cfg.label, trace.rows[-1].F, len(trace))


def _compare_configs(args):
    configs = []

    for token in args.algos.split(","):
        if not token.strip():
            continue

        algorithm, restart = _parse_algorithm(token)

        if algorithm == SolverConfig.ALGORITHM.ABPG and args.gammas:
            for gamma in args.gammas:
                configs.append(("{}-gamma{}".format(algorithm.value + ("-rs" if restart else ""), gamma),
                                _config(args, algorithm, restart, gamma)))
        else:
            cfg = _config(args, algorithm, restart)
            configs.append((cfg.label, cfg))

    if not configs:
        raise ConfigurationError("no algorithms given.")

    return configs


def _cmd_compare(args):
    instance = load_instance(args.instance)
    problem, x0 = instance.problem, instance.x0
    configs = _compare_configs(args)

    def run(entry):
        label, cfg = entry
        return run_solver(problem, cfg, x0, on_iteration=_progress_hook(label, args.log_every))

    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        traces = list(pool.map(run, configs))

    x_hat, F_star = reference_optimum(problem, x0, args.ref_iters or args.iters)

    for trace in traces:
        if trace.F_best < F_star:
            x_hat, F_star = trace.x_best, trace.F_best

    if instance.x_true is not None and F_star > 0.0:
        x_hat, F_star = instance.x_true, 0.0

    out = _output_path(args.out)
    stem = os.path.splitext(out)[0]
    summary = {"instance": args.instance,
               "F_star": F_star,
               "F_star_procedure": REFERENCE_PROCEDURE,
               "x_hat": np.asarray(x_hat, dtype=float).tolist(),
               "iterations": args.iters,
               "algorithms": {}}

    with open(out, "w", newline="") as merged:
        writer = csv.writer(merged)
        writer.writerow(("algorithm",) + TRACE_HEADER)

        for (label, cfg), trace in zip(configs, traces):
            trace_path = "{}_{}.csv".format(stem, label)
            write_trace_csv(trace, trace_path, F_star)

            for line in _trace_lines(trace.rows, F_star):
                writer.writerow([label] + line)

            gains = trace.column("G")
            gaps = trace.iterate_gaps(F_star)

            summary["algorithms"][label] = {
                "trace": os.path.basename(trace_path),
                "final_gap": _json_number(trace.rows[-1].F - F_star),
                "geo_mean_gain": (geo_mean_gain(gains, cfg.gamma) if cfg.algorithm == SolverConfig.ALGORITHM.ABPG_G
                                  else None),
                "slope": _window_slope(gaps, args.slope_fraction),
                "grad_calls": trace.rows[-1].grad_calls,
                "restarts": list(trace.restarts),
            }

    with open(_output_path(args.summary) if args.summary else stem + ".json", "w") as file:
        json.dump(summary, file, indent=2)

    logger.info("compared %d algorithms, F* = %r.", len(configs), F_star)


def _cmd_certify(args):
    instance = load_instance(args.instance)
    rows = read_trace_csv(args.trace)

    try:
        with open(args.summary, "r") as file:
            summary = json.load(file)

        F_star = float(summary["F_star"])
        x_hat = np.array(summary["x_hat"], dtype=float)
    except (KeyError, TypeError, ValueError) as error:
        raise InstanceError("'{}' is not a comparison summary: {!r}".format(args.summary, error)) from None

    if x_hat.shape != (instance.problem.dimension,):
        raise InstanceError("'{}' holds a reference point of shape {}, but the instance has dimension {}.".format(
            args.summary, x_hat.shape, instance.problem.dimension))

    logger.debug("certifying %d rows of '%s' against F* = %r.", len(rows), args.trace, F_star)

    certificates = certificate_series(rows, args.algo, instance.problem, instance.x0, F_star, x_hat)
    write_certificate_csv(certificates, _output_path(args.out))


def _add_solver_flags(parser):
    parser.add_argument("--iters", type=int, default=1000)
    parser.add_argument("--gamma", type=float, default=2.0)
    parser.add_argument("--gamma0", type=float, default=3.0)
    parser.add_argument("--gamma-min", dest="gamma_min", type=float, default=0.0)
    parser.add_argument("--delta", type=float, default=0.2)
    parser.add_argument("--rho", type=float, default=1.5)
    parser.add_argument("--G-min", dest="G_min", type=float, default=1e-3)
    parser.add_argument("--theta-mode", dest="theta_mode", choices=[mode.value for mode in ThetaSequence.MODE])
    parser.add_argument("--log-every", dest="log_every", type=int, default=0,
                        help="log progress every N iterations (0: never)")


def build_parser():
    parser = argparse.ArgumentParser(prog="bpg-harness",
                                     description="Bregman proximal gradient experiments.")
    parser.add_argument("-v", "--verbose", action="count", default=0)

    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate an instance file")
    gen.add_argument("--family", required=True, choices=[family.value for family in InstanceSpec.FAMILY])
    gen.add_argument("--m", type=int, default=0)
    gen.add_argument("--n", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--reg", choices=[kind.value for kind in Regularizer.KIND])
    gen.add_argument("--lam", type=float, default=0.0)
    gen.add_argument("--libsvm")
    gen.add_argument("--unit-norm", dest="unit_norm", action="store_true")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    run = commands.add_parser("run", help="run one algorithm and write its trace")
    run.add_argument("--instance", required=True)
    run.add_argument("--algo", required=True)
    run.add_argument("--restart", action="store_true")
    run.add_argument("--F-star", dest="F_star", type=float)
    run.add_argument("--out", required=True)
    _add_solver_flags(run)
    run.set_defaults(func=_cmd_run)

    compare = commands.add_parser("compare", help="run several algorithms and write traces and a summary")
    compare.add_argument("--instance", required=True)
    compare.add_argument("--algos", required=True, help="comma-separated, e.g. bpg,bpg-ls,abpg,abpg-g-rs")
    compare.add_argument("--gammas", type=lambda text: [float(value) for value in text.split(",")],
                         help="comma-separated exponents for abpg")
    compare.add_argument("--jobs", type=int, default=1)
    compare.add_argument("--ref-iters", dest="ref_iters", type=int)
    compare.add_argument("--slope-fraction", dest="slope_fraction", type=float, default=_SLOPE_FRACTION)
    compare.add_argument("--summary")
    compare.add_argument("--out", required=True)
    _add_solver_flags(compare)
    compare.set_defaults(func=_cmd_compare)

    certify = commands.add_parser("certify", help="turn a trace into a certificate series")
    certify.add_argument("--trace", required=True)
    certify.add_argument("--instance", required=True)
    certify.add_argument("--summary", required=True)
    certify.add_argument("--algo", required=True)
    certify.add_argument("--out", required=True)
    certify.set_defaults(func=_cmd_certify)

    return parser


def cli_main(argv=None):
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        # argparse already printed its diagnostic.
        return exit_request.code if isinstance(exit_request.code, int) else 2

    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        args.func(args)
    except (BregmanError, OSError) as error:
        print("error: {}".format(error), file=sys.stderr)
        return 1
    except AssertionError as error:
        logger.debug("argument check failed.", exc_info=True)
        print("error: invalid input: {}".format(error), file=sys.stderr)
        return 1

    return 0


def main():
    sys.exit(cli_main())

"""Command-line front end.

Every subcommand writes a table (CSV by default, JSON on request) to
``--output`` or stdout.  Exit status: 0 success, 1 bad input, 2 a check ran
but exceeded its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import errchan, physoracle, recurse, repcode
from .errchan import ErrorParams
from .mcsim import TrajectoryConfig, run_failure_curve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, np.integer):
        return int(value)
    return value


def emit(columns: Sequence[str], rows, fmt: str, path: Optional[str]) -> None:
    rows = list(rows)
    if fmt == "json":
        text = json.dumps(
            [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows], indent=1
        ) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _int_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _params(args) -> ErrorParams:
    return ErrorParams(args.epsilon, args.q)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SEED environment variable is not an integer: {env!r}")


def _check_threshold(t: float) -> float:
    if not 0 < t < 1:
        raise UsageError(f"threshold must lie in (0, 1), got {t}")
    return t


def cmd_recurse(args) -> int:
    rows = recurse.coherence_table(args.d, _params(args), args.n_max, exact=args.mode == "exact")
    cols = ["d", "n", "epsilon", "q", "log10_epsilon", "log10_q", "r", "D", "d_over_r", "eps_over_q"]
    emit(cols, ([getattr(r, c) for c in cols] for r in rows), args.format, args.output)
    return EXIT_OK


def cmd_metrics(args) -> int:
    p = _params(args)
    _check_threshold(args.threshold)
    m = errchan.metrics(p)
    pred = errchan.predict(p, args.threshold)
    cols = ["epsilon", "q", "r", "D", "d_over_r", "d_over_r_approx", "m_crit", "m_fail", "threshold"]
    row = [p.epsilon, p.q, m.r, m.D, m.coherence_ratio, m.coherence_ratio_approx,
           pred.m_crit, pred.m_fail, pred.threshold]
    emit(cols, [row], args.format, args.output)
    return EXIT_OK


def _level_channel(d: int, p: ErrorParams, level: int):
    """Channel sampled per cycle and its single-cycle (eps, q) at ``level``."""
    if level == 0:
        return p, p
    below = recurse.recurse_exact(d, p, level - 1).levels[-1].params
    channel = repcode.syndrome_classes(d, below)
    return channel, repcode.exact_logical_params(d, below)


def cmd_simulate(args) -> int:
    p = _params(args)
    if not 0 <= args.level <= recurse.EXACT_MAX_LEVEL + 1:
        raise UsageError(f"--level must lie in [0, {recurse.EXACT_MAX_LEVEL + 1}]")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    channel, exact_p = _level_channel(args.d, p, args.level)
    if args.analytic == "leading" and args.level > 0:
        overlay = recurse.recurse_leading(args.d, p, args.level).levels[-1].params
    else:
        overlay = exact_p
    cfg = TrajectoryConfig(channel, args.m_max, args.samples, _seed(args), args.theta)
    curve = run_failure_curve(cfg, workers=args.workers)
    cols = ["m", "mc_mean", "mc_stderr", "eq16", "eq17", "exact"]
    rows = (
        [m, mean, se,
         errchan.worst_case_infidelity(overlay, m, "eq16"),
         errchan.worst_case_infidelity(overlay, m, "eq17"),
         errchan.worst_case_infidelity(exact_p, m, "exact_composition")]
        for m, mean, se in curve.rows()
    )
    emit(cols, rows, args.format, args.output)
    return EXIT_OK


def oracle_grid(n_list, grid: int, eps_max: float, q_max: float):
    """Rows ``(N, eps, q, max |tomography - closed form|)``."""
    rows = []
    for N in n_list:
        for eps in np.linspace(0.0, eps_max, grid):
            for q in np.linspace(0.0, q_max, grid):
                p = ErrorParams(float(eps), float(q))
                block = physoracle.tomography_block(N, p)
                closed = repcode.logical_reduced_ptm(repcode.syndrome_classes(N, p)).matrix()
                rows.append([N, p.epsilon, p.q, float(np.max(np.abs(block - closed)))])
    return rows


def cmd_oracle_check(args) -> int:
    for N in args.n:
        if N % 2 == 0 or not 3 <= N <= physoracle.MAX_QUBITS:
            raise UsageError(f"--n entries must be odd and in [3, {physoracle.MAX_QUBITS}], got {N}")
    if args.grid < 1:
        raise UsageError("--grid must be >= 1")
    rows = oracle_grid(args.n, args.grid, args.eps_max, args.q_max)
    worst = max(r[3] for r in rows)
    emit(["n", "epsilon", "q", "max_deviation"], rows, args.format, args.output)
    ok = worst <= args.tol
    print(f"oracle-check: max deviation {worst:.3e} (tol {args.tol:.1e}) {'PASS' if ok else 'FAIL'}",
          file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_zz_check(args) -> int:
    if args.n_max % 2 == 0 or not 3 <= args.n_max <= physoracle.MAX_COMBINATORIAL_QUBITS:
        raise UsageError(f"--n-max must be odd and in [3, {physoracle.MAX_COMBINATORIAL_QUBITS}]")
    for N in args.fidelity_n:
        if N % 2 == 0 or not 3 <= N <= physoracle.MAX_QUBITS:
            raise UsageError(f"--fidelity-n entries must be odd and in [3, {physoracle.MAX_QUBITS}]")
    rows = []
    ok = True
    for N in range(3, args.n_max + 1, 2):
        bij = physoracle.even_support_bijection(N)
        ok &= bij
        rows.append([N, "bijection", "", 1.0 if bij else 0.0, bij])
    rng = np.random.default_rng(_seed(args))
    for N in args.fidelity_n:
        for trial in range(args.trials):
            couplings = physoracle.random_chain_couplings(N, rng, args.scale)
            _, fid = physoracle.xx_checks(N, couplings)
            passed = abs(1.0 - fid) <= args.tol
            ok &= passed
            rows.append([N, "fidelity", trial, fid, passed])
    emit(["n", "check", "trial", "value", "pass"], rows, args.format, args.output)
    print(f"zz-check: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_sweep(args) -> int:
    rows = []
    for d in args.d:
        for eps in np.linspace(args.eps_min, args.eps_max, args.eps_num):
            for q in np.linspace(args.q_min, args.q_max, args.q_num):
                p = ErrorParams(float(eps), float(q))
                bar = repcode.exact_logical_params(d, p)
                m = errchan.metrics(bar)
                rows.append([d, p.epsilon, p.q, bar.epsilon, bar.q, m.r, m.D, m.coherence_ratio])
    cols = ["d", "epsilon", "q", "epsilon_bar", "q_bar", "r_bar", "D_bar", "d_over_r_bar"]
    emit(cols, rows, args.format, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="repcoh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, d_list=False):
        if d_list:
            sp.add_argument("--d", type=_int_list, required=True, help="code distance(s), comma separated")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", "-o", default=None)

    def point(sp):
        sp.add_argument("--epsilon", type=float, required=True)
        sp.add_argument("--q", type=float, required=True)

    sp = sub.add_parser("recurse", help="per-level error parameters and coherence")
    common(sp, d_list=True)
    point(sp)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--mode", choices=("leading", "exact"), default="leading")
    sp.set_defaults(func=cmd_recurse)

    sp = sub.add_parser("metrics", help="r, D, D/r and failure predictions for one channel")
    common(sp)
    point(sp)
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("simulate", help="Monte Carlo failure curve with analytic overlays")
    common(sp)
    sp.add_argument("--d", type=int, required=True)
    point(sp)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--m-max", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--level", type=int, default=1)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--analytic", choices=("leading", "exact"), default="leading",
                    help="parameters used for the eq16/eq17 columns")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("oracle-check", help="closed-form block vs density-matrix tomography")
    common(sp)
    sp.add_argument("--n", type=_int_list, default=[3, 5])
    sp.add_argument("--grid", type=int, default=5)
    sp.add_argument("--eps-max", type=float, default=0.3)
    sp.add_argument("--q-max", type=float, default=0.1)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_oracle_check)

    sp = sub.add_parser("zz-check", help="XX-interaction syndrome bijection and tailored decoding")
    common(sp)
    sp.add_argument("--n-max", type=int, default=15)
    sp.add_argument("--fidelity-n", type=_int_list, default=[3, 5])
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--scale", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_zz_check)

    sp = sub.add_parser("sweep", help="exact one-level logical parameters over a grid")
    common(sp, d_list=True)
    sp.add_argument("--eps-min", type=float, default=0.0)
    sp.add_argument("--eps-max", type=float, default=0.3)
    sp.add_argument("--eps-num", type=int, default=7)
    sp.add_argument("--q-min", type=float, default=0.0)
    sp.add_argument("--q-max", type=float, default=0.1)
    sp.add_argument("--q-num", type=int, default=6)
    sp.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"repcoh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, TypeError) as exc:
        print(f"repcoh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

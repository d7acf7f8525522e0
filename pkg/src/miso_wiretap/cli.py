"""Command-line interface: ``solve``, ``scan-z``, ``sweep`` and ``validate``.

Exit codes: 0 success, 1 Monte-Carlo validation mismatch, 2 configuration
error, 3 solver did not reach a KKT point (output is still written).
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigError
from .fullcsi import default_grid, scan_cs_z
from .hermitian import Mode
from .kkt import multi_start_solve
from .rate import monte_carlo_rate

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
#: Q eigenvalues above this count towards its rank
RANK_TOL = 1e-6
MC_SIGMAS = 4.0


def fmt(x):
    """Locale-independent 9-significant-digit formatting."""
    return format(float(x), ".9g")


def solve_config(cfg, snr_db=None, threads=1):
    """Solve one configuration and return ``(record, report)``."""
    s = cfg.scenario(snr_db)
    sv = cfg.solver
    t0 = time.perf_counter()
    rep = multi_start_solve(s, n_starts=sv["n_starts"], seed=sv["seed"], beta=sv["beta"],
                            max_iters=sv["max_iters"], tol=sv["tol"], threads=threads)
    wall = time.perf_counter() - t0
    echo = dict(cfg.data)
    if snr_db is not None:
        echo["snr_db"] = float(snr_db)
    record = {
        "scenario": echo,
        "rho": s.rho,
        "rate_nats": rep.rate,
        "rate_bits": rep.rate / math.log(2.0),
        "q_eigenvalues": list(rep.q_eigenvalues),
        "theta_eigenvalues": list(rep.theta_spectrum),
        "trace_q_theta": rep.trace_q_theta,
        "kkt_residuals": {
            "commutator": rep.commutator_residual,
            "eigen_eq": rep.eigen_eq_residual,
            "lambda_max_gap": rep.lambda_max_gap,
        },
        "iterations": rep.iterations,
        "converged": rep.converged,
        "reason": rep.reason,
        "all_rates": list(rep.all_rates),
        "wall_time": wall,
    }
    return record, rep


def dump_record(record):
    return json.dumps(record, sort_keys=True, indent=2) + "\n"


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([v if isinstance(v, (int, str)) else fmt(v) for v in r])
    return buf.getvalue()


def _load(args):
    cfg = ScenarioConfig.load(args.config)
    if args.seed is not None:
        cfg = cfg.override_seed(args.seed)
    return cfg


def cmd_solve(args):
    cfg = _load(args)
    record, rep = solve_config(cfg, threads=args.threads)
    _write(args.out, dump_record(record))
    if args.trace:
        _write(args.trace, _csv(["iter", "rate_nats"], list(enumerate(rep.rate_trace))))
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_scan_z(args):
    cfg = _load(args)
    if cfg.mode is not Mode.FULL_CSI:
        raise ConfigError("scan-z needs mode 'full_csi'", field="mode")
    try:
        grid = default_grid(args.grid_step)
    except ValueError as exc:
        raise ConfigError(str(exc), field="grid-step") from exc
    res = scan_cs_z(cfg.scenario(), grid)
    rows = [(z, p, r) for (z, r), p in zip(res.grid, res.phi_values)]
    _write(args.out, _csv(["z", "phi_z", "rate_nats"], rows))
    print(f"best z={fmt(res.best_z)} rate_nats={fmt(res.best_rate)} "
          f"rate_bits={fmt(res.best_rate / math.log(2.0))}", file=sys.stderr)
    return EXIT_OK


def _parse_values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--values must be a comma-separated list of numbers: {exc}",
                          field="values") from exc
    if not vals:
        raise ConfigError("--values is empty", field="values")
    return vals


def cmd_sweep(args):
    cfg = _load(args)
    values = _parse_values(args.values)
    cfgs = [cfg.with_param(args.param, v) for v in values]
    for c in cfgs:  # surface config errors before spending time on solves
        c.scenario(c.snr_values()[0])

    def run(c):
        return solve_config(c, c.snr_values()[0] if isinstance(c.data["snr_db"], list) else None)

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(run, cfgs))
    rows, ok = [], True
    for v, (rec, rep) in zip(values, results):
        rank = int(np.count_nonzero(np.asarray(rep.q_eigenvalues) > RANK_TOL))
        rows.append((v, rep.rate, rec["rate_bits"], rank, rep.trace_q_theta))
        ok = ok and rep.converged
    _write(args.out, _csv(["param_value", "rate_nats", "rate_bits", "rank_q", "trace_q_theta"], rows))
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_validate(args):
    cfg = _load(args)
    record, rep = solve_config(cfg, threads=args.threads)
    n = args.samples if args.samples is not None else cfg.mc["n_samples"]
    if n < 1000:
        raise ConfigError("need at least 1000 samples", field="samples")
    mc = monte_carlo_rate(cfg.scenario(), rep.q_opt, n, seed=cfg.mc["seed"])
    diff = rep.rate - mc.estimate
    passed = abs(diff) <= MC_SIGMAS * mc.std_error
    report = {
        "closed_form_nats": rep.rate,
        "mc_estimate_nats": mc.estimate,
        "mc_std_error": mc.std_error,
        "n_samples": n,
        "z_score": diff / mc.std_error if mc.std_error > 0 else 0.0,
        "threshold_sigmas": MC_SIGMAS,
        "pass": bool(passed),
        "converged": rep.converged,
    }
    _write(args.out, json.dumps(report, sort_keys=True, indent=2) + "\n")
    if not rep.converged:
        return EXIT_NOT_CONVERGED
    return EXIT_OK if passed else EXIT_MISMATCH


def build_parser():
    p = argparse.ArgumentParser(prog="miso-wiretap",
                                description="Optimal transmit covariance for the MISO wiretap channel.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, help="JSON scenario file")
        sp.add_argument("--out", default=None, help="output file (default stdout)")
        sp.add_argument("--seed", type=int, default=None, help="override every seed in the config")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    sp = sub.add_parser("solve", help="find a KKT-optimal input covariance")
    common(sp)
    sp.add_argument("--trace", default=None, help="write per-iteration rates as CSV")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("scan-z", help="scan the full-CSI rate over the alignment z")
    common(sp)
    sp.add_argument("--grid-step", type=float, default=0.01)
    sp.set_defaults(func=cmd_scan_z)

    sp = sub.add_parser("sweep", help="solve over a list of parameter values")
    common(sp)
    sp.add_argument("--param", required=True, choices=["snr_db", "phi_R", "phi_E"])
    sp.add_argument("--values", required=True, help="comma-separated values")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="cross-check the solved rate by Monte Carlo")
    common(sp)
    sp.add_argument("--samples", type=int, default=None)
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``entroland run | compare | verify``.

Exit codes: 0 success, 1 verification failure, 2 configuration or input
error, 3 solver abort (the partial trace is still written).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .experiments import ConfigError, build_problem, load_spec
from .solvers import (
    METHODS,
    APriori,
    Discrepancy,
    MaxIter,
    SolverAbort,
    SolverConfig,
    check_monotonicity,
    read_sidecar,
    read_trace,
    run,
    write_sidecar,
    write_trace,
)

log = logging.getLogger("entroland")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_ABORT = 0, 1, 2, 3


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ENTROLAND_THREADS", "1")))
    except ValueError:
        return 1


def _stop_rule(kind, spec, problem, max_iter):
    if kind == "maxiter":
        return MaxIter(max_iter)
    if problem.delta <= 0:
        raise ConfigError(f"--stop {kind} needs noisy data (sigma > 0)")
    if kind == "discrepancy":
        return Discrepancy(spec.tau_disc, problem.delta)
    return APriori(spec.c_ap, problem.delta)


def _run_one(method, problem, spec, stop, cfg, out_dir):
    stem = out_dir / f"{spec.name}_{method}"
    code, trace, result, message = EXIT_OK, None, None, ""
    try:
        result = run(problem, method, stop, cfg, blocks=spec.blocks)
        trace = result.trace
    except SolverAbort as exc:
        code, trace, message = EXIT_ABORT, exc.trace, str(exc)
    except ValueError as exc:  # method not applicable to this operator
        code, trace, message = EXIT_ABORT, [], str(exc)
    resolved = cfg.resolve(problem.op)
    if method == "entropic":
        resolved = replace(resolved, m=0)
    elif method == "entropic-prob":
        resolved = replace(resolved, m=1)
    meta = {
        "problem": spec.name,
        "method": method,
        "m": resolved.m,
        "lambda": resolved.lam,
        "c": resolved.c,
        "tau": resolved.tau,
        "tau_pl": resolved.tau_pl,
        "delta": problem.delta,
        "sigma": problem.meta["sigma"],
        "seed": problem.meta["seed"],
        "block_seed": resolved.seed,
        "blocks": spec.blocks if method == "entropic-stochastic" else None,
        "operator": problem.op.describe(),
        "truth": spec.truth,
        "u0": float(problem.u0[0]),
        "stop_rule": type(stop).__name__,
        "stop_reason": result.stop_reason if result else "abort",
        "k_star": result.k_star if result else (trace[-1].k if trace else None),
        "error": message or None,
        "noise_model": spec.noise_model,
    }
    write_trace(stem.with_suffix(".csv"), trace)
    write_sidecar(stem.with_suffix(".json"), meta)
    return code, meta, trace


def cmd_run(args) -> int:
    try:
        spec = load_spec(args.config)
        overrides = {}
        if args.lam is not None:
            overrides["lambda_step"] = args.lam
        if args.tau_disc is not None:
            overrides["tau_disc"] = args.tau_disc
        if args.blocks is not None:
            overrides["blocks"] = args.blocks
        if args.max_iter is not None:
            overrides["max_iter"] = args.max_iter
        if args.stop is not None:
            overrides["stop"] = args.stop
        spec = replace(spec, **overrides)
        problem = build_problem(spec, sigma=args.sigma, seed=args.seed)
        cfg = SolverConfig(m=spec.m, lam=spec.lambda_step, max_iter=spec.max_iter,
                           tau=spec.tau_disc, c_ap=spec.c_ap, seed=spec.block_seed)
        stop = _stop_rule(spec.stop, spec, problem, spec.max_iter)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    methods = args.method or ["entropic-prob" if spec.m == 1 else "entropic"]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(
            lambda m: _run_one(m, problem, spec, stop, cfg, out_dir), methods))
    code = EXIT_OK
    for method, (rc, meta, trace) in zip(methods, results):
        if rc != EXIT_OK:
            print(f"{method}: aborted ({meta['error']})", file=sys.stderr)
            code = max(code, rc)
            continue
        last = trace[-1]
        l1 = "n/a" if last.l1_error is None else f"{last.l1_error:.6e}"
        print(f"{method}: k*={meta['k_star']} stop={meta['stop_reason']} "
              f"residual={last.residual:.6e} l1_error={l1}")
    return code


def cmd_compare(args) -> int:
    columns, problems = [], set()
    try:
        for path in args.traces:
            path = Path(path)
            trace = read_trace(path)
            side = path.with_suffix(".json")
            meta = read_sidecar(side) if side.exists() else {}
            problems.add(meta.get("problem"))
            name = meta.get("method", path.stem)
            if any(name == c[0] for c in columns):
                name = path.stem
            columns.append((name, {r.k: r.l1_error for r in trace}))
    except (OSError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    problems.discard(None)
    if len(problems) > 1:
        print(f"traces come from different problems: {sorted(problems)}", file=sys.stderr)
        return EXIT_CONFIG
    ks = sorted(set().union(*(c[1] for c in columns)))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["k"] + [f"l1_error_{name}" for name, _ in columns])
        for k in ks:
            row = [k]
            for _, vals in columns:
                v = vals.get(k)
                row.append("" if v is None else repr(v))
            w.writerow(row)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    path = Path(args.trace)
    side = Path(args.sidecar) if args.sidecar else path.with_suffix(".json")
    try:
        trace = read_trace(path)
        meta = read_sidecar(side) if side.exists() else {}
        delta = float(args.delta if args.delta is not None else meta.get("delta", 0.0))
        report = check_monotonicity(trace, delta, rtol=args.rtol)
    except (OSError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if report.ok:
        print(f"ok: {len(trace)} iterates, delta={delta:.6e}, checks {report.checked}")
        return EXIT_OK
    v = report.first
    print(f"violation at k={v.k}: {v}")
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entroland",
                                description="Entropic Landweber experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run methods on a problem config")
    r.add_argument("--config", required=True,
                   help="JSON config path or bundled name (e.g. kernel1)")
    r.add_argument("--method", action="append", choices=METHODS)
    r.add_argument("--stop", choices=("discrepancy", "apriori", "maxiter"))
    r.add_argument("--max-iter", type=int, dest="max_iter")
    r.add_argument("--lambda", type=float, dest="lam")
    r.add_argument("--tau-disc", type=float, dest="tau_disc")
    r.add_argument("--sigma", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--blocks", type=int)
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="merge L1 error columns of several traces")
    c.add_argument("traces", nargs="+")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("verify", help="check monotonicity inequalities on a trace")
    v.add_argument("trace")
    v.add_argument("--sidecar")
    v.add_argument("--delta", type=float)
    v.add_argument("--rtol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

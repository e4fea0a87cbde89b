"""Command-line harness.

  copredict run --input inst.jsonl --out-dir out [--robust | --baseline-only]
                [--round] [--budget N] [--seed S] [--quiet-report] [--no-figures]
  copredict gen --out inst.jsonl (--lower-bound K T SEED | --setcover S E SEED |
                --caching-trace P R SEED | --facloc F C SEED) [--k K]

Exit codes: 0 ok, 1 bound or ledger violation, 2 schema/parameter error,
3 engine error. Diagnostics go to stderr; stdout stays silent unless
--quiet-report prints the JSON report there.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys
from pathlib import Path

from . import facility, setcover
from .benchmarks import DEFAULT_BUDGET
from .caching import CacheModel
from .errors import CopredictError, MetricError, SchemaError
from .predictors import gen_lower_bound
from .runner import run_instance, trace_csv_rows
from .stream import StreamInstance, StreamStep, canonical_json, dump_instance, load_instance


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="copredict")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an instance stream and verify it")
    run_p.add_argument("--input", required=True, help="JSONL instance file")
    run_p.add_argument("--out-dir", default="out", help="artifact directory")
    run_p.add_argument("--seed", type=int, default=None,
                       help="rounding seed (default: $COPREDICT_SEED, then 0)")
    run_p.add_argument("--robust", action="store_true",
                       help="run the two-path robust meta-algorithm")
    run_p.add_argument("--baseline-only", action="store_true",
                       help="ignore suggestions, run the 1/d baseline")
    run_p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="max choice sequences for the exact DYNAMIC oracle")
    run_p.add_argument("--round", action="store_true",
                       help="round a setcover fractional stream online")
    run_p.add_argument("--rel-tol", type=float, default=1e-6)
    run_p.add_argument("--abs-tol", type=float, default=1e-9)
    run_p.add_argument("--quiet-report", action="store_true",
                       help="print the JSON report to stdout")
    run_p.add_argument("--no-figures", action="store_true",
                       help="skip figure rendering")

    gen_p = sub.add_parser("gen", help="generate an instance stream")
    gen_p.add_argument("--out", required=True)
    gen_p.add_argument("--k", type=int, default=2, help="suggestions per step")
    gen_p.add_argument("--cache-size", type=int, default=2)
    gen_p.add_argument("--frequency", type=int, default=4,
                       help="setcover: max sets containing an element")
    which = gen_p.add_mutually_exclusive_group(required=True)
    which.add_argument("--lower-bound", nargs=3, type=int, metavar=("K", "T", "SEED"))
    which.add_argument("--setcover", nargs=3, type=int, metavar=("SETS", "ELEMENTS", "SEED"))
    which.add_argument("--caching-trace", nargs=3, type=int,
                       metavar=("PAGES", "REQUESTS", "SEED"))
    which.add_argument("--facloc", nargs=3, type=int,
                       metavar=("FACILITIES", "CLIENTS", "SEED"))
    return parser


def cmd_run(args) -> int:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("COPREDICT_SEED", "0"))
    try:
        inst = load_instance(args.input)
    except FileNotFoundError:
        print(f"error: no such file: {args.input}", file=sys.stderr)
        return 2
    except (SchemaError, ValueError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2

    try:
        result = run_instance(inst, robust=args.robust, baseline_only=args.baseline_only,
                              budget=args.budget, rel_tol=args.rel_tol,
                              abs_tol=args.abs_tol, do_round=args.round, seed=seed)
    except (SchemaError, MetricError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except CopredictError as exc:
        print(f"engine error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem

    rows = trace_csv_rows(result)
    with open(out_dir / f"{stem}_trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "phase", "duration", "internal_cost_cum",
                         "potential", "event_kind"])
        writer.writerows(rows)

    report = result.report()
    (out_dir / f"{stem}_report.json").write_text(canonical_json(report) + "\n")

    if not args.no_figures:
        from .plots import render_run_figures
        render_run_figures(result, rows, out_dir, stem)

    if args.quiet_report:
        print(canonical_json(report))

    if result.certificate is not None:
        dyn = f"dynamic {result.certificate.cost:.6g}"
    else:
        dyn = f"dynamic <= {result.dynamic_upper_bound:.6g} (budget exceeded)"
    print(f"output cost {result.output_cost:.6g}; static {result.static_cost:.6g}; {dyn}",
          file=sys.stderr)
    if result.violated:
        print("verification FAILED; see report", file=sys.stderr)
        return 1
    return 0


def _gen_lower_bound(k: int, rounds_length: int, seed: int) -> StreamInstance:
    constraints, suggestions, n = gen_lower_bound(k, rounds_length, seed)
    steps = [StreamStep(list(c.coeffs), [sorted(s.items()) for s in slots])
             for c, slots in zip(constraints, suggestions)]
    extra = {"family": "lower-bound", "rounds": k, "round_length": rounds_length,
             "seed": seed}
    return StreamInstance("covering", n, k, [1.0] * n, steps, extra)


def _gen_setcover(n_sets: int, n_elements: int, seed: int, k: int,
                  max_frequency: int = 4) -> StreamInstance:
    rng = random.Random(seed)
    inst = setcover.random_instance(n_sets, n_elements, rng, max_frequency)
    steps = []
    for t, members in enumerate(inst.memberships):
        constraint = setcover.setcover_constraint(members, t)
        slots = [[(rng.choice(members), 1.0)] for _ in range(k)]
        steps.append(StreamStep(list(constraint.coeffs), slots))
    extra = {"family": "setcover", "m_bound": inst.m_bound,
             "memberships": [list(m) for m in inst.memberships], "seed": seed}
    return StreamInstance("setcover", n_sets, k, list(inst.weights), steps, extra)


def _gen_caching(n_pages: int, n_requests: int, seed: int, k: int,
                 cache_size: int) -> StreamInstance:
    rng = random.Random(seed)
    pages = [f"p{i}" for i in range(n_pages)]
    weights = {p: rng.uniform(0.5, 2.0) for p in pages}
    first_pass = pages[:]
    rng.shuffle(first_pass)
    requests = (first_pass + [rng.choice(pages) for _ in range(n_requests)])[:n_requests]

    model = CacheModel(weights, cache_size)
    steps = []
    for page in requests:
        constraint = model.request(page)
        if constraint is None:
            continue
        support = list(constraint.support)
        need = max(1, round(1.0 / constraint.coeffs[0][1]))  # |B| - h evictions
        slots = []
        for _ in range(k):
            chosen = sorted(rng.sample(support, min(need, len(support))))
            slots.append([(i, 1.0) for i in chosen])
        steps.append(StreamStep(list(constraint.coeffs), slots))
    extra = {"family": "caching", "cache_size": cache_size,
             "page_weights": [[p, weights[p]] for p in pages],
             "requests": requests,
             "variables": [[p, r] for p, r in model.var_names], "seed": seed}
    return StreamInstance("caching", len(model.var_costs), k,
                          list(model.var_costs), steps, extra)


def _gen_facloc(n_facilities: int, n_clients: int, seed: int, k: int) -> StreamInstance:
    rng = random.Random(seed)
    inst = facility.random_instance(n_facilities, n_clients, rng)
    steps = []
    for t in range(n_clients):
        constraint, d = facility.client_step(inst, t)
        slots = []
        for _ in range(k):
            fac = rng.randrange(n_facilities)
            slots.append({"x": [(fac, 1.0)], "y": [(fac, 1.0)]})
        steps.append(StreamStep(list(constraint.coeffs), slots,
                                sorted(d.items())))
    extra = {"family": "facloc", "dist": inst.dist, "clients": inst.clients,
             "seed": seed}
    return StreamInstance("facloc", n_facilities, k, list(inst.opening_costs),
                          steps, extra)


def cmd_gen(args) -> int:
    if args.k < 1:
        print(f"error: --k must be >= 1, got {args.k}", file=sys.stderr)
        return 2
    try:
        if args.lower_bound is not None:
            k, t, seed = args.lower_bound
            inst = _gen_lower_bound(k, t, seed)
        elif args.setcover is not None:
            n_sets, n_elements, seed = args.setcover
            if n_sets < 1 or n_elements < 0:
                raise ValueError("need at least one set and nonnegative elements")
            if args.frequency < 1:
                raise ValueError("--frequency must be at least 1")
            inst = _gen_setcover(n_sets, n_elements, seed, args.k, args.frequency)
        elif args.caching_trace is not None:
            n_pages, n_requests, seed = args.caching_trace
            if n_pages < 1 or n_requests < 0:
                raise ValueError("need at least one page and nonnegative requests")
            inst = _gen_caching(n_pages, n_requests, seed, args.k, args.cache_size)
        else:
            n_fac, n_clients, seed = args.facloc
            if n_fac < 1 or n_clients < 0:
                raise ValueError("need at least one facility and nonnegative clients")
            inst = _gen_facloc(n_fac, n_clients, seed, args.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    dump_instance(inst, args.out)
    print(f"wrote {args.out}: kind={inst.kind} n={inst.n} k={inst.k} "
          f"steps={len(inst.steps)}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_gen(args)


if __name__ == "__main__":
    sys.exit(main())

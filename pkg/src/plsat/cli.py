"""Command-line interface: ``plsat gen|certify|solve|bound|degrees|witness|sweep``."""
from __future__ import annotations

import argparse
import contextlib
import sys
from pathlib import Path

from . import __version__, bounds, kernels
from .analysis import degree_report, find_trivial_core
from .cnf import Status
from .harness import SweepConfig, run_sweep, write_outputs
from .sampler import read_dimacs, sample_formula, write_dimacs
from .solvers import SOLVER_ENV, solve_complete, solve_external
from .twosat import certify_by_shrinking
from .weights import build_concrete, distribution, read_weights, uniform, write_weights


def _open_out(path):
    return contextlib.nullcontext(sys.stdout) if path in (None, "-") else open(path, "w")


def _read_formula(path, strict_k=None):
    with open(path) as fh:
        return read_dimacs(fh, strict_k=strict_k)


def _write_assignment(path, assignment):
    with open(path, "w") as fh:
        for i, v in enumerate(assignment, 1):
            fh.write(f"v{i} {int(bool(v))}\n")


def cmd_gen(args):
    if args.weights_in:
        with open(args.weights_in) as fh:
            ws = read_weights(fh)
        if ws.n != args.n:
            raise SystemExit(f"weights file has n = {ws.n}, --n is {args.n}")
        model = {"weights": "file", "path": str(args.weights_in), "beta": ws.beta}
    elif args.uniform:
        ws = uniform(args.n)
        model = {"weights": "uniform"}
    elif args.beta is not None:
        ws = build_concrete(args.n, args.beta)
        model = {"weights": "concrete", "beta": args.beta}
    else:
        raise SystemExit("choose one of --beta, --uniform, --weights-in")
    if (args.m is None) == (args.ratio is None):
        raise SystemExit("give exactly one of --m and --ratio")
    m = args.m if args.m is not None else int(round(args.ratio * args.n))
    model.update(n=args.n, m=m)
    f, stats = sample_formula(distribution(ws), m, args.k, args.seed, workers=args.workers, model=model)
    with _open_out(args.out) as fh:
        write_dimacs(f, fh)
    if args.weights_out:
        with open(args.weights_out, "w") as fh:
            write_weights(ws, fh)
    print(f"c n={f.n} m={f.m} k={f.k} attempts={stats.attempts} rejections={stats.rejections}",
          file=sys.stderr)


def cmd_certify(args):
    f = _read_formula(args.input)
    with open(args.weights_in) as fh:
        ws = read_weights(fh)
    cert = certify_by_shrinking(f, ws)
    print(f"s {cert.status.value} ({cert.reason.value})")
    if cert.status is Status.SAT and args.emit_assignment:
        _write_assignment(args.emit_assignment, cert.assignment)
    return 0 if cert.status is Status.SAT else 1


def cmd_solve(args):
    f = _read_formula(args.input)
    if args.external is not None:
        out = solve_external(f, args.external or None, args.budget_ms)
    else:
        ws = None
        if args.weights_in:
            with open(args.weights_in) as fh:
                ws = read_weights(fh)
        out = solve_complete(f, args.budget_nodes, ws=ws, heuristic=args.branching)
    print("s " + {Status.SAT: "SATISFIABLE", Status.UNSAT: "UNSATISFIABLE"}.get(out.status, "UNKNOWN"))
    print(f"c decisions={out.stats.decisions} propagations={out.stats.propagations} "
          f"wall_ms={out.stats.wall_ms:.3f} {out.detail}".rstrip())
    if out.status is Status.SAT:
        if args.emit_assignment:
            _write_assignment(args.emit_assignment, out.assignment)
        print("v " + " ".join(str(i if v else -i) for i, v in enumerate(out.assignment, 1)) + " 0")
        return 10
    return 20 if out.status is Status.UNSAT else 0


def cmd_bound(args):
    if args.action == "table":
        rows = bounds.threshold_table(args.tol, workers=args.workers)
        with _open_out(args.out) as fh:
            bounds.write_table_csv(rows, fh)
        return 0
    if args.k is None:
        raise SystemExit("--k is required")
    mode = bounds.Mode.BUCKETS if args.buckets else bounds.Mode.INTEGRAL
    if args.p_in:
        import numpy as np

        p = np.loadtxt(args.p_in, dtype=float, ndmin=1)
        q = bounds.BoundQuery(args.k, p=p / p.sum())
    elif args.uniform:
        q = bounds.BoundQuery(args.k, uniform=True)
    elif args.beta is not None:
        q = bounds.BoundQuery(args.k, beta=args.beta, buckets=args.buckets, mode=mode)
    else:
        raise SystemExit("choose one of --beta, --uniform, --p-in")
    print(f"first-moment bound: {bounds.first_moment_threshold(args.k):.6f}")
    try:
        res = bounds.threshold(q, args.tol)
    except bounds.NeverSatisfied as exc:
        print(str(exc))
        print(f"beta threshold (2k-1)/(k-1) = {bounds.beta_threshold(args.k):.6f}")
        return 1
    print(f"r* = {res.r_star:.6f}  (mode={res.meta['mode']}, bracket=[{res.meta['bracket'][0]:.6f}, "
          f"{res.meta['bracket'][1]:.6f}])")
    return 0


def cmd_degrees(args):
    f = _read_formula(args.input)
    rep = degree_report(f, args.dmin, args.dmax, beta=args.beta)
    print(f"slope = {rep.slope:.4f} on d in [{rep.d_min:g}, {rep.d_max:g}] (expected {1 - args.beta:.4f})")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("d,n_at_least\n")
            for d, c in rep.rows():
                fh.write(f"{d},{c}\n")


def cmd_witness(args):
    f = _read_formula(args.input)
    w = find_trivial_core(f)
    if w is None:
        print("no trivial core")
        return 1
    print("trivial core on variables " + " ".join(map(str, w.varset)))
    print("clauses " + " ".join(str(i + 1) for i in w.clause_ids))
    return 0


def cmd_sweep(args):
    text = Path(args.config).read_text() if args.config else ""
    overrides = dict(kv.split("=", 1) for kv in args.set)
    cfg = SweepConfig.from_text(text, {k.strip(): v.strip() for k, v in overrides.items()})
    cells = run_sweep(cfg)
    out = write_outputs(cfg, cells, args.out)
    print(f"{len(cells)} cells written to {out}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plsat", description=__doc__)
    ap.add_argument("--version", action="version",
                    version=f"plsat {__version__} ({kernels.BACKEND} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a random k-SAT formula")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--ratio", type=float)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--beta", type=float)
    g.add_argument("--uniform", action="store_true")
    g.add_argument("--weights-in")
    g.add_argument("--weights-out")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("certify", help="clause shrinking + 2-SAT certificate")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--weights-in", required=True)
    c.add_argument("--emit-assignment")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("solve", help="complete solve (internal DPLL or external command)")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--external", nargs="?", const="", default=None,
                   help=f"command template with {{in}}/{{out}}; bare flag uses ${SOLVER_ENV}")
    s.add_argument("--budget-ms", type=float, help="wall-clock limit for the external solver")
    s.add_argument("--budget-nodes", type=int, help="decision limit for the internal solver")
    s.add_argument("--weights-in")
    s.add_argument("--branching", choices=("weight", "index"), default="weight")
    s.add_argument("--emit-assignment")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bound", help="single-flip threshold densities")
    b.add_argument("action", nargs="?", choices=("table",))
    b.add_argument("--k", type=int)
    b.add_argument("--beta", type=float)
    b.add_argument("--uniform", action="store_true")
    b.add_argument("--p-in")
    b.add_argument("--buckets", type=int)
    b.add_argument("--integral", action="store_true", help="N -> infinity limit (default)")
    b.add_argument("--tol", type=float, default=1e-4)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    d = sub.add_parser("degrees", help="occurrence-degree tail and log-log slope")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--beta", type=float, required=True)
    d.add_argument("--dmin", type=float, default=5)
    d.add_argument("--dmax", type=float)
    d.add_argument("--csv")
    d.set_defaults(func=cmd_degrees)

    w = sub.add_parser("witness", help="look for a trivial unsatisfiable core")
    w.add_argument("--in", dest="input", required=True)
    w.set_defaults(func=cmd_witness)

    sw = sub.add_parser("sweep", help="run a (beta, r) phase-diagram sweep")
    sw.add_argument("--config")
    sw.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    sw.add_argument("--out", required=True)
    sw.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "buckets", None) and getattr(args, "integral", False):
        raise SystemExit("--buckets and --integral are exclusive")
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())

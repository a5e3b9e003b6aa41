"""Compare the compiled and pure-Python kernels on the three hot paths.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Reports the best-of-N wall time per kernel and the speedup.
"""
import argparse
import time

import numpy as np

from plsat import kernels
from plsat.cnf import Formula
from plsat.twosat import ImplicationGraph, shrink
from plsat.weights import build_concrete, distribution


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(quick):
    n = 10 ** 4 if quick else 10 ** 5
    ws = build_concrete(n, 2.5)
    p = distribution(ws).p
    ref = kernels.get("pure")
    prob, alias = ref.build_alias(p)
    m = 3 * n
    lits, _ = ref.sample_clauses(prob, alias, m, 3, 1, 0)
    f = Formula(n, 3, np.asarray(lits).reshape(m, 3))
    g = ImplicationGraph(shrink(f, ws))
    # DPLL on a small hard-ish uniform instance near the 3-SAT threshold
    dn = 60 if quick else 120
    dp = np.full(dn, 1.0 / dn)
    dprob, dalias = ref.build_alias(dp)
    dl, _ = ref.sample_clauses(dprob, dalias, int(4.26 * dn), 3, 2, 0)
    order = np.arange(dn, 0, -1)
    return {
        f"alias n={n}": lambda b: b.build_alias(p),
        f"sample m={m} k=3": lambda b: b.sample_clauses(prob, alias, m, 3, 1, 0),
        f"scc 2n={g.num_nodes}": lambda b: b.scc(g.num_nodes, g.indptr, g.indices),
        f"dpll n={dn} r=4.26": lambda b: b.dpll(dn, np.asarray(dl).ravel(), 3, order, 0, -1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    names = kernels.available()
    if "compiled" not in names:
        print("compiled kernels not built; only the pure backend is available")
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(args.quick).items():
        times = {b: best_of(lambda: fn(kernels.get(b)), args.repeat) for b in names}
        row = f"{label:<24}" + "".join(f"{times[b] * 1e3:>10.1f}ms" for b in names)
        if len(names) > 1:
            row += f"{times['pure'] / times['compiled']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()

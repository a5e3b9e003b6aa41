"""Conformant external solver backed by pysat's MiniSat: ``pysat_solver.py IN [OUT]``.

Prints competition-style ``s``/``v`` lines; with OUT also writes MiniSat's result file.
"""
import sys

from pysat.formula import CNF
from pysat.solvers import Minisat22

cnf = CNF(from_file=sys.argv[1])
with Minisat22(bootstrap_with=cnf.clauses) as s:
    ok = s.solve()
    model = s.get_model() if ok else None
print("s SATISFIABLE" if ok else "s UNSATISFIABLE")
if ok:
    print("v " + " ".join(map(str, model)) + " 0")
if len(sys.argv) > 2:
    with open(sys.argv[2], "w") as fh:
        fh.write("SAT\n" + " ".join(map(str, model)) + " 0\n" if ok else "UNSAT\n")
sys.exit(10 if ok else 20)

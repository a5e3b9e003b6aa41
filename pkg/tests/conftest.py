import itertools
import sys
from pathlib import Path

import numpy as np
import pytest

from plsat import kernels
from plsat.cnf import Formula

SHIMS = Path(__file__).parent / "shims"


@pytest.fixture(params=kernels.available())
def backend(request):
    return kernels.get(request.param)


def shim_cmd(name, *extra):
    return " ".join([sys.executable, str(SHIMS / name), *extra])


def random_formula(rng, n, m, k):
    rows = []
    for _ in range(m):
        vs = rng.choice(n, size=k, replace=False) + 1
        signs = rng.choice([-1, 1], size=k)
        rows.append(vs * signs)
    return Formula.from_clauses(n, rows, k=k)


def all_sign_patterns(varset):
    return [tuple(v if s else -v for v, s in zip(varset, bits))
            for bits in itertools.product([True, False], repeat=len(varset))]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])

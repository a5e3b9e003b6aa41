"""Single-flip unsatisfiability bounds and threshold densities.

All left-hand sides are evaluated in log space.  The condition for
unsatisfiability (w.h.p., as n grows) is ``lhs(r) < 1``; the threshold is
the smallest density where that happens.

Two evaluations of the power-law bound are offered.  ``BUCKETS`` splits
the variables into ``N`` equal buckets and evaluates the finite product
exactly.  ``INTEGRAL`` takes ``N -> inf``, where the bucket average becomes

    integral_0^1 log(2 - exp(-r c t**(-1/(beta-1)))) dt,
    c = k/(2^k - 1) * (beta - 2)/(beta - 1),

computed by adaptive quadrature.  Near ``t -> 0`` the exponential
underflows and the integrand tends to ``log 2`` smoothly, so no
substitution is needed; the integrand is evaluated as
``log1p(-expm1(-x))`` to keep precision when ``x`` is small.

The ``(1 + o(1))`` factors of the asymptotic statements are dropped, so
the numbers are limit values independent of ``n``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

QUAD_TOL = 1e-9


class BoundError(ValueError):
    pass


class NeverSatisfied(BoundError):
    """No finite threshold: formulas are unsatisfiable at every constant density."""


class Mode(enum.Enum):
    BUCKETS = "buckets"
    INTEGRAL = "integral"


@dataclass(frozen=True)
class BoundQuery:
    """Threshold query.  Exactly one of ``beta``, ``p`` or ``uniform`` describes the model."""

    k: int
    beta: float | None = None
    p: np.ndarray | None = None
    uniform: bool = False
    buckets: int | None = None
    mode: Mode = Mode.INTEGRAL

    def __post_init__(self):
        if self.k < 2:
            raise BoundError("k must be at least 2")
        chosen = (self.beta is not None) + (self.p is not None) + bool(self.uniform)
        if chosen != 1:
            raise BoundError("give exactly one of beta, p, uniform")
        if self.beta is not None and not self.beta > 2:
            raise BoundError(f"power-law bound needs beta > 2, got {self.beta}")
        if self.mode is Mode.BUCKETS and (self.buckets is None or self.buckets < 2):
            raise BoundError("bucket mode needs buckets >= 2")

    @property
    def model(self) -> str:
        if self.beta is not None:
            return "powerlaw"
        return "explicit" if self.p is not None else "uniform"

    def lhs(self, r: float) -> float:
        if self.model == "powerlaw":
            return lhs_powerlaw(self.beta, self.k, r, self.buckets, self.mode)
        if self.model == "uniform":
            return lhs_uniform(self.k, r)
        n = self.p.shape[0]
        return lhs_general(self.p, self.k, r * n, n)


@dataclass
class BoundResult:
    r_star: float
    lhs_at: Callable[[float], float]
    meta: dict = field(default_factory=dict)


def first_moment_threshold(k: int) -> float:
    """Density above which the expected number of models vanishes."""
    if k < 1:
        raise BoundError("k must be at least 1")
    return math.log(2) / math.log(2 ** k / (2 ** k - 1))


def beta_threshold(k: int) -> float:
    """Exponent ``(2k-1)/(k-1)`` separating the trivially unsatisfiable regime."""
    if k < 2:
        raise BoundError("k must be at least 2")
    return (2 * k - 1) / (k - 1)


def _prefactor(k: int, r: float) -> float:
    return r * math.log1p(-2.0 ** -k)


def log_lhs_general(p, k: int, m: float, n: int | None = None) -> float:
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0] if n is None else n
    damp = 1.0 - 0.5 * k * k * float(np.dot(p, p))
    if damp <= 0:
        raise BoundError(f"1 - k^2|p|^2/2 = {damp:g} <= 0")
    x = k * p / ((2 ** k - 1) * damp)
    if np.any(x > 1):
        i = int(np.argmax(x > 1))
        raise BoundError(f"flip probability bound {x[i]:g} > 1 at variable {i + 1}")
    # (1 - x)^m = exp(m log1p(-x)); clamp log1p(-1) = -inf to an exact 0 power
    with np.errstate(divide="ignore"):
        powm = np.exp(m * np.log1p(-x)) if m > 0 else np.ones_like(x)
    return _prefactor(k, m / n) + float(np.sum(np.log(2.0 - powm))) / n


def lhs_general(p, k: int, m: float, n: int | None = None) -> float:
    """Left-hand side of the single-flip condition for an explicit distribution ``p``."""
    return math.exp(log_lhs_general(p, k, m, n))


def lhs_uniform(k: int, r: float) -> float:
    """Closed form for ``|p|_2 -> 0``: ``(1-2^-k)^r (2 - exp(-k r/(2^k-1)))``."""
    return math.exp(_prefactor(k, r) + math.log(2.0 - math.exp(-k * r / (2 ** k - 1))))


def _flip_scale(beta: float, k: int) -> float:
    return k / (2 ** k - 1) * (beta - 2) / (beta - 1)


def _log_bracket(x):
    # log(2 - exp(-x)) without cancellation for small x
    return np.log1p(-np.expm1(-x))


def log_lhs_powerlaw(beta: float, k: int, r: float, buckets: int | None = None,
                     mode: Mode = Mode.INTEGRAL) -> float:
    if not beta > 2:
        raise BoundError(f"power-law bound needs beta > 2, got {beta}")
    c = r * _flip_scale(beta, k)
    a = 1.0 / (beta - 1.0)
    if mode is Mode.BUCKETS:
        if buckets is None or buckets < 2:
            raise BoundError("bucket mode needs buckets >= 2")
        N = int(buckets)
        l = np.arange(1, N, dtype=np.float64)
        inner = math.log(2.0) + float(np.sum(_log_bracket(c * (N / l) ** a)))
        return _prefactor(k, r) + inner / N
    if c == 0:
        return 0.0

    def integrand(t):
        return float(_log_bracket(c * t ** -a)) if t > 0 else math.log(2.0)

    # split where c t^-a = 1, around which the integrand turns over
    knee = min(max(c ** (1.0 / a), 1e-12), 1.0) if c < 1 else 1.0
    points = [knee] if 0 < knee < 1 else None
    val, err, info = integrate.quad(integrand, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=0,
                                    limit=200, points=points, full_output=1)[:3]
    if err > QUAD_TOL * 10:
        raise BoundError(f"quadrature did not converge: estimated error {err:g}")
    return _prefactor(k, r) + val


def lhs_powerlaw(beta: float, k: int, r: float, buckets: int | None = None,
                 mode: Mode = Mode.INTEGRAL) -> float:
    """Left-hand side of the bucketed power-law condition (or its ``N -> inf`` limit)."""
    return math.exp(log_lhs_powerlaw(beta, k, r, buckets, mode))


def bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float, max_iter: int = 200):
    """Root of ``fn`` on ``[lo, hi]`` with ``fn(lo) > 0 >= fn(hi)``; returns ``(lo, hi, iters)``."""
    it = 0
    while hi - lo > tol and it < max_iter:
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0:
            lo = mid
        else:
            hi = mid
        it += 1
    return lo, hi, it


def threshold(q: BoundQuery, tol: float = 1e-4, scan_step: float | None = None,
              respect_trivial_core: bool = True) -> BoundResult:
    """Smallest density ``r`` with ``lhs(r) < 1``.

    Scans upward on a grid (default step: first-moment bound / 50) up to the
    first-moment bound + 1, then bisects the first bracketing interval to
    ``tol``.  For power laws with ``beta < (2k-1)/(k-1)`` formulas are
    unsatisfiable at every constant density, so :class:`NeverSatisfied` is
    raised unless ``respect_trivial_core`` is false.
    """
    if q.model == "powerlaw" and respect_trivial_core and q.beta < beta_threshold(q.k) - 1e-12:
        raise NeverSatisfied(
            f"condition never satisfied: beta = {q.beta} < (2k-1)/(k-1) = {beta_threshold(q.k):.4f}; "
            "a trivial core makes the formula unsatisfiable at every constant density"
        )
    fm = first_moment_threshold(q.k)
    step = scan_step or fm / 50
    r_max = fm + 1.0

    def g(r):
        if q.model == "powerlaw":
            return log_lhs_powerlaw(q.beta, q.k, r, q.buckets, q.mode)
        return math.log(q.lhs(r))

    prev = step
    if g(prev) <= 0:
        raise BoundError("lhs already below 1 at the first scan point; reduce scan_step")
    r = prev
    while True:
        r = min(r + step, r_max)
        if g(r) < 0:
            break
        if r >= r_max:
            raise NeverSatisfied(f"condition never satisfied for r <= {r_max:g}")
        prev = r
    lo, hi, iters = bisect(g, prev, r, tol)
    meta = {"model": q.model, "mode": q.mode.value, "buckets": q.buckets,
            "bracket": (lo, hi), "iterations": iters, "scan_step": step}
    return BoundResult(0.5 * (lo + hi), q.lhs, meta)


# Reference table (k -> beta -> r*); None marks cells with no finite threshold.
BETAS = (2.2, 2.3, 2.4, 2.5, 2.6, 2.7, 2.8, 2.9)
REFERENCE = {
    3: (None, None, None, 3.48, 3.71, 3.87, 3.99, 4.08),
    4: (None, None, 7.87, 8.42, 8.78, 9.04, 9.23, 9.37),
    5: (None, 16.27, 17.75, 18.64, 19.21, 19.61, 19.90, 20.11),
    7: (67.21, 75.74, 79.81, 82.09, 83.49, 84.42, 85.07, 85.54),
    10: (619.28, 662.48, 680.93, 690.36, 695.77, 699.12, 701.34, 702.88),
}
REFERENCE_UNIFORM = {3: 4.67, 4: 10.23, 5: 21.33, 7: 87.88, 10: 708.94}


@dataclass(frozen=True)
class TableRow:
    k: int
    beta: float | None  # None for the uniform column
    r_star: float | None
    reference: float | None

    @property
    def delta(self) -> float | None:
        if self.r_star is None or self.reference is None:
            return None
        return self.r_star - self.reference


def _cell(args):
    k, beta, tol = args
    q = BoundQuery(k, uniform=True) if beta is None else BoundQuery(k, beta=beta)
    try:
        return threshold(q, tol).r_star
    except NeverSatisfied:
        return None


def threshold_table(tol: float = 1e-4, workers: int = 1, ks=None) -> list[TableRow]:
    ks = sorted(REFERENCE) if ks is None else ks
    cells = [(k, b, tol) for k in ks for b in (*BETAS, None)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            values = list(pool.map(_cell, cells))
    else:
        values = [_cell(c) for c in cells]
    rows = []
    for (k, b, _), v in zip(cells, values):
        ref = REFERENCE_UNIFORM.get(k) if b is None else dict(zip(BETAS, REFERENCE.get(k, ()))).get(b)
        rows.append(TableRow(k, b, v, ref))
    return rows


def write_table_csv(rows: list[TableRow], sink) -> None:
    sink.write("k,beta,r_star,reference,delta\n")
    for row in rows:
        beta = "uniform" if row.beta is None else f"{row.beta:g}"
        r = "never" if row.r_star is None else f"{row.r_star:.4f}"
        ref = "" if row.reference is None else f"{row.reference:.2f}"
        d = "" if row.delta is None else f"{row.delta:+.4f}"
        sink.write(f"{row.k},{beta},{r},{ref},{d}\n")

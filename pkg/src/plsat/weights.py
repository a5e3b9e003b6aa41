"""Power-law weight sequences and the variable distribution they induce.

Weights are kept sorted non-decreasingly, so variable ``i`` (1-based) has
weight ``weights[i - 1]`` and the heaviest variable is ``n``.  The sampling
probability of a variable is its weight divided by the total weight.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class WeightError(ValueError):
    pass


class Kind(enum.Enum):
    CONCRETE = "concrete"
    USER = "user"


@dataclass(frozen=True, eq=False)
class WeightSequence:
    n: int
    beta: float | None
    weights: np.ndarray
    kind: Kind

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != self.n:
            raise WeightError(f"expected {self.n} weights, got shape {w.shape}")
        if self.n < 1:
            raise WeightError("need at least one variable")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise WeightError("weights must be finite and strictly positive")
        if np.any(np.diff(w) < 0):
            raise WeightError("weights must be non-decreasing by index")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        if not isinstance(other, WeightSequence):
            return NotImplemented
        return (
            self.n == other.n
            and self.beta == other.beta
            and self.kind == other.kind
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return f"WeightSequence(n={self.n}, beta={self.beta}, kind={self.kind.value})"

    @cached_property
    def _suffix_sums(self) -> np.ndarray:
        # _suffix_sums[i] = sum(weights[i:])
        s = np.cumsum(self.weights[::-1])[::-1]
        return np.append(s, 0.0)


@dataclass(frozen=True, eq=False)
class VariableDistribution:
    p: np.ndarray
    l2sq: float
    sumw: float

    @property
    def n(self) -> int:
        return self.p.shape[0]


def build_concrete(n: int, beta: float) -> WeightSequence:
    """The concrete power law: the ``i``-th heaviest variable has weight ``(n/i)**(1/(beta-1))``."""
    if n < 1:
        raise WeightError("n must be at least 1")
    if not beta > 2:
        raise WeightError(f"concrete power law needs beta > 2, got {beta}")
    i = np.arange(n, 0, -1, dtype=np.float64)
    w = (n / i) ** (1.0 / (beta - 1.0))
    return WeightSequence(n, float(beta), w, Kind.CONCRETE)


def uniform(n: int) -> WeightSequence:
    return WeightSequence(n, None, np.ones(n), Kind.USER)


def from_weights(weights, beta: float | None = None, alpha_lo: float | None = None,
                 alpha_hi: float | None = None) -> WeightSequence:
    """Wrap caller-supplied weights (sorted here).

    When ``beta`` and both sandwich constants are declared, the empirical
    tail ``F(w) = |{i: w_i >= w}| / n`` is checked against
    ``alpha_lo * w**(1-beta) <= F(w) <= alpha_hi * w**(1-beta)`` at every
    support point, and the sequence is rejected if it falls outside.
    """
    w = np.sort(np.asarray(weights, dtype=np.float64))
    ws = WeightSequence(w.shape[0], None if beta is None else float(beta), w, Kind.USER)
    if beta is not None and (alpha_lo is not None or alpha_hi is not None):
        if alpha_lo is None or alpha_hi is None or not 0 < alpha_lo <= alpha_hi:
            raise WeightError("declare both sandwich constants with 0 < alpha_lo <= alpha_hi")
        pts = np.unique(w)
        frac = tail_count(ws, pts) / ws.n
        env = pts ** (1.0 - beta)
        tol = 1e-12
        bad = (frac < alpha_lo * env * (1 - tol)) | (frac > alpha_hi * env * (1 + tol))
        if bad.any():
            at = pts[np.argmax(bad)]
            raise WeightError(
                f"tail F({at:g}) = {frac[np.argmax(bad)]:g} outside "
                f"[{alpha_lo}, {alpha_hi}] * w^(1-beta)"
            )
    return ws


def distribution(ws: WeightSequence) -> VariableDistribution:
    sumw = float(ws._suffix_sums[0])
    p = ws.weights / sumw
    p.setflags(write=False)
    return VariableDistribution(p, float(np.dot(p, p)), sumw)


def tail_count(ws: WeightSequence, w):
    """Number of variables with weight at least ``w`` (vectorised over ``w``)."""
    idx = np.searchsorted(ws.weights, w, side="left")
    out = ws.n - idx
    return int(out) if np.ndim(out) == 0 else out


def tail_weight_sum(ws: WeightSequence, w):
    """Total weight of the variables with weight at least ``w``."""
    idx = np.searchsorted(ws.weights, w, side="left")
    out = ws._suffix_sums[idx]
    return float(out) if np.ndim(out) == 0 else out


def sized_biased_tail(vd: VariableDistribution, ws: WeightSequence, w):
    """Probability that a variable drawn from ``vd`` has weight at least ``w``."""
    return tail_weight_sum(ws, w) / vd.sumw


def write_weights(ws: WeightSequence, sink) -> None:
    beta = "none" if ws.beta is None else repr(ws.beta)
    sink.write(f"plw {ws.n} {beta} {ws.kind.value}\n")
    for x in ws.weights:
        sink.write(f"{float(x)!r}\n")


def read_weights(source) -> WeightSequence:
    header = source.readline().split()
    if len(header) != 4 or header[0] != "plw":
        raise WeightError("missing 'plw <n> <beta> <kind>' header")
    n = int(header[1])
    beta = None if header[2] == "none" else float(header[2])
    try:
        kind = Kind(header[3])
    except ValueError:
        raise WeightError(f"unknown weight kind {header[3]!r}") from None
    weights = [float(line) for line in source if line.strip()]
    if len(weights) != n:
        raise WeightError(f"header declares {n} weights, found {len(weights)}")
    return WeightSequence(n, beta, np.array(weights), kind)

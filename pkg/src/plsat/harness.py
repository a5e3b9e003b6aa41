"""(beta, r) sweeps over concrete power-law k-SAT, with CSV and SVG output.

Config files are flat ``key = value`` text (``#`` starts a comment)::

    k = 3
    n = 1000
    betas = 2.05:3.05:21      # start:stop:count, or a comma list
    ratios = 1.0:5.0:21
    instances = 50
    seed = 1
    solver = internal          # internal | shrink | external
    solver_cmd = minisat {in} {out}
    budget = 100000            # decisions (internal) or milliseconds (external)
    workers = 4

Instance ``t`` of cell ``(i, j)`` (beta index, ratio index) uses seed
``derive_seed(seed, i, j, t)``; the CSV ``seed`` column holds the cell
seed ``derive_seed(seed, i, j)``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from scipy.stats import norm

from . import bounds
from .analysis import find_trivial_core
from .cnf import Status
from .rng import derive_seed
from .sampler import ClauseSampler, sample_formula
from .solvers import SOLVER_ENV, SolverContractError, solve_complete, solve_external
from .twosat import certify_by_shrinking
from .weights import build_concrete, distribution

SOLVERS = ("internal", "shrink", "external")
DEFAULT_BUDGET = {"internal": 100_000, "external": 60_000}
CSV_COLUMNS = ("k", "n", "beta", "r", "instances", "sat", "unsat", "unknown", "median_ms", "seed")


class SweepError(RuntimeError):
    pass


def _grid(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        a, b, count = text.split(":")
        return tuple(float(x) for x in np.round(np.linspace(float(a), float(b), int(count)), 10))
    return tuple(float(x) for x in text.split(",") if x.strip())


@dataclass
class SweepConfig:
    k: int = 3
    n: int = 1000
    betas: tuple[float, ...] = _grid("2.05:3.05:21")
    ratios: tuple[float, ...] = _grid("1.0:5.0:21")
    instances: int = 50
    seed: int = 1
    solver: str = "internal"
    solver_cmd: str | None = None
    budget: int | None = None
    workers: int = 1

    def __post_init__(self):
        self.betas = tuple(float(b) for b in self.betas)
        self.ratios = tuple(float(r) for r in self.ratios)
        if not self.betas or not self.ratios:
            raise ValueError("beta and ratio grids must be non-empty")
        if self.instances < 1:
            raise ValueError("instances must be >= 1")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        if any(b <= 2 for b in self.betas):
            raise ValueError("concrete power-law sweeps need every beta > 2")
        if self.solver == "external":
            self.solver_cmd = self.solver_cmd or os.environ.get(SOLVER_ENV)
            if not self.solver_cmd:
                raise ValueError(f"external solver selected but no solver_cmd or ${SOLVER_ENV}")
        if self.budget is None:
            self.budget = DEFAULT_BUDGET.get(self.solver)

    @classmethod
    def from_text(cls, text: str, overrides: dict[str, str] | None = None) -> "SweepConfig":
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = value
        raw.update(overrides or {})
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw = {}
        for key, value in raw.items():
            if key in ("betas", "ratios"):
                kw[key] = _grid(value)
            elif key in ("k", "n", "instances", "seed", "workers"):
                kw[key] = int(value)
            elif key == "budget":
                kw[key] = None if value.lower() in ("", "none") else int(value)
            else:
                kw[key] = value or None
        return cls(**kw)

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if isinstance(value, tuple):
                value = ", ".join(repr(v) for v in value)
            lines.append(f"{key} = {'' if value is None else value}")
        return "\n".join(lines) + "\n"


@dataclass
class SweepCell:
    k: int
    n: int
    beta: float
    r: float
    instances: int
    sat: int
    unsat: int
    unknown: int
    median_ms: float
    seed: int
    seeds: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.sat + self.unsat + self.unknown != self.instances:
            raise ValueError("cell counts must sum to instances")

    @property
    def majority(self) -> Status:
        counts = {Status.SAT: self.sat, Status.UNSAT: self.unsat, Status.UNKNOWN: self.unknown}
        best = max(counts.values())
        winners = [s for s, c in counts.items() if c == best]
        return winners[0] if len(winners) == 1 else Status.UNKNOWN

    @property
    def sat_fraction(self) -> float:
        return self.sat / self.instances


def solve_instance(f, ws, solver: str, solver_cmd=None, budget=None) -> Status:
    """Status of one formula under the chosen solver pipeline.

    ``internal``: trivial core, then shrinking, then DPLL.  ``shrink``:
    shrinking only (SAT or UNKNOWN).  ``external``: the DIMACS command.
    """
    if solver == "shrink":
        return certify_by_shrinking(f, ws).status
    if solver == "external":
        out = solve_external(f, solver_cmd, budget)
        return out.status if out.status in (Status.SAT, Status.UNSAT) else Status.UNKNOWN
    if find_trivial_core(f) is not None:
        return Status.UNSAT
    if f.k >= 2 and certify_by_shrinking(f, ws).status is Status.SAT:
        return Status.SAT
    out = solve_complete(f, budget, ws=ws)
    return out.status if out.status in (Status.SAT, Status.UNSAT) else Status.UNKNOWN


def run_cell(cfg: SweepConfig, i: int, j: int) -> SweepCell:
    beta, r = cfg.betas[i], cfg.ratios[j]
    ws = build_concrete(cfg.n, beta)
    vd = distribution(ws)
    sampler = ClauseSampler(vd)
    m = int(round(r * cfg.n))
    counts = {Status.SAT: 0, Status.UNSAT: 0, Status.UNKNOWN: 0}
    times = []
    seeds = tuple(derive_seed(cfg.seed, i, j, t) for t in range(cfg.instances))
    model = {"weights": "concrete", "beta": beta, "n": cfg.n, "r": r}
    for s in seeds:
        f, _ = sample_formula(vd, m, cfg.k, s, model=model, sampler=sampler)
        t0 = time.perf_counter()
        try:
            status = solve_instance(f, ws, cfg.solver, cfg.solver_cmd, cfg.budget)
        except SolverContractError as exc:
            raise SweepError(f"cell (beta={beta}, r={r}), seed {s}: {exc}") from exc
        times.append((time.perf_counter() - t0) * 1e3)
        counts[status] += 1
    return SweepCell(cfg.k, cfg.n, beta, r, cfg.instances, counts[Status.SAT], counts[Status.UNSAT],
                     counts[Status.UNKNOWN], round(statistics.median(times), 3),
                     derive_seed(cfg.seed, i, j), seeds)


def _run_cell_args(args):
    return run_cell(*args)


def run_sweep(cfg: SweepConfig) -> list[SweepCell]:
    """All cells in grid order (beta-major, then ratio)."""
    jobs = [(cfg, i, j) for i in range(len(cfg.betas)) for j in range(len(cfg.ratios))]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return list(pool.map(_run_cell_args, jobs))
    return [run_cell(*job) for job in jobs]


# -- output -------------------------------------------------------------------

def emit_csv(cells: list[SweepCell], sink, include_timing: bool = True) -> None:
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in cells:
        w.writerow([c.k, c.n, repr(c.beta), repr(c.r), c.instances, c.sat, c.unsat, c.unknown,
                    repr(c.median_ms) if include_timing else "", c.seed])


def parse_csv(source) -> list[SweepCell]:
    rows = csv.DictReader(source)
    if tuple(rows.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"expected columns {CSV_COLUMNS}")
    out = []
    for row in rows:
        out.append(SweepCell(
            int(row["k"]), int(row["n"]), float(row["beta"]), float(row["r"]), int(row["instances"]),
            int(row["sat"]), int(row["unsat"]), int(row["unknown"]),
            float(row["median_ms"]) if row["median_ms"] else math.nan, int(row["seed"]),
        ))
    return out


def determinism_digest(cells: list[SweepCell]) -> str:
    """SHA-256 of the CSV with the timing column blanked."""
    buf = io.StringIO()
    emit_csv(cells, buf, include_timing=False)
    return hashlib.sha256(buf.getvalue().encode()).hexdigest()


def trend_violations(cells: list[SweepCell], alpha: float = 0.05) -> list[tuple[float, float, float]]:
    """``(beta, r_lo, r_hi)`` pairs where the SAT fraction rises significantly with ``r``.

    One-sided two-proportion z-test on consecutive densities at fixed beta.
    """
    zcrit = norm.ppf(1 - alpha)
    out = []
    for beta in sorted({c.beta for c in cells}):
        col = sorted((c for c in cells if c.beta == beta), key=lambda c: c.r)
        for a, b in zip(col, col[1:]):
            pa, pb = a.sat_fraction, b.sat_fraction
            pooled = (a.sat + b.sat) / (a.instances + b.instances)
            se = math.sqrt(pooled * (1 - pooled) * (1 / a.instances + 1 / b.instances))
            if se > 0 and (pb - pa) / se > zcrit:
                out.append((beta, a.r, b.r))
    return out


def overlay_curve(k: int, betas) -> list[tuple[float, float]]:
    """Single-flip threshold at each plotted beta where it is finite."""
    pts = []
    for beta in sorted(set(betas)):
        try:
            pts.append((beta, bounds.threshold(bounds.BoundQuery(k, beta=beta)).r_star))
        except bounds.NeverSatisfied:
            continue
    return pts


COLORS = {Status.SAT: "#9fd49f", Status.UNSAT: "#e0a0a0", Status.UNKNOWN: "#bdbdbd"}


def emit_phase_svg(cells: list[SweepCell], sink, width: int = 480, height: int = 400) -> None:
    """Heat map of majority status, beta on x and r on y, with bound overlays."""
    if not cells:
        raise ValueError("no cells to draw")
    k = cells[0].k
    betas = sorted({c.beta for c in cells})
    ratios = sorted({c.r for c in cells})
    pad = 50
    pw, ph = width - 2 * pad, height - 2 * pad
    cw, chh = pw / len(betas), ph / len(ratios)
    b0, b1 = betas[0] - 0.5 * _spacing(betas), betas[-1] + 0.5 * _spacing(betas)
    r0, r1 = ratios[0] - 0.5 * _spacing(ratios), ratios[-1] + 0.5 * _spacing(ratios)

    def x(b):
        return pad + (b - b0) / (b1 - b0) * pw

    def y(r):
        return pad + ph - (r - r0) / (r1 - r0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">']
    for c in cells:
        i, j = betas.index(c.beta), ratios.index(c.r)
        out.append(f'<rect x="{pad + i * cw:.2f}" y="{pad + ph - (j + 1) * chh:.2f}" width="{cw:.2f}" '
                   f'height="{chh:.2f}" fill="{COLORS[c.majority]}"><title>beta={c.beta} r={c.r} '
                   f'sat={c.sat} unsat={c.unsat} unknown={c.unknown}</title></rect>')
    bt = bounds.beta_threshold(k)
    if b0 <= bt <= b1:
        out.append(f'<line class="beta-threshold" x1="{x(bt):.2f}" y1="{pad}" x2="{x(bt):.2f}" '
                   f'y2="{pad + ph}" stroke="black" stroke-width="1.6" stroke-dasharray="6,4"/>')
    curve = [(b, r) for b, r in overlay_curve(k, betas) if r0 <= r <= r1]
    if len(curve) >= 2:
        pts = " ".join(f"{x(b):.2f},{y(r):.2f}" for b, r in curve)
        out.append(f'<polyline class="single-flip" points="{pts}" fill="none" stroke="black" '
                   f'stroke-width="1.6" stroke-dasharray="6,4"/>')
    out.append(f'<rect x="{pad}" y="{pad}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for b in betas[:: max(1, len(betas) // 5)]:
        out.append(f'<text x="{x(b):.2f}" y="{pad + ph + 15}" text-anchor="middle">{b:g}</text>')
    for r in ratios[:: max(1, len(ratios) // 5)]:
        out.append(f'<text x="{pad - 5}" y="{y(r) + 4:.2f}" text-anchor="end">{r:g}</text>')
    out.append(f'<text x="{pad + pw / 2}" y="{height - 10}" text-anchor="middle">beta</text>')
    out.append(f'<text x="12" y="{pad + ph / 2}" transform="rotate(-90 12 {pad + ph / 2})" '
               f'text-anchor="middle">m/n</text>')
    out.append(f'<text x="{pad}" y="{pad - 10}">k={k}, n={cells[0].n}: sat / unsat / unknown</text>')
    out.append("</svg>")
    sink.write("\n".join(out) + "\n")


def _spacing(values) -> float:
    return (values[-1] - values[0]) / (len(values) - 1) if len(values) > 1 else 1.0


def write_outputs(cfg: SweepConfig, cells: list[SweepCell], outdir) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "cells.csv", "w", newline="") as fh:
        emit_csv(cells, fh)
    with open(outdir / "phase.svg", "w") as fh:
        emit_phase_svg(cells, fh)
    (outdir / "config.echo").write_text(cfg.to_text() + f"digest = {determinism_digest(cells)}\n")
    return outdir

"""Uptilt sweeps, golden-section optimal-angle search and unimodality
diagnostics over any outage evaluator (closed form, quadrature or Monte
Carlo)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import closed_form
from .geometry import CorridorScenario, GeometryError
from .monte_carlo import McConfig, estimate_outage
from .oracle import OracleAssumptions, coverage_by_quadrature

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Evaluator:
    """An outage-probability objective p_out(scenario) with a provenance tag.

    analytic evaluators additionally let sweeps annotate each point with its
    classified uptilt case.
    """

    tag: str
    fn: Callable[[CorridorScenario], float]
    analytic: bool = False

    def __call__(self, s: CorridorScenario) -> float:
        return self.fn(s)


def closed_form_evaluator() -> Evaluator:
    return Evaluator("closed_form", lambda s: closed_form.outage(s).p_out,
                     analytic=True)


def quadrature_evaluator(assumptions: OracleAssumptions | None = None,
                         n_x: int = 501, n_z: int = 301) -> Evaluator:
    a = assumptions if assumptions is not None else OracleAssumptions()
    return Evaluator(
        "quadrature",
        lambda s: 1.0 - coverage_by_quadrature(s, a, n_x, n_z))


def mc_evaluator(config: McConfig, workers: int | None = None) -> Evaluator:
    """Monte Carlo objective. The config seed is reused at every uptilt
    (common random numbers), which keeps sweep curves and bracketing
    decisions coherent under the sampling noise."""
    return Evaluator(
        "mc", lambda s: estimate_outage(s, config, workers=workers).p_out)


@dataclass
class SweepCurve:
    alphas: list[float]            # rad, strictly increasing
    p_out: list[float]             # nan where the evaluator failed
    evaluator: str
    cases: list[int | None] | None = None
    errors: dict[int, str] = field(default_factory=dict)


def sweep_alpha(template: CorridorScenario, grid: list[float],
                evaluator: Evaluator) -> SweepCurve:
    """Evaluate p_out over an uptilt grid (radians, strictly increasing).
    Per-point failures are recorded as gaps, not raised."""
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be strictly increasing")
    values: list[float] = []
    cases: list[int | None] = []
    errors: dict[int, str] = {}
    for i, alpha in enumerate(grid):
        s = template.replace(alpha=alpha)
        try:
            values.append(float(evaluator(s)))
        except (GeometryError, ValueError) as exc:
            values.append(math.nan)
            errors[i] = str(exc)
            cases.append(None)
            continue
        if evaluator.analytic:
            try:
                cases.append(int(closed_form.classify_case(s)))
            except GeometryError:
                cases.append(None)
        else:
            cases.append(None)
    return SweepCurve(
        alphas=list(grid), p_out=values, evaluator=evaluator.tag,
        cases=cases if evaluator.analytic else None, errors=errors)


@dataclass(frozen=True)
class OptimizeResult:
    alpha: float       # rad
    p_out: float
    not_unimodal: bool
    n_evaluations: int
    history: tuple[tuple[float, float], ...]  # (alpha, p_out) sorted by alpha


def find_optimal_alpha(template: CorridorScenario, lo: float, hi: float,
                       tol: float, evaluator: Evaluator,
                       noise_tol: float = 1e-3) -> OptimizeResult:
    """Golden-section search for the outage-minimizing uptilt on [lo, hi].

    Shrinks the bracket to width <= tol and returns its midpoint. The
    evaluation history is checked post hoc: more than one significant valley
    (prominence > noise_tol) flags not_unimodal.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    seen: dict[float, float] = {}

    def f(alpha: float) -> float:
        if alpha not in seen:
            seen[alpha] = float(evaluator(template.replace(alpha=alpha)))
        return seen[alpha]

    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    f(a), f(b)
    while abs(b - a) > tol:
        if f(c) < f(d):
            b, d = d, c
            c = b - INV_PHI * (b - a)
        else:
            a, c = c, d
            d = a + INV_PHI * (b - a)
    alpha_star = 0.5 * (a + b)
    p_star = f(alpha_star)

    history = tuple(sorted(seen.items()))
    minima = significant_minima([v for _, v in history], noise_tol)
    return OptimizeResult(alpha=alpha_star, p_out=p_star,
                          not_unimodal=len(minima) > 1,
                          n_evaluations=len(seen), history=history)


def significant_minima(values: list[float], tol: float) -> list[int]:
    """Indices of valleys that require a climb of more than `tol` to escape
    on both sides (boundary valleys count). Fluctuations within `tol` merge
    into plateaus, so a constant sequence has exactly one valley."""
    n = len(values)
    if n == 0:
        return []
    minima: list[int] = []
    direction = 0  # 0 unknown, +1 rising, -1 falling
    lo_val, lo_idx = values[0], 0
    hi_val = values[0]
    for i in range(1, n):
        v = values[i]
        if direction == 0:
            if v < lo_val:
                lo_val, lo_idx = v, i
            if v > hi_val:
                hi_val = v
            if v > lo_val + tol:
                minima.append(lo_idx)
                direction = 1
                hi_val = v
            elif v < hi_val - tol:
                direction = -1
                lo_val, lo_idx = v, i
        elif direction > 0:
            if v >= hi_val:
                hi_val = v
            elif v < hi_val - tol:
                direction = -1
                lo_val, lo_idx = v, i
        else:
            if v <= lo_val:
                lo_val, lo_idx = v, i
            elif v > lo_val + tol:
                minima.append(lo_idx)
                direction = 1
                hi_val = v
    if direction <= 0:
        minima.append(lo_idx)
    return minima


@dataclass(frozen=True)
class UnimodalityReport:
    passed: bool
    n_minima: int
    minima_indices: tuple[int, ...]
    plateau_tol: float


def unimodality_report(curve: SweepCurve,
                       plateau_tol: float = 1e-3) -> UnimodalityReport:
    """PASS iff the curve has exactly one significant valley after merging
    plateaus within plateau_tol."""
    values = [v for v in curve.p_out if not math.isnan(v)]
    if len(values) < 3:
        raise ValueError("need at least 3 evaluated points")
    minima = significant_minima(values, plateau_tol)
    return UnimodalityReport(passed=(len(minima) == 1), n_minima=len(minima),
                             minima_indices=tuple(minima),
                             plateau_tol=plateau_tol)

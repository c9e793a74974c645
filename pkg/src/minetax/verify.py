"""Verification checks: closed-form consistency, oracle equivalence,
telescoping, convexity, and evolutionary frontier convergence.

Each check returns a CheckResult with the measured deviation so the CLI can
print a pass/fail table; the test suite reuses the same functions at the
acceptance budgets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import analytical as ana
from .bilevel import EaConfig, evolve
from .lower import best_response
from .model import (
    AnalyticalParams,
    ExtendedModel,
    LeaderStrategy,
    analytical_as_extended,
    cumulative_cost,
)
from .oracle import GridSpec, grid_best_response, weighted_scalar_check


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    detail: str = ""


FOC_WEIGHTS = (0.02, 0.1, 0.25, 0.5, 0.75, 1.0)


def _fd_central(f, x: float, h: float = 1e-4) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def check_closed_form(
    p: AnalyticalParams,
    weights: Sequence[float] = FOC_WEIGHTS,
    grid_step: float = 1e-3,
) -> CheckResult:
    """First-order conditions and grid-oracle agreement of the closed forms."""
    worst = 0.0
    for w in weights:
        tau = ana.optimal_tax(w, p)
        q = ana.optimal_extraction(w, p)
        # follower FOC at the induced extraction
        d_pi = _fd_central(lambda x: ana.follower_profit(x, tau, p), q)
        # leader FOC in the tax, with the follower on its best response
        def leader(t: float) -> float:
            qt = ana.follower_best_response(t, p)
            return w * t * qt - (1.0 - w) * p.k * qt

        d_f = _fd_central(leader, tau)
        worst = max(worst, abs(d_pi), abs(d_f))
        grid = GridSpec(lows=(0.0,), highs=(p.alpha,), step=grid_step)
        tau_grid, _ = weighted_scalar_check(p, w, grid)
        worst = max(worst, abs(tau_grid - tau) - grid_step)
        q_grid = ana.follower_best_response(tau_grid, p)
        worst = max(worst, abs(q_grid - q) - grid_step)
    return CheckResult(
        name="closed-form first-order conditions and grid oracle",
        passed=worst <= 1e-6,
        deviation=worst,
    )


def check_threshold(p: AnalyticalParams, expected: float = 0.01) -> CheckResult:
    dev = abs(ana.feasibility_threshold(p) - expected)
    return CheckResult(
        name="feasibility threshold",
        passed=dev <= 1e-12,
        deviation=dev,
    )


def check_frontier_endpoints(p: AnalyticalParams) -> CheckResult:
    sweep = ana.pareto_sweep(p, 100)
    low, high = sweep[0], sweep[-1]
    expected = ana.solve_weighted(1.0, p)
    dev = max(
        abs(low.revenue),
        abs(low.damage),
        abs(high.revenue - expected.revenue),
        abs(high.damage - expected.damage),
    )
    return CheckResult(
        name="frontier endpoints",
        passed=dev <= 1e-9,
        deviation=dev,
    )


def check_telescoping(
    model: ExtendedModel, n_schedules: int = 1000, seed: int = 0
) -> CheckResult:
    """Per-period cost increments must sum exactly to the cumulative cost."""
    rng = np.random.default_rng(seed)
    highs = np.array([hi for _, hi in model.q_bounds])
    worst = 0.0
    for _ in range(n_schedules):
        q = rng.uniform(0.0, highs)
        for tech in model.techs:
            total = 0.0
            cum = 0.0
            for x in q:
                nxt = cum + x
                total += cumulative_cost(nxt, tech, model.strata) - cumulative_cost(
                    cum, tech, model.strata
                )
                cum = nxt
            worst = max(worst, abs(total - cumulative_cost(cum, tech, model.strata)))
    return CheckResult(
        name="telescoping of extraction/purification increments",
        passed=worst <= 1e-9,
        deviation=worst,
    )


def check_cost_convexity(
    model: ExtendedModel, n_pairs: int = 200, seed: int = 0
) -> CheckResult:
    """Slopes nondecreasing per technology plus a random midpoint test."""
    worst = 0.0
    ok = True
    for tech in model.techs:
        for a, b in zip(tech.slopes, tech.slopes[1:]):
            if b < a:
                ok = False
                worst = max(worst, a - b)
    rng = np.random.default_rng(seed)
    span = 1.5 * model.strata.stock
    for _ in range(n_pairs):
        x, y = rng.uniform(0.0, span, size=2)
        for tech in model.techs:
            mid = cumulative_cost((x + y) / 2.0, tech, model.strata)
            avg = 0.5 * (
                cumulative_cost(x, tech, model.strata)
                + cumulative_cost(y, tech, model.strata)
            )
            gap = mid - avg
            if gap > 1e-9:
                ok = False
                worst = max(worst, gap)
    return CheckResult(
        name="convexity of the piecewise-linear cost",
        passed=ok,
        deviation=worst,
    )


def random_strategies(
    model: ExtendedModel, n: int, seed: int
) -> list[LeaderStrategy]:
    rng = np.random.default_rng(seed)
    lows = np.array([lo for lo, _ in model.tau_bounds])
    highs = np.array([hi for _, hi in model.tau_bounds])
    return [
        LeaderStrategy(tau=tuple(rng.uniform(lows, highs))) for _ in range(n)
    ]


def check_oracle_equivalence(
    model: ExtendedModel,
    n_strategies: int = 50,
    seed: int = 7,
    grid_high: float = 90.0,
    grid_step: float = 5.0,
    refine_sweeps: int = 3,
    tol: float = 1e-2,
) -> CheckResult:
    """Deterministic best response vs brute-force grid plus refinement."""
    grid = GridSpec(
        lows=(0.0,) * model.T, highs=(grid_high,) * model.T, step=grid_step
    )
    worst = 0.0
    for strat in random_strategies(model, n_strategies, seed):
        solver = best_response(strat, model)
        oracle = grid_best_response(strat, model, grid, refine_sweeps=refine_sweeps)
        worst = max(worst, abs(solver.profit - oracle.profit))
    return CheckResult(
        name="lower-solver vs grid oracle profit",
        passed=worst <= tol,
        deviation=worst,
        detail=f"{n_strategies} random strategies",
    )


def frontier_metrics(
    entries, p: AnalyticalParams, n_curve: int = 4001
) -> tuple[float, float]:
    """Max normalized distance of archive points to the closed-form
    frontier, and the fraction of the damage range the archive spans.

    The frontier is sampled uniformly in damage: on it the tax satisfies
    the follower's inverted best response tau = alpha - gamma -
    2(beta+delta)q, so revenue follows in closed form.
    """
    q_top = ana.optimal_extraction(1.0, p)
    curve_q = np.linspace(0.0, q_top, n_curve)
    curve_d = p.k * curve_q
    curve_r = (p.alpha - p.gamma - 2.0 * (p.beta + p.delta) * curve_q) * curve_q
    rev_range = curve_r.max() - curve_r.min()
    dam_range = curve_d.max() - curve_d.min()
    pts_r = np.array([e.objectives.revenue for e in entries])
    pts_d = np.array([e.objectives.damage for e in entries])
    if len(pts_r) == 0:
        return float("inf"), 0.0
    dr = (pts_r[:, None] - curve_r[None, :]) / rev_range
    dd = (pts_d[:, None] - curve_d[None, :]) / dam_range
    dist = np.sqrt(dr * dr + dd * dd).min(axis=1)
    coverage = (pts_d.max() - pts_d.min()) / dam_range
    return float(dist.max()), float(coverage)


def check_frontier_convergence(
    p: AnalyticalParams,
    population_size: int = 60,
    max_generations: int = 200,
    seed: int = 1,
    dist_tol: float = 0.01,
    coverage_min: float = 0.9,
) -> CheckResult:
    """The bilevel EA on the embedded single-period instance must land on
    the closed-form frontier and span most of the damage range."""
    model = analytical_as_extended(p)
    config = EaConfig(
        population_size=population_size,
        max_generations=max_generations,
        seed=seed,
    )
    archive = evolve(model, config)
    dist, coverage = frontier_metrics(archive.entries, p)
    return CheckResult(
        name="bilevel EA convergence to the closed-form frontier",
        passed=dist <= dist_tol and coverage >= coverage_min,
        deviation=dist,
        detail=f"damage coverage {coverage:.3f}, archive {len(archive)}",
    )


def epsilon_indicator(
    approx: Sequence[tuple[float, float]],
    reference: Sequence[tuple[float, float]],
    rev_scale: float,
    dam_scale: float,
) -> float:
    """Additive epsilon indicator for (maximize revenue, minimize damage),
    normalized per objective: smallest shift making `approx` weakly
    dominate every reference point."""
    ar = np.array([x[0] for x in approx])
    ad = np.array([x[1] for x in approx])
    eps = -np.inf
    for r, d in reference:
        shift = np.maximum((r - ar) / rev_scale, (ad - d) / dam_scale).min()
        eps = max(eps, shift)
    return float(eps)


def run_all_checks(
    p: AnalyticalParams,
    model: Optional[ExtendedModel],
    quick: bool = False,
) -> list[CheckResult]:
    """Execute the verification battery; `quick` trims the slow budgets."""
    results = [
        check_closed_form(p),
        check_threshold(p),
        check_frontier_endpoints(p),
    ]
    if model is not None:
        results.append(check_cost_convexity(model))
        results.append(
            check_telescoping(model, n_schedules=200 if quick else 1000)
        )
        results.append(
            check_oracle_equivalence(model, n_strategies=5 if quick else 50)
        )
    results.append(
        check_frontier_convergence(
            p,
            population_size=24 if quick else 60,
            max_generations=40 if quick else 200,
        )
    )
    return results


def format_report(results: list[CheckResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        detail = f" ({r.detail})" if r.detail else ""
        lines.append(f"[{status}] {r.name}: deviation {r.deviation:.3e}{detail}")
    return "\n".join(lines)

"""Follower best-response solvers for the multi-period model.

For fixed taxes and a fixed technology, total profit is strictly concave in
the extraction schedule, so cyclic coordinate ascent with golden-section
line searches converges to the unique maximizer; the piecewise-linear cost
kinks are handled by staying derivative-free. Technology choice is a small
enumeration on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .model import (
    ExtendedModel,
    FollowerResponse,
    LeaderStrategy,
    TechParams,
    cumulative_cost,
    follower_total_profit,
    leader_objectives,
)
from .variation import polynomial_mutation, sbx_crossover

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

# ties in follower profit within this tolerance are broken in the leader's
# favor (optimistic bilevel position)
TIE_TOL = 1e-9

STATIONARITY_TOL = 1e-4
_FD_STEP = 1e-5


@dataclass(frozen=True)
class BestResponse:
    response: FollowerResponse
    profit: float
    optimality_tag: bool


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-9
) -> float:
    """Maximizer of a unimodal f on [lo, hi] to within xtol."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
    x = 0.5 * (a + b)
    # snap to the lower boundary when it is at least as good
    if x - lo < 10.0 * xtol and f(lo) >= f(x):
        return lo
    return x


class _ProfitEvaluator:
    """Fast repeated evaluation of total profit for fixed (tau, tech)."""

    def __init__(self, tau: Sequence[float], tech: TechParams, model: ExtendedModel):
        self.tau = tuple(tau)
        self.tech = tech
        self.model = model
        self.T = model.T
        # per-period coefficients of the separable quadratic part:
        # (alpha_t - tau_t - beta_er) q - (beta_t + alpha_er) q^2
        self.lin = tuple(
            model.alpha[t] - self.tau[t] - tech.beta_er for t in range(self.T)
        )
        self.quad = tuple(model.beta[t] + tech.alpha_er for t in range(self.T))
        self.fixed = -tech.gamma_er * sum(
            model.discount(t) for t in range(1, self.T + 1)
        )

    def total(self, q: Sequence[float]) -> float:
        m, tech = self.model, self.tech
        if m.r == 0.0:
            s = self.fixed
            cum = 0.0
            for t in range(self.T):
                x = q[t]
                s += (self.lin[t] - self.quad[t] * x) * x
                cum += x
            return s - cumulative_cost(cum, tech, m.strata)
        total = 0.0
        prev_cum = 0.0
        prev_cost = 0.0
        for t in range(self.T):
            x = q[t]
            cum = prev_cum + x
            cost = cumulative_cost(cum, tech, m.strata)
            pi = (
                (self.lin[t] - self.quad[t] * x) * x
                - tech.gamma_er
                - (cost - prev_cost)
            )
            total += m.discount(t + 1) * pi
            prev_cum, prev_cost = cum, cost
        return total

    def coord_objective(self, q: Sequence[float], t: int) -> Callable[[float], float]:
        """Profit as a function of q[t] alone, up to an additive constant."""
        m, tech = self.model, self.tech
        if m.r == 0.0:
            rest = sum(q) - q[t]
            lin, quad = self.lin[t], self.quad[t]
            strata = m.strata

            def g(x: float) -> float:
                return (lin - quad * x) * x - cumulative_cost(rest + x, tech, strata)

            return g
        work = list(q)

        def g_general(x: float) -> float:
            work[t] = x
            return self.total(work)

        return g_general


def _stationary(
    ev: _ProfitEvaluator, q: list[float], hi: Sequence[float]
) -> bool:
    """Check that no coordinate admits a first-order improving direction."""
    base = ev.total(q)
    for t in range(ev.T):
        x = q[t]
        if x + _FD_STEP <= hi[t]:
            q[t] = x + _FD_STEP
            if (ev.total(q) - base) / _FD_STEP > STATIONARITY_TOL:
                q[t] = x
                return False
            q[t] = x
        if x - _FD_STEP >= 0.0:
            q[t] = x - _FD_STEP
            if (ev.total(q) - base) / _FD_STEP > STATIONARITY_TOL:
                q[t] = x
                return False
            q[t] = x
    return True


def _transfer_sweep(
    ev: _ProfitEvaluator, q: list[float], hi: Sequence[float]
) -> float:
    """Redistribute extraction between period pairs at fixed total.

    Coordinate moves alone can stall where the cumulative total sits on a
    stratum kink; transfers stay on the kink plane, where the objective is
    smooth, and escape those stalls. With no discounting the pair-optimal
    transfer has a closed form (the cumulative term is constant on the
    plane). Returns the largest transfer applied.
    """
    m = ev.model
    moved = 0.0
    for s in range(ev.T):
        for t in range(s + 1, ev.T):
            lo_d = max(-q[s], q[t] - hi[t])
            hi_d = min(hi[s] - q[s], q[t])
            if hi_d - lo_d <= 1e-12:
                continue
            if m.r == 0.0:
                denom = 2.0 * (ev.quad[s] + ev.quad[t])
                delta = (
                    ev.lin[s]
                    - 2.0 * ev.quad[s] * q[s]
                    - ev.lin[t]
                    + 2.0 * ev.quad[t] * q[t]
                ) / denom
                delta = min(max(delta, lo_d), hi_d)
                q[s] += delta
                q[t] -= delta
                moved = max(moved, abs(delta))
            else:
                base = list(q)

                def g(d: float) -> float:
                    base[s] = q[s] + d
                    base[t] = q[t] - d
                    return ev.total(base)

                delta = golden_section_max(g, lo_d, hi_d, xtol=1e-10)
                if abs(delta) <= 1e-12:
                    continue
                before = ev.total(q)
                q[s] += delta
                q[t] -= delta
                if ev.total(q) <= before:
                    q[s] -= delta
                    q[t] += delta
                else:
                    moved = max(moved, abs(delta))
    return moved


def best_response_fixed_tech(
    strat: LeaderStrategy,
    tech: TechParams,
    model: ExtendedModel,
    start: Optional[Sequence[float]] = None,
    coord_tol: float = 1e-7,
    max_sweeps: int = 200,
) -> BestResponse:
    """Unique profit-maximizing schedule for fixed taxes and technology.

    Cyclic coordinate ascent; each coordinate solved by golden-section
    search over [0, q_max_t], alternated with pairwise fixed-total
    transfers so stratum kinks cannot trap the iterate. Converged when no
    coordinate moves more than coord_tol in a full sweep (or the profit
    stops improving measurably, which is the double-precision limit).
    """
    if len(strat.tau) != model.T:
        raise ValueError("strategy length must equal the horizon T")
    ev = _ProfitEvaluator(strat.tau, tech, model)
    hi = [b[1] for b in model.q_bounds]
    q = [0.0] * model.T if start is None else [float(x) for x in start]
    converged = False
    sweeps_left = max_sweeps
    while sweeps_left > 0:
        converged = False
        prev_profit = ev.total(q)
        while sweeps_left > 0:
            sweeps_left -= 1
            move = 0.0
            for t in range(model.T):
                g = ev.coord_objective(q, t)
                x = golden_section_max(g, 0.0, hi[t], xtol=1e-9)
                move = max(move, abs(x - q[t]))
                q[t] = x
            profit = ev.total(q)
            if move <= coord_tol:
                converged = True
                break
            if move <= 1e-3 and abs(profit - prev_profit) <= 1e-10 * max(
                1.0, abs(profit)
            ):
                converged = True
                break
            prev_profit = profit
        if not converged:
            break
        for _ in range(50):
            if _transfer_sweep(ev, q, hi) <= 1e-9:
                break
        else:
            continue
        # transfers settled; one more coordinate pass to confirm stability
        stable = True
        for t in range(model.T):
            g = ev.coord_objective(q, t)
            x = golden_section_max(g, 0.0, hi[t], xtol=1e-9)
            if abs(x - q[t]) > 1e-5:
                stable = False
            q[t] = x
        if stable:
            break
    tag = converged and _stationary(ev, q, hi)
    resp = FollowerResponse(q=tuple(q), a=tech.tech_id)
    return BestResponse(response=resp, profit=ev.total(q), optimality_tag=tag)


def _pick_optimistic(
    candidates: list[BestResponse], strat: LeaderStrategy, model: ExtendedModel
) -> BestResponse:
    """Among profit-tied best responses, pick the one best for the leader."""
    best_profit = max(c.profit for c in candidates)
    tol = max(TIE_TOL, TIE_TOL * abs(best_profit))
    tied = [c for c in candidates if c.profit >= best_profit - tol]
    if len(tied) == 1:
        return tied[0]

    def key(c: BestResponse):
        obj = leader_objectives(c.response, strat, model)
        return (-obj.revenue, obj.damage, c.response.a)

    return min(tied, key=key)


def best_response(
    strat: LeaderStrategy,
    model: ExtendedModel,
    tech_filter: Optional[int] = None,
) -> BestResponse:
    """Follower optimum over schedule and technology choice."""
    techs = (
        model.techs if tech_filter is None else (model.tech(tech_filter),)
    )
    candidates = [best_response_fixed_tech(strat, tech, model) for tech in techs]
    return _pick_optimistic(candidates, strat, model)


@dataclass(frozen=True)
class LowerEaConfig:
    population_size: int = 20
    generations: int = 30
    seed: int = 0
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None  # default 1/T
    eta_crossover: float = 15.0
    eta_mutation: float = 20.0
    initial: Optional[tuple[float, ...]] = None


def _evolve_schedule(
    ev: _ProfitEvaluator, model: ExtendedModel, cfg: LowerEaConfig, tech_id: int
) -> list[float]:
    """EA phase: evolve extraction schedules, return the best individual."""
    if cfg.generations == 0 and cfg.initial is not None:
        return list(cfg.initial)
    rng = np.random.default_rng([cfg.seed, tech_id])
    lows = np.zeros(model.T)
    highs = np.array([b[1] for b in model.q_bounds])
    mut_rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / model.T
    pop = rng.uniform(lows, highs, size=(cfg.population_size, model.T))
    if cfg.initial is not None:
        pop[0] = np.clip(np.asarray(cfg.initial, dtype=float), lows, highs)
    fitness = np.array([ev.total(ind) for ind in pop])
    for _ in range(cfg.generations):
        children = []
        while len(children) < cfg.population_size:
            i1, i2 = rng.integers(cfg.population_size, size=2)
            j1, j2 = rng.integers(cfg.population_size, size=2)
            p1 = pop[i1] if fitness[i1] >= fitness[i2] else pop[i2]
            p2 = pop[j1] if fitness[j1] >= fitness[j2] else pop[j2]
            c1, c2 = sbx_crossover(
                p1, p2, lows, highs, cfg.eta_crossover, cfg.crossover_rate, rng
            )
            children.append(
                polynomial_mutation(c1, lows, highs, cfg.eta_mutation, mut_rate, rng)
            )
            children.append(
                polynomial_mutation(c2, lows, highs, cfg.eta_mutation, mut_rate, rng)
            )
        children = children[: cfg.population_size]
        child_fit = np.array([ev.total(ind) for ind in children])
        # elitist merge
        merged = np.vstack([pop, np.array(children)])
        merged_fit = np.concatenate([fitness, child_fit])
        order = np.argsort(-merged_fit, kind="stable")[: cfg.population_size]
        pop = merged[order]
        fitness = merged_fit[order]
    return list(pop[int(np.argmax(fitness))])


def best_response_ea(
    strat: LeaderStrategy,
    model: ExtendedModel,
    ea_config: LowerEaConfig,
    tech_filter: Optional[int] = None,
) -> BestResponse:
    """EA-seeded variant: evolve schedules per technology, then polish with
    the deterministic coordinate ascent."""
    techs = (
        model.techs if tech_filter is None else (model.tech(tech_filter),)
    )
    candidates = []
    for tech in techs:
        ev = _ProfitEvaluator(strat.tau, tech, model)
        seed_q = _evolve_schedule(ev, model, ea_config, tech.tech_id)
        candidates.append(
            best_response_fixed_tech(strat, tech, model, start=seed_q)
        )
    return _pick_optimistic(candidates, strat, model)

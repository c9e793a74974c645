"""Core data types and evaluation functions for the mining taxation game.

Two models live here: the single-period analytical model (quadratic cost,
linear demand, linear damage) and the multi-period extended model with
technology choice, quadratic extraction-rate costs and a piecewise-linear
cumulative extraction/purification cost over geological strata.

All evaluation functions are pure; parameter objects are immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence


@dataclass(frozen=True)
class AnalyticalParams:
    """Constants of the single-period model.

    alpha: price intercept, beta: price slope, delta: quadratic cost
    coefficient, gamma: linear cost coefficient, phi: fixed cost,
    k: pollution coefficient (damage per unit extracted).
    """

    alpha: float = 100.0
    beta: float = 1.0
    delta: float = 1.0
    gamma: float = 1.0
    phi: float = 0.0
    k: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.delta <= 0:
            raise ValueError("alpha, beta, delta must be positive")
        # k = 0 is permitted: a revenue-only regulator is a useful
        # degenerate case
        if self.gamma < 0 or self.phi < 0 or self.k < 0:
            raise ValueError("gamma, phi and k must be nonnegative")
        if self.alpha <= self.gamma:
            raise ValueError("alpha must exceed gamma (no profitable extraction)")


@dataclass(frozen=True)
class TechParams:
    """One technology alternative: pollution coefficient and cost structure.

    slopes[m] is the marginal extraction/purification cost while mining
    stratum m+1.
    """

    tech_id: int
    k: float
    alpha_er: float
    beta_er: float
    gamma_er: float
    slopes: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "slopes", tuple(float(s) for s in self.slopes))
        if self.k <= 0:
            raise ValueError("pollution coefficient k must be positive")
        if min(self.alpha_er, self.beta_er, self.gamma_er) < 0:
            raise ValueError("cost coefficients must be nonnegative")
        # slope 0 is allowed so the analytical model embeds as a degenerate
        # single-stratum instance
        if any(s < 0 for s in self.slopes):
            raise ValueError("stratum slopes must be nonnegative")
        if not self.slopes:
            raise ValueError("at least one stratum slope required")


@dataclass(frozen=True)
class StrataTable:
    """Amounts of ore per stratum and the derived cumulative breakpoints."""

    amounts: tuple[float, ...]
    breakpoints: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "amounts", tuple(float(a) for a in self.amounts))
        if not self.amounts or any(a <= 0 for a in self.amounts):
            raise ValueError("stratum amounts must be positive")
        cum = []
        total = 0.0
        for a in self.amounts:
            total += a
            cum.append(total)
        object.__setattr__(self, "breakpoints", tuple(cum))

    @property
    def stock(self) -> float:
        return self.breakpoints[-1]

    def active_stratum(self, x: float) -> int:
        """1-based stratum index containing cumulative extraction x.

        Beyond the last breakpoint the last stratum index is reported.
        """
        if x < 0:
            raise ValueError("cumulative extraction must be nonnegative")
        for i, b in enumerate(self.breakpoints):
            if x <= b:
                return i + 1
        return len(self.amounts)


@dataclass(frozen=True)
class ExtendedModel:
    """Multi-period model: per-period prices, technologies, strata, bounds."""

    T: int
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    techs: tuple[TechParams, ...]
    strata: StrataTable
    r: float = 0.0
    tau_bounds: Optional[tuple[tuple[float, float], ...]] = None
    q_bounds: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        object.__setattr__(self, "techs", tuple(self.techs))
        if self.T < 1:
            raise ValueError("horizon T must be at least 1")
        if len(self.alpha) != self.T or len(self.beta) != self.T:
            raise ValueError("alpha and beta must have length T")
        if any(b <= 0 for b in self.beta):
            raise ValueError("price slopes beta_t must be positive")
        if self.r < 0:
            raise ValueError("discount rate must be nonnegative")
        if not self.techs:
            raise ValueError("at least one technology required")
        if len({t.tech_id for t in self.techs}) != len(self.techs):
            raise ValueError("technology ids must be unique")
        if any(len(t.slopes) != len(self.strata.amounts) for t in self.techs):
            raise ValueError("each technology needs one slope per stratum")
        # default decision-variable boxes: taxes up to the price intercept,
        # extraction up to the revenue-maximizing quantity
        if self.tau_bounds is None:
            object.__setattr__(
                self, "tau_bounds", tuple((0.0, a) for a in self.alpha)
            )
        else:
            object.__setattr__(
                self,
                "tau_bounds",
                tuple((float(lo), float(hi)) for lo, hi in self.tau_bounds),
            )
        if self.q_bounds is None:
            object.__setattr__(
                self,
                "q_bounds",
                tuple((0.0, a / (2.0 * b)) for a, b in zip(self.alpha, self.beta)),
            )
        else:
            object.__setattr__(
                self,
                "q_bounds",
                tuple((float(lo), float(hi)) for lo, hi in self.q_bounds),
            )
        for lo, hi in self.tau_bounds + self.q_bounds:
            if lo > hi:
                raise ValueError("bounds must be ordered low <= high")

    @property
    def stock(self) -> float:
        """Total resource stock; informational only (no hard constraint)."""
        return self.strata.stock

    def tech(self, tech_id: int) -> TechParams:
        for t in self.techs:
            if t.tech_id == tech_id:
                return t
        raise KeyError(f"unknown technology id {tech_id}")

    def discount(self, t: int) -> float:
        """Discount factor for 1-based period t."""
        return (1.0 + self.r) ** (-(t - 1))


@dataclass(frozen=True)
class LeaderStrategy:
    """Per-period tax vector of the regulator."""

    tau: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(float(x) for x in self.tau))
        if any(x < 0 for x in self.tau):
            raise ValueError("taxes must be nonnegative")


@dataclass(frozen=True)
class FollowerResponse:
    """Per-period extraction schedule plus chosen technology."""

    q: tuple[float, ...]
    a: int

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        if any(x < 0 for x in self.q):
            raise ValueError("extraction must be nonnegative")


@dataclass(frozen=True)
class ObjectivePoint:
    """Leader objectives plus the follower's profit at the same point."""

    revenue: float
    damage: float
    profit: float


def cumulative_cost(x: float, tech: TechParams, strata: StrataTable) -> float:
    """Piecewise-linear cumulative extraction/purification cost C(x).

    Marginal cost within stratum m is tech.slopes[m]; past the last
    breakpoint the last slope extends unbounded.
    """
    if x < 0:
        raise ValueError("cumulative extraction must be nonnegative")
    cost = 0.0
    prev = 0.0
    for slope, b in zip(tech.slopes, strata.breakpoints):
        if x <= b:
            return cost + slope * (x - prev)
        cost += slope * (b - prev)
        prev = b
    return cost + tech.slopes[-1] * (x - prev)


def extraction_rate_cost(q_t: float, tech: TechParams) -> float:
    """Quadratic cost of extracting q_t units within one period.

    The fixed component gamma_er is charged regardless of q_t.
    """
    if q_t < 0:
        raise ValueError("extraction must be nonnegative")
    return tech.alpha_er * q_t * q_t + tech.beta_er * q_t + tech.gamma_er


def period_profit(
    t: int,
    q_prefix: Sequence[float],
    tau_t: float,
    tech: TechParams,
    model: ExtendedModel,
) -> float:
    """Mine profit in period t (1-based) given extraction through period t.

    The extraction/purification charge is the increment of the cumulative
    cost curve between the previous and current cumulative totals.
    """
    if not 1 <= t <= model.T:
        raise ValueError(f"period {t} out of range 1..{model.T}")
    if len(q_prefix) != t:
        raise ValueError("q_prefix must cover periods 1..t")
    q_t = q_prefix[-1]
    if any(q < 0 for q in q_prefix):
        raise ValueError("extraction must be nonnegative")
    cum = sum(q_prefix)
    revenue = (model.alpha[t - 1] - model.beta[t - 1] * q_t) * q_t
    ep = cumulative_cost(cum, tech, model.strata) - cumulative_cost(
        cum - q_t, tech, model.strata
    )
    return revenue - extraction_rate_cost(q_t, tech) - ep - tau_t * q_t


def follower_total_profit(
    resp: FollowerResponse, strat: LeaderStrategy, model: ExtendedModel
) -> float:
    """Discounted sum of per-period mine profits."""
    if len(resp.q) != model.T or len(strat.tau) != model.T:
        raise ValueError("schedule lengths must equal the horizon T")
    tech = model.tech(resp.a)
    total = 0.0
    for t in range(1, model.T + 1):
        total += model.discount(t) * period_profit(
            t, resp.q[:t], strat.tau[t - 1], tech, model
        )
    return total


def leader_objectives(
    resp: FollowerResponse, strat: LeaderStrategy, model: ExtendedModel
) -> ObjectivePoint:
    """Leader's revenue (discounted) and damage (undiscounted) objectives.

    Damage is a physical quantity and is never discounted; only monetary
    flows carry the discount factor.
    """
    if len(resp.q) != model.T or len(strat.tau) != model.T:
        raise ValueError("schedule lengths must equal the horizon T")
    tech = model.tech(resp.a)
    revenue = sum(
        model.discount(t) * strat.tau[t - 1] * resp.q[t - 1]
        for t in range(1, model.T + 1)
    )
    damage = tech.k * sum(resp.q)
    return ObjectivePoint(
        revenue=revenue,
        damage=damage,
        profit=follower_total_profit(resp, strat, model),
    )


def analytical_as_extended(p: AnalyticalParams) -> ExtendedModel:
    """Embed the single-period model as a T=1 extended instance.

    The quadratic cost delta*q^2 + gamma*q maps onto the extraction-rate
    cost (alpha_er = delta, beta_er = 0, gamma_er = 0) plus a single
    stratum of slope gamma sized beyond any optimum. Requires phi = 0.
    """
    if p.phi != 0:
        raise ValueError("embedding requires zero fixed cost")
    stock = p.alpha / p.beta  # far beyond the unconstrained optimum
    tech = TechParams(
        tech_id=1,
        k=p.k,
        alpha_er=p.delta,
        beta_er=0.0,
        gamma_er=0.0,
        slopes=(p.gamma,),
    )
    return ExtendedModel(
        T=1,
        alpha=(p.alpha,),
        beta=(p.beta,),
        techs=(tech,),
        strata=StrataTable(amounts=(stock,)),
        r=0.0,
    )


# --- configuration loading -------------------------------------------------


def analytical_from_dict(d: dict) -> AnalyticalParams:
    try:
        return AnalyticalParams(
            alpha=float(d["alpha"]),
            beta=float(d["beta"]),
            delta=float(d["delta"]),
            gamma=float(d["gamma"]),
            phi=float(d.get("phi", 0.0)),
            k=float(d["k"]),
        )
    except KeyError as e:
        raise ValueError(f"analytical config missing field {e.args[0]!r}") from e


def extended_from_dict(d: dict) -> ExtendedModel:
    try:
        techs = tuple(
            TechParams(
                tech_id=int(td["tech_id"]),
                k=float(td["k"]),
                alpha_er=float(td["alpha_er"]),
                beta_er=float(td["beta_er"]),
                gamma_er=float(td["gamma_er"]),
                slopes=tuple(td["slopes"]),
            )
            for td in d["technologies"]
        )
        return ExtendedModel(
            T=int(d["T"]),
            alpha=tuple(d["alpha"]),
            beta=tuple(d["beta"]),
            techs=techs,
            strata=StrataTable(amounts=tuple(d["strata"])),
            r=float(d.get("r", 0.0)),
            tau_bounds=(
                tuple((lo, hi) for lo, hi in d["tau_bounds"])
                if d.get("tau_bounds") is not None
                else None
            ),
            q_bounds=(
                tuple((lo, hi) for lo, hi in d["q_bounds"])
                if d.get("q_bounds") is not None
                else None
            ),
        )
    except KeyError as e:
        raise ValueError(f"extended config missing field {e.args[0]!r}") from e


@dataclass(frozen=True)
class ModelConfig:
    analytical: Optional[AnalyticalParams]
    extended: Optional[ExtendedModel]


def config_from_dict(d: dict) -> ModelConfig:
    return ModelConfig(
        analytical=(
            analytical_from_dict(d["analytical"]) if "analytical" in d else None
        ),
        extended=extended_from_dict(d["extended"]) if "extended" in d else None,
    )


def load_config(path: str) -> ModelConfig:
    with open(path) as f:
        return config_from_dict(json.load(f))


def default_config() -> ModelConfig:
    """Bundled parameters: the published single- and multi-period instances."""
    text = resources.files("minetax").joinpath("data/default_config.json").read_text()
    return config_from_dict(json.loads(text))

"""Upper-level multi-objective evolutionary solver.

Evolves tax vectors, obtains follower best responses from the lower solver,
and maintains an archive of lower-level-optimal, mutually nondominated
(revenue up, damage down) solutions approximating the bilevel Pareto
frontier.
"""

from __future__ import annotations

import bisect
import statistics
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .lower import (
    BestResponse,
    LowerEaConfig,
    best_response,
    best_response_ea,
)
from .model import (
    ExtendedModel,
    FollowerResponse,
    LeaderStrategy,
    ObjectivePoint,
    leader_objectives,
)
from .variation import polynomial_mutation, sbx_crossover


@dataclass(frozen=True)
class ArchiveEntry:
    strategy: LeaderStrategy
    response: FollowerResponse
    objectives: ObjectivePoint
    optimality_tag: bool


def dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """True if a is at least as good as b (revenue up, damage down) and
    strictly better in one objective."""
    if a.revenue < b.revenue or a.damage > b.damage:
        return False
    return a.revenue > b.revenue or a.damage < b.damage


class ParetoArchive:
    """Nondominated set kept sorted by damage (and hence by revenue)."""

    def __init__(self):
        self._entries: list[ArchiveEntry] = []
        self._damages: list[float] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[ArchiveEntry]:
        return iter(self._entries)

    @property
    def entries(self) -> list[ArchiveEntry]:
        return list(self._entries)

    def insert(self, entry: ArchiveEntry) -> bool:
        """Insert if nondominated; evict entries the newcomer dominates.

        Untagged entries are rejected with an error. Returns True if the
        entry was admitted. Duplicate objective pairs are ignored.
        """
        if not entry.optimality_tag:
            raise ValueError("archive only admits lower-level-optimal entries")
        r, d = entry.objectives.revenue, entry.objectives.damage
        i = bisect.bisect_left(self._damages, d)
        # entries with strictly smaller damage sit before i; the one at i-1
        # carries the largest revenue among them
        if i > 0 and self._entries[i - 1].objectives.revenue >= r:
            return False
        if (
            i < len(self._entries)
            and self._damages[i] == d
            and self._entries[i].objectives.revenue >= r
        ):
            return False
        j = i
        while j < len(self._entries) and self._entries[j].objectives.revenue <= r:
            j += 1
        del self._entries[i:j]
        del self._damages[i:j]
        self._entries.insert(i, entry)
        self._damages.insert(i, d)
        return True

    def hypervolume(self, ref_revenue: float, ref_damage: float) -> float:
        """Area dominated by the archive relative to a reference point that
        is no better than any entry in either objective."""
        hv = 0.0
        for idx, e in enumerate(self._entries):
            d_next = (
                self._damages[idx + 1]
                if idx + 1 < len(self._entries)
                else ref_damage
            )
            if e.objectives.damage > ref_damage:
                break
            hv += (e.objectives.revenue - ref_revenue) * (
                d_next - e.objectives.damage
            )
        return hv


def archive_insert(archive: ParetoArchive, entry: ArchiveEntry) -> ParetoArchive:
    archive.insert(entry)
    return archive


def nondominated_sort(points: Sequence[ObjectivePoint]) -> list[list[int]]:
    """Fast nondominated sort; returns index fronts F1, F2, ..."""
    n = len(points)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    dom_count = [0] * n
    fronts: list[list[int]] = [[]]
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            if dominates(points[p], points[q]):
                dominated_by[p].append(q)
            elif dominates(points[q], points[p]):
                dom_count[p] += 1
        if dom_count[p] == 0:
            fronts[0].append(p)
    i = 0
    while fronts[i]:
        nxt = []
        for p in fronts[i]:
            for q in dominated_by[p]:
                dom_count[q] -= 1
                if dom_count[q] == 0:
                    nxt.append(q)
        i += 1
        fronts.append(nxt)
    fronts.pop()
    return fronts


def crowding_distance(
    front: Sequence[int], points: Sequence[ObjectivePoint]
) -> dict[int, float]:
    dist = {i: 0.0 for i in front}
    if len(front) <= 2:
        return {i: float("inf") for i in front}
    for get in (lambda p: p.revenue, lambda p: p.damage):
        order = sorted(front, key=lambda i: get(points[i]))
        lo, hi = get(points[order[0]]), get(points[order[-1]])
        dist[order[0]] = dist[order[-1]] = float("inf")
        span = hi - lo if hi > lo else 1.0
        for k in range(1, len(order) - 1):
            dist[order[k]] += (
                get(points[order[k + 1]]) - get(points[order[k - 1]])
            ) / span
    return dist


@dataclass(frozen=True)
class EaConfig:
    population_size: int = 40
    max_generations: int = 100
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None  # default 1/T
    eta_crossover: float = 15.0
    eta_mutation: float = 20.0
    seed: int = 0
    lower_solver_mode: str = "deterministic"  # or "ea"
    lower_ea: LowerEaConfig = field(default_factory=LowerEaConfig)
    hv_stall_tol: float = 1e-4
    hv_stall_generations: int = 20

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population size must be even and at least 4")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover rate must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation rate must lie in [0, 1]")
        if self.lower_solver_mode not in ("deterministic", "ea"):
            raise ValueError("lower_solver_mode must be 'deterministic' or 'ea'")


@dataclass
class _Individual:
    tau: np.ndarray
    entry: ArchiveEntry


def _evaluate(
    tau: np.ndarray,
    model: ExtendedModel,
    config: EaConfig,
    tech_filter: Optional[int],
) -> ArchiveEntry:
    strat = LeaderStrategy(tau=tuple(float(x) for x in tau))
    if config.lower_solver_mode == "ea":
        br: BestResponse = best_response_ea(
            strat, model, config.lower_ea, tech_filter=tech_filter
        )
    else:
        br = best_response(strat, model, tech_filter=tech_filter)
    obj = leader_objectives(br.response, strat, model)
    return ArchiveEntry(
        strategy=strat,
        response=br.response,
        objectives=obj,
        optimality_tag=br.optimality_tag,
    )


def reference_point(
    model: ExtendedModel, tech_filter: Optional[int] = None
) -> tuple[float, float]:
    """Fixed hypervolume reference: zero revenue, worst-case damage."""
    techs = model.techs if tech_filter is None else (model.tech(tech_filter),)
    k_max = max(t.k for t in techs)
    return 0.0, k_max * sum(hi for _, hi in model.q_bounds)


def evolve(
    model: ExtendedModel,
    config: EaConfig,
    tech_filter: Optional[int] = None,
) -> ParetoArchive:
    """NSGA-II-style evolution of tax strategies with a bilevel archive.

    The returned archive additionally carries `generations_run`,
    `hv_history`, and `failed_evaluations` attributes for reporting.
    """
    rng = np.random.default_rng(config.seed)
    lows = np.array([lo for lo, _ in model.tau_bounds])
    highs = np.array([hi for _, hi in model.tau_bounds])
    mut_rate = (
        config.mutation_rate if config.mutation_rate is not None else 1.0 / model.T
    )
    ref_r, ref_d = reference_point(model, tech_filter)
    archive = ParetoArchive()
    failed = 0

    def make(tau: np.ndarray) -> _Individual:
        nonlocal failed
        ind = _Individual(tau=tau, entry=_evaluate(tau, model, config, tech_filter))
        if ind.entry.optimality_tag:
            archive.insert(ind.entry)
        else:
            failed += 1
        return ind

    pop = [
        make(tau)
        for tau in rng.uniform(lows, highs, size=(config.population_size, model.T))
    ]
    hv_history = [archive.hypervolume(ref_r, ref_d)]
    gens = 0
    for _ in range(config.max_generations):
        points = [ind.entry.objectives for ind in pop]
        fronts = nondominated_sort(points)
        rank = [0] * len(pop)
        crowd = [0.0] * len(pop)
        for fi, front in enumerate(fronts):
            cd = crowding_distance(front, points)
            for i in front:
                rank[i] = fi
                crowd[i] = cd[i]

        def tournament() -> np.ndarray:
            i, j = rng.integers(len(pop), size=2)
            if rank[i] != rank[j]:
                return pop[i if rank[i] < rank[j] else j].tau
            return pop[i if crowd[i] >= crowd[j] else j].tau

        offspring = []
        while len(offspring) < config.population_size:
            c1, c2 = sbx_crossover(
                tournament(),
                tournament(),
                lows,
                highs,
                config.eta_crossover,
                config.crossover_rate,
                rng,
            )
            for c in (c1, c2):
                offspring.append(
                    make(
                        polynomial_mutation(
                            c, lows, highs, config.eta_mutation, mut_rate, rng
                        )
                    )
                )
        offspring = offspring[: config.population_size]
        # environmental selection on the merged population
        merged = pop + offspring
        points = [ind.entry.objectives for ind in merged]
        fronts = nondominated_sort(points)
        survivors: list[_Individual] = []
        for front in fronts:
            if len(survivors) + len(front) <= config.population_size:
                survivors.extend(merged[i] for i in front)
            else:
                cd = crowding_distance(front, points)
                chosen = sorted(front, key=lambda i: -cd[i])
                survivors.extend(
                    merged[i]
                    for i in chosen[: config.population_size - len(survivors)]
                )
                break
        pop = survivors
        gens += 1
        hv_history.append(archive.hypervolume(ref_r, ref_d))
        stall = config.hv_stall_generations
        if (
            gens >= stall
            and hv_history[-1] - hv_history[-1 - stall] < config.hv_stall_tol
        ):
            break
    archive.generations_run = gens
    archive.hv_history = hv_history
    archive.failed_evaluations = failed
    return archive


def detect_strata_kinks(
    entries: Sequence[ArchiveEntry],
    boundaries: Sequence[float],
    gap_factor: float = 5.0,
    slope_change: float = 0.5,
) -> list[float]:
    """Boundaries in cumulative extraction where the frontier shows a kink.

    For each boundary, finds the consecutive frontier pair (sorted by
    damage) whose total extraction brackets it and flags the boundary when
    the damage gap there is an outlier or the local revenue-vs-damage slope
    changes by more than `slope_change` relative.
    """
    pts = sorted(
        (
            (
                e.objectives.damage,
                e.objectives.revenue,
                sum(e.response.q),
            )
            for e in entries
        ),
        key=lambda p: p[0],
    )
    if len(pts) < 3:
        return []
    gaps = [pts[i + 1][0] - pts[i][0] for i in range(len(pts) - 1)]
    median_gap = statistics.median(gaps)
    detected = []
    for b in boundaries:
        hit = None
        for i in range(len(pts) - 1):
            if pts[i][2] <= b + 1e-6 < pts[i + 1][2]:
                hit = i
                break
        if hit is None:
            continue
        d0, r0, _ = pts[hit]
        d1, r1, _ = pts[hit + 1]
        gap = d1 - d0
        if median_gap > 0 and gap > gap_factor * median_gap:
            detected.append(b)
            continue
        if hit >= 1 and gap > 0:
            dm, rm, _ = pts[hit - 1]
            if d0 - dm > 0:
                slope_before = (r0 - rm) / (d0 - dm)
                slope_across = (r1 - r0) / (d1 - d0)
                scale = max(abs(slope_before), abs(slope_across), 1e-12)
                if abs(slope_across - slope_before) / scale > slope_change:
                    detected.append(b)
    return detected

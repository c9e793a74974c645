"""Bilevel mining-taxation game: models, solvers, and oracles."""

from .model import (
    AnalyticalParams,
    ExtendedModel,
    FollowerResponse,
    LeaderStrategy,
    ObjectivePoint,
    StrataTable,
    TechParams,
    analytical_as_extended,
    cumulative_cost,
    default_config,
    extraction_rate_cost,
    follower_total_profit,
    leader_objectives,
    load_config,
    period_profit,
)
from .analytical import (
    WeightedSolution,
    feasibility_threshold,
    follower_best_response,
    optimal_extraction,
    optimal_tax,
    pareto_sweep,
)
from .lower import (
    BestResponse,
    LowerEaConfig,
    best_response,
    best_response_ea,
    best_response_fixed_tech,
)
from .bilevel import (
    ArchiveEntry,
    EaConfig,
    ParetoArchive,
    archive_insert,
    crowding_distance,
    detect_strata_kinks,
    dominates,
    evolve,
    nondominated_sort,
    reference_point,
)
from .oracle import GridSpec, grid_best_response, weighted_scalar_check

__all__ = [
    "AnalyticalParams",
    "ArchiveEntry",
    "BestResponse",
    "EaConfig",
    "ExtendedModel",
    "FollowerResponse",
    "GridSpec",
    "LeaderStrategy",
    "LowerEaConfig",
    "ObjectivePoint",
    "ParetoArchive",
    "StrataTable",
    "TechParams",
    "WeightedSolution",
    "analytical_as_extended",
    "archive_insert",
    "best_response",
    "best_response_ea",
    "best_response_fixed_tech",
    "crowding_distance",
    "cumulative_cost",
    "default_config",
    "detect_strata_kinks",
    "dominates",
    "evolve",
    "extraction_rate_cost",
    "feasibility_threshold",
    "follower_best_response",
    "follower_total_profit",
    "grid_best_response",
    "leader_objectives",
    "load_config",
    "nondominated_sort",
    "optimal_extraction",
    "optimal_tax",
    "pareto_sweep",
    "period_profit",
    "reference_point",
    "weighted_scalar_check",
]

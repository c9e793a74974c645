"""Command-line front end.

Loads model parameters from JSON, runs the analytical sweep or the
evolutionary bilevel solver, and writes plot-ready CSV/JSON artifacts.
Exit codes: 0 success, 1 usage/config error, 2 verification failure,
3 empty-result warning.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import analytical as ana
from .bilevel import ArchiveEntry, EaConfig, evolve
from .model import (
    ModelConfig,
    default_config,
    leader_objectives,
    load_config,
    period_profit,
)
from .verify import format_report, run_all_checks

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_EMPTY = 3


@dataclass
class RunConfig:
    model: str = "analytical"
    config_path: Optional[str] = None
    tech: str = "all"
    points: int = 100
    pop_size: int = 40
    generations: int = 100
    seed: int = 0
    out: str = "."
    min_revenue: Optional[float] = None
    max_damage: Optional[float] = None
    verify: bool = False
    quick: bool = False

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "config_path": self.config_path,
            "tech": self.tech,
            "points": self.points,
            "pop_size": self.pop_size,
            "generations": self.generations,
            "seed": self.seed,
            "out": self.out,
            "min_revenue": self.min_revenue,
            "max_damage": self.max_damage,
            "verify": self.verify,
            "quick": self.quick,
        }


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load(cfg: RunConfig) -> ModelConfig:
    if cfg.config_path is None:
        return default_config()
    return load_config(cfg.config_path)


def run_analytical(cfg: RunConfig) -> int:
    models = _load(cfg)
    if models.analytical is None:
        raise ValueError("config has no 'analytical' section")
    p = models.analytical
    if cfg.points < 2:
        raise ValueError("'points' must be at least 2")
    sweep = ana.pareto_sweep(p, cfg.points)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    ana.sweep_to_csv(sweep, str(path))
    lo, hi = sweep[0], sweep[-1]
    print(
        f"wrote {path}: {len(sweep)} points, w in "
        f"[{_fmt(lo.w)}, {_fmt(hi.w)}], "
        f"revenue [{_fmt(lo.revenue)}, {_fmt(hi.revenue)}], "
        f"damage [{_fmt(lo.damage)}, {_fmt(hi.damage)}]"
    )
    return EXIT_OK


def _write_frontier(path: Path, entries: list[ArchiveEntry], T: int) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            ["id", "tech", "revenue", "damage", "profit"]
            + [f"tau_{t}" for t in range(1, T + 1)]
            + [f"q_{t}" for t in range(1, T + 1)]
        )
        for i, e in enumerate(entries):
            writer.writerow(
                [i, e.response.a]
                + [
                    _fmt(v)
                    for v in (
                        e.objectives.revenue,
                        e.objectives.damage,
                        e.objectives.profit,
                    )
                ]
                + [_fmt(v) for v in e.strategy.tau]
                + [_fmt(v) for v in e.response.q]
            )


def _write_schedules(path: Path, entries: list[ArchiveEntry], model) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(
            [
                "id",
                "period",
                "tau",
                "q",
                "period_profit",
                "cumulative_extraction",
                "active_stratum",
            ]
        )
        for i, e in enumerate(entries):
            tech = model.tech(e.response.a)
            cum = 0.0
            for t in range(1, model.T + 1):
                cum += e.response.q[t - 1]
                pi = period_profit(
                    t, e.response.q[:t], e.strategy.tau[t - 1], tech, model
                )
                writer.writerow(
                    [
                        i,
                        t,
                        _fmt(e.strategy.tau[t - 1]),
                        _fmt(e.response.q[t - 1]),
                        _fmt(pi),
                        _fmt(cum),
                        model.strata.active_stratum(cum),
                    ]
                )


def run_extended(cfg: RunConfig) -> int:
    models = _load(cfg)
    if models.extended is None:
        raise ValueError("config has no 'extended' section")
    model = models.extended
    tech_filter: Optional[int]
    if cfg.tech == "all":
        tech_filter = None
    else:
        tech_filter = int(cfg.tech)
        model.tech(tech_filter)  # validate early
    ea = EaConfig(
        population_size=cfg.pop_size,
        max_generations=cfg.generations,
        seed=cfg.seed,
    )
    start = time.perf_counter()
    archive = evolve(model, ea, tech_filter=tech_filter)
    elapsed = time.perf_counter() - start
    entries = archive.entries
    filtered = [
        e
        for e in entries
        if (cfg.min_revenue is None or e.objectives.revenue >= cfg.min_revenue)
        and (cfg.max_damage is None or e.objectives.damage <= cfg.max_damage)
    ]
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_frontier(out / "frontier.csv", filtered, model.T)
    _write_schedules(out / "schedule.csv", filtered, model)
    meta = {
        "config": cfg.as_dict(),
        "seed": cfg.seed,
        "generations_executed": archive.generations_run,
        "archive_size": len(entries),
        "filtered_size": len(filtered),
        "failed_evaluations": archive.failed_evaluations,
        "wall_time_seconds": elapsed,
    }
    with open(out / "meta.json", "w") as f:
        json.dump(meta, f, indent=2)
    print(
        f"wrote {out / 'frontier.csv'}: {len(filtered)} of {len(entries)} "
        f"archive points after filtering, {archive.generations_run} generations, "
        f"{elapsed:.1f}s"
    )
    if not filtered:
        print("warning: objective-bound filter excluded every solution")
        return EXIT_EMPTY
    return EXIT_OK


def run_verify(cfg: RunConfig) -> int:
    models = _load(cfg)
    if models.analytical is None:
        raise ValueError("config has no 'analytical' section")
    results = run_all_checks(models.analytical, models.extended, quick=cfg.quick)
    print(format_report(results))
    if all(r.passed for r in results):
        print("all checks passed")
        return EXIT_OK
    print("verification FAILED")
    return EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minetax",
        description=(
            "Bilevel mining-taxation game: analytical Pareto sweep, "
            "evolutionary bilevel solver, and verification oracles."
        ),
    )
    parser.add_argument(
        "--model",
        choices=["analytical", "extended"],
        default="analytical",
        help="which model to run",
    )
    parser.add_argument("--config", help="JSON parameter file (default: bundled)")
    parser.add_argument(
        "--tech",
        default="all",
        help="technology filter for the extended model ('all' or an id)",
    )
    parser.add_argument(
        "--points", type=int, default=100, help="analytical sweep size"
    )
    parser.add_argument("--pop-size", type=int, default=40)
    parser.add_argument("--generations", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--min-revenue", type=float, default=None)
    parser.add_argument("--max-damage", type=float, default=None)
    parser.add_argument(
        "--verify", action="store_true", help="run the verification battery"
    )
    parser.add_argument(
        "--quick", action="store_true", help="smaller budgets for --verify"
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        model=args.model,
        config_path=args.config,
        tech=args.tech,
        points=args.points,
        pop_size=args.pop_size,
        generations=args.generations,
        seed=args.seed,
        out=args.out,
        min_revenue=args.min_revenue,
        max_damage=args.max_damage,
        verify=args.verify,
        quick=args.quick,
    )
    try:
        if cfg.verify:
            return run_verify(cfg)
        if cfg.model == "analytical":
            return run_analytical(cfg)
        return run_extended(cfg)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

import pytest

from minetax import (
    ArchiveEntry,
    EaConfig,
    ExtendedModel,
    FollowerResponse,
    LeaderStrategy,
    ObjectivePoint,
    ParetoArchive,
    best_response,
    crowding_distance,
    detect_strata_kinks,
    dominates,
    evolve,
    leader_objectives,
    nondominated_sort,
    reference_point,
)


def _entry(revenue, damage, tagged=True):
    return ArchiveEntry(
        strategy=LeaderStrategy(tau=(0.0,)),
        response=FollowerResponse(q=(0.0,), a=1),
        objectives=ObjectivePoint(revenue=revenue, damage=damage, profit=0.0),
        optimality_tag=tagged,
    )


class TestDominates:
    def test_strictly_better(self):
        assert dominates(
            ObjectivePoint(10.0, 1.0, 0.0), ObjectivePoint(5.0, 2.0, 0.0)
        )

    def test_tradeoff_is_incomparable(self):
        a = ObjectivePoint(10.0, 3.0, 0.0)
        b = ObjectivePoint(5.0, 1.0, 0.0)
        assert not dominates(a, b)
        assert not dominates(b, a)

    def test_equal_points_do_not_dominate(self):
        a = ObjectivePoint(10.0, 1.0, 0.0)
        assert not dominates(a, a)

    def test_weak_dominance_counts(self):
        assert dominates(
            ObjectivePoint(10.0, 1.0, 0.0), ObjectivePoint(10.0, 2.0, 0.0)
        )


class TestParetoArchive:
    def test_insert_and_sort_order(self):
        arch = ParetoArchive()
        assert arch.insert(_entry(10.0, 5.0))
        assert arch.insert(_entry(4.0, 1.0))
        assert arch.insert(_entry(7.0, 3.0))
        damages = [e.objectives.damage for e in arch]
        revenues = [e.objectives.revenue for e in arch]
        assert damages == [1.0, 3.0, 5.0]
        assert revenues == [4.0, 7.0, 10.0]

    def test_dominated_newcomer_rejected(self):
        arch = ParetoArchive()
        arch.insert(_entry(10.0, 2.0))
        assert not arch.insert(_entry(8.0, 3.0))
        assert len(arch) == 1

    def test_newcomer_evicts_dominated_entries(self):
        arch = ParetoArchive()
        arch.insert(_entry(4.0, 1.0))
        arch.insert(_entry(7.0, 3.0))
        arch.insert(_entry(10.0, 5.0))
        assert arch.insert(_entry(11.0, 2.0))
        revenues = [e.objectives.revenue for e in arch]
        assert revenues == [4.0, 11.0]

    def test_duplicate_objectives_ignored(self):
        arch = ParetoArchive()
        arch.insert(_entry(10.0, 2.0))
        assert not arch.insert(_entry(10.0, 2.0))
        assert len(arch) == 1

    def test_untagged_entry_raises(self):
        arch = ParetoArchive()
        with pytest.raises(ValueError):
            arch.insert(_entry(10.0, 2.0, tagged=False))

    def test_hypervolume_rectangles(self):
        arch = ParetoArchive()
        arch.insert(_entry(4.0, 1.0))
        arch.insert(_entry(10.0, 5.0))
        # (4-0)*(5-1) + (10-0)*(8-5)
        assert arch.hypervolume(0.0, 8.0) == pytest.approx(46.0)

    def test_hypervolume_empty(self):
        assert ParetoArchive().hypervolume(0.0, 10.0) == 0.0


class TestNondominatedSort:
    def test_layered_fronts(self):
        pts = [
            ObjectivePoint(10.0, 1.0, 0.0),  # front 0
            ObjectivePoint(5.0, 0.5, 0.0),   # front 0
            ObjectivePoint(9.0, 2.0, 0.0),   # dominated by pts[0]
            ObjectivePoint(4.0, 3.0, 0.0),   # dominated twice over
        ]
        fronts = nondominated_sort(pts)
        assert sorted(fronts[0]) == [0, 1]
        assert fronts[1] == [2]
        assert fronts[2] == [3]

    def test_all_nondominated(self):
        pts = [ObjectivePoint(float(i), float(i), 0.0) for i in range(5)]
        fronts = nondominated_sort(pts)
        assert len(fronts) == 1
        assert sorted(fronts[0]) == list(range(5))


class TestCrowdingDistance:
    def test_extremes_infinite(self):
        pts = [ObjectivePoint(float(i), float(i), 0.0) for i in range(4)]
        cd = crowding_distance([0, 1, 2, 3], pts)
        assert cd[0] == float("inf")
        assert cd[3] == float("inf")
        assert cd[1] == pytest.approx(4.0 / 3.0)

    def test_tiny_front(self):
        pts = [ObjectivePoint(1.0, 1.0, 0.0), ObjectivePoint(2.0, 2.0, 0.0)]
        cd = crowding_distance([0, 1], pts)
        assert all(v == float("inf") for v in cd.values())


class TestEaConfig:
    def test_odd_population_rejected(self):
        with pytest.raises(ValueError):
            EaConfig(population_size=7)

    def test_tiny_population_rejected(self):
        with pytest.raises(ValueError):
            EaConfig(population_size=2)

    def test_bad_lower_mode_rejected(self):
        with pytest.raises(ValueError):
            EaConfig(lower_solver_mode="exact")


class TestEvolve:
    def test_degenerate_bounds_give_single_point(self, model):
        fixed = ExtendedModel(
            T=model.T, alpha=model.alpha, beta=model.beta,
            techs=model.techs, strata=model.strata,
            tau_bounds=tuple((10.0, 10.0) for _ in range(model.T)),
        )
        cfg = EaConfig(
            population_size=4, max_generations=3,
            crossover_rate=0.0, mutation_rate=0.0, seed=1,
        )
        arch = evolve(fixed, cfg)
        assert len(arch) == 1
        strat = LeaderStrategy(tau=(10.0,) * model.T)
        br = best_response(strat, fixed)
        expected = leader_objectives(br.response, strat, fixed)
        got = arch.entries[0].objectives
        assert got.revenue == pytest.approx(expected.revenue)
        assert got.damage == pytest.approx(expected.damage)

    def test_archive_entries_reevaluate_consistently(self, model):
        cfg = EaConfig(population_size=12, max_generations=8, seed=3)
        arch = evolve(model, cfg)
        assert len(arch) > 0
        for e in list(arch)[::5]:
            br = best_response(e.strategy, model)
            assert br.profit == pytest.approx(
                e.objectives.profit, rel=1e-9, abs=1e-6
            )
            obj = leader_objectives(e.response, e.strategy, model)
            assert obj.revenue == pytest.approx(e.objectives.revenue)
            assert obj.damage == pytest.approx(e.objectives.damage)

    def test_archive_mutually_nondominated(self, model):
        cfg = EaConfig(population_size=12, max_generations=8, seed=5)
        entries = evolve(model, cfg).entries
        for a, b in zip(entries, entries[1:]):
            assert b.objectives.damage > a.objectives.damage
            assert b.objectives.revenue > a.objectives.revenue

    def test_hv_history_nondecreasing(self, model):
        cfg = EaConfig(population_size=12, max_generations=10, seed=7)
        arch = evolve(model, cfg)
        assert arch.generations_run >= 1
        assert len(arch.hv_history) == arch.generations_run + 1
        for a, b in zip(arch.hv_history, arch.hv_history[1:]):
            assert b >= a - 1e-12

    def test_seed_reproducibility(self, model):
        cfg = EaConfig(population_size=8, max_generations=5, seed=21)
        a = evolve(model, cfg)
        b = evolve(model, cfg)
        assert [e.strategy.tau for e in a] == [e.strategy.tau for e in b]
        assert [e.objectives for e in a] == [e.objectives for e in b]

    def test_tech_filter_pins_technology(self, model):
        cfg = EaConfig(population_size=8, max_generations=5, seed=9)
        arch = evolve(model, cfg, tech_filter=2)
        assert len(arch) > 0
        assert all(e.response.a == 2 for e in arch)

    def test_no_failed_evaluations_in_deterministic_mode(self, model):
        cfg = EaConfig(population_size=8, max_generations=5, seed=11)
        arch = evolve(model, cfg)
        assert arch.failed_evaluations == 0


class TestReferencePoint:
    def test_worst_case_corner(self, model):
        ref_r, ref_d = reference_point(model)
        assert ref_r == 0.0
        k_max = max(t.k for t in model.techs)
        total = sum(hi for _, hi in model.q_bounds)
        assert ref_d == pytest.approx(k_max * total)

    def test_filtered_uses_single_tech(self, model):
        _, ref_d = reference_point(model, tech_filter=1)
        total = sum(hi for _, hi in model.q_bounds)
        assert ref_d == pytest.approx(model.tech(1).k * total)


class TestDetectStrataKinks:
    def test_synthetic_slope_break(self):
        # piecewise-linear frontier: slope 10 up to damage 5, slope 2 after;
        # total extraction crosses the boundary 20 exactly at the break
        entries = []
        for i in range(11):
            d = 0.5 * i
            entries.append(_synthetic(d, 10.0 * d, 4.0 * d))
        for i in range(1, 11):
            d = 5.0 + 0.5 * i
            entries.append(_synthetic(d, 50.0 + 2.0 * (d - 5.0), 20.0 + 4.0 * (d - 5.0)))
        assert detect_strata_kinks(entries, [20.0, 1000.0]) == [20.0]

    def test_smooth_frontier_clean(self):
        entries = [_synthetic(0.5 * i, 5.0 * i, 2.0 * i) for i in range(20)]
        assert detect_strata_kinks(entries, [10.0]) == []

    def test_too_few_points(self):
        entries = [_synthetic(0.0, 0.0, 0.0), _synthetic(1.0, 1.0, 5.0)]
        assert detect_strata_kinks(entries, [2.0]) == []


def _synthetic(damage, revenue, total_extraction):
    return ArchiveEntry(
        strategy=LeaderStrategy(tau=(0.0,)),
        response=FollowerResponse(q=(total_extraction,), a=1),
        objectives=ObjectivePoint(revenue=revenue, damage=damage, profit=0.0),
        optimality_tag=True,
    )

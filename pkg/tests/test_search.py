import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import dfs_pool, global_optimum
from evcrp import search
from evcrp.encoding import decode, layout_for_vehicle
from evcrp.hamiltonian import BudgetExceeded
from evcrp.model import Instance, VehicleSpec, check_global, check_partial, replace


def as_tuples(pool):
    return sorted((tuple(e.trajectory.cl), tuple(e.trajectory.pow), tuple(e.trajectory.pos))
                  for e in pool.entries)


class TestEnumerate:
    def test_toy_sizes(self, toy_pools):
        assert [len(p) for p in toy_pools] == [6, 22, 4, 19]

    def test_matches_dfs(self, toy, toy_pools):
        for n, pool in enumerate(toy_pools):
            assert as_tuples(pool) == sorted(dfs_pool(toy, n))

    def test_order_is_strict(self, toy_pools):
        for pool in toy_pools:
            keys = [(e.cost, e.index) for e in pool.entries]
            assert keys == sorted(keys)
            assert len(set(keys)) == len(keys)

    def test_rejected_indices_infeasible(self, toy, toy_pools):
        layout = layout_for_vehicle(toy)
        rng = random.Random(0)
        for n, pool in enumerate(toy_pools):
            kept = {e.index for e in pool.entries}
            for _ in range(2000):
                i = rng.randrange(layout.total_dimension)
                assert check_partial(toy, n, decode(layout, i)).feasible == (i in kept)

    def test_unreachable_target_gives_empty_pool(self, toy):
        # four steps at one unit each cannot lift charge 1 to 6
        inst = replace(toy, cl_max=6, vehicles=(VehicleSpec(1, 1, 1, 6),) + toy.vehicles[1:])
        assert len(search.enumerate_feasible(inst, 0)) == 0

    def test_budget_refusal(self, toy):
        with pytest.raises(BudgetExceeded):
            search.enumerate_feasible(toy, 0, budget=1000)

    def test_threads_agree(self, toy, toy_pools):
        assert search.enumerate_all(toy, threads=4) == toy_pools


class TestLevelTuples:
    def test_two_by_two(self):
        assert list(search.level_tuples((2, 2), 1)) == [(0, 1), (1, 0)]

    def test_level_zero(self):
        assert list(search.level_tuples((6, 22, 4, 19), 0)) == [(0, 0, 0, 0)]

    def test_out_of_range(self):
        assert list(search.level_tuples((2, 3), 4)) == []
        assert list(search.level_tuples((2, 3), -1)) == []

    @given(st.lists(st.integers(1, 4), min_size=1, max_size=4))
    def test_partition_of_product(self, sizes):
        seen = []
        for level in range(sum(sizes)):
            tuples = list(search.level_tuples(sizes, level))
            assert tuples == sorted(tuples)
            assert all(sum(t) == level for t in tuples)
            seen.extend(tuples)
        assert sorted(seen) == list(itertools.product(*(range(s) for s in sizes)))


class TestBruteForce:
    def test_toy_stats(self, toy, toy_pools):
        best, stats = search.brute_force(toy, toy_pools)
        assert stats.total_combinations == 10032
        assert stats.feasible_combinations == 6246
        assert (stats.cost_minimum, stats.cost_maximum) == (31, 48)
        assert list(stats.cost_histogram) == list(range(31, 49))
        assert best.cost == 31 and best.is_certified_optimal

    def test_strict_reading(self, toy_pools):
        from evcrp.model import toy_instance

        strict = toy_instance("strict")
        best, stats = search.brute_force(strict, toy_pools)
        assert stats.feasible_combinations == 144
        assert list(stats.cost_histogram) == [34]

    def test_ties_take_smallest_tuple(self, mini):
        pools = search.enumerate_all(mini)
        best, stats = search.brute_force(mini, pools)
        assert stats.cost_histogram[best.cost] >= 2
        winners = [c for c in itertools.product(*(range(len(p)) for p in pools))
                   if search._Combiner(mini, pools).grid_ok(c)
                   and sum(p[i].cost for p, i in zip(pools, c)) == best.cost]
        assert best.choice == min(winners)

    def test_matches_global_enumeration(self, mini):
        best, stats = search.brute_force(mini, search.enumerate_all(mini))
        assert global_optimum(mini) == (best.cost, stats.feasible_combinations)

    def test_empty_pool(self, toy):
        inst = replace(toy, cl_max=6, vehicles=(VehicleSpec(1, 1, 1, 6),) + toy.vehicles[1:])
        with pytest.raises(search.InfeasibleError):
            search.brute_force(inst, search.enumerate_all(inst))

    def test_product_budget(self, toy, toy_pools):
        with pytest.raises(BudgetExceeded):
            search.brute_force(toy, toy_pools, budget=10_000)


class TestGreedy:
    def test_toy(self, toy, toy_pools):
        g = search.greedy_tree(toy, toy_pools)
        assert g.level_reached == 2 and g.cost == 31
        assert check_global(toy, g.solution).feasible
        assert not g.is_certified_optimal

    def test_level_zero_violates_grid(self, toy, toy_pools):
        first = search._Combiner(toy, toy_pools)
        assert not first.grid_ok((0, 0, 0, 0))

    def test_first_hit(self, toy, toy_pools):
        g = search.greedy_tree(toy, toy_pools, first_hit=True)
        assert g.level_reached == 2
        assert g.choice == next(c for c in search.level_tuples([len(p) for p in toy_pools], 2)
                                if search._Combiner(toy, toy_pools).grid_ok(c))

    def test_never_beats_brute_force(self, toy_pools):
        from evcrp.model import toy_instance

        for bounds in ("strict", "inclusive"):
            inst = toy_instance(bounds)
            best, _ = search.brute_force(inst, toy_pools)
            g = search.greedy_tree(inst, toy_pools)
            assert g.cost >= best.cost

    def test_without_grid_limit(self, toy, toy_pools):
        loose = replace(toy, pow_lim_neg=-100, pow_lim_pos=100)
        g = search.greedy_tree(loose, toy_pools)
        assert g.level_reached == 0
        assert g.cost == sum(p[0].cost for p in toy_pools)

    def test_single_entry_pools(self, toy, toy_pools):
        pools = [search.PartialPool(p.vehicle_index, p.entries[:1]) for p in toy_pools]
        loose = replace(toy, pow_lim_neg=-4, pow_lim_pos=4)
        assert search.greedy_tree(loose, pools).choice == (0, 0, 0, 0)

    def test_max_level_exhausted(self, toy, toy_pools):
        with pytest.raises(search.InfeasibleError):
            search.greedy_tree(toy, toy_pools, max_level=1)

    def test_mini(self, mini):
        pools = search.enumerate_all(mini)
        best, _ = search.brute_force(mini, pools)
        g = search.greedy_tree(mini, pools)
        assert g.cost >= best.cost


class TestApproximationRatio:
    def test_values(self):
        assert search.approximation_ratio(36, 31) == Fraction(36, 31)
        assert round(float(search.approximation_ratio(36, 31)), 2) == 1.16
        assert search.approximation_ratio(Fraction(7, 2), Fraction(7, 2)) == 1
        assert float(search.approximation_ratio(48, 31)) == pytest.approx(1.548, abs=1e-3)

    @pytest.mark.parametrize("optimum", [0, -3])
    def test_nonpositive_rejected(self, optimum):
        with pytest.raises(ValueError, match="nonpositive"):
            search.approximation_ratio(5, optimum)


def test_single_vehicle_instance():
    inst = Instance(
        num_vehicles=1, num_steps=1, num_nodes=1, edge_weight=((0,),), buy_price=(2,),
        sell_price=(1,), pow_max=1, cl_min=0, cl_max=1, pow_lim_neg=-1, pow_lim_pos=1,
        vehicles=(VehicleSpec(1, 1, 0, 0),), grid_bounds="inclusive",
    )
    pools = search.enumerate_all(inst)
    assert len(pools[0]) == 2
    best, stats = search.brute_force(inst, pools)
    assert best.cost == 0 and stats.feasible_combinations == 2

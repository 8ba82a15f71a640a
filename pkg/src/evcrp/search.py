"""Classical global-solution stage: partial-solution pools, brute force, greedy tree."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import encoding
from .encoding import CL, POS
from .hamiltonian import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    DiagonalHamiltonian,
    PenaltyWeights,
    feasible_mask_block,
)
from .model import (
    GlobalSolution,
    Instance,
    VehicleTrajectory,
    check_global,
    check_partial,
    trajectory_cost,
)

BRUTE = "brute"
GREEDY = "greedy"

DEFAULT_PRODUCT_BUDGET = 10**7


class InfeasibleError(RuntimeError):
    """No global solution exists (or none was found within the search limits)."""


@dataclass(frozen=True)
class PoolEntry:
    trajectory: VehicleTrajectory
    cost: Fraction
    index: int  # basis index in the vehicle's qudit layout


@dataclass(frozen=True)
class PartialPool:
    vehicle_index: int
    entries: Tuple[PoolEntry, ...]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> PoolEntry:
        return self.entries[i]

    @property
    def costs(self) -> List[Fraction]:
        return [e.cost for e in self.entries]


@dataclass(frozen=True)
class SearchResult:
    solution: GlobalSolution
    cost: Fraction
    method: str
    choice: Tuple[int, ...]  # pool position chosen for each vehicle
    combinations_examined: int
    level_reached: Optional[int] = None

    @property
    def is_certified_optimal(self) -> bool:
        return self.method == BRUTE


@dataclass
class GlobalStats:
    total_combinations: int = 0
    feasible_combinations: int = 0
    cost_histogram: Dict[Fraction, int] = field(default_factory=dict)

    @property
    def cost_minimum(self) -> Optional[Fraction]:
        return min(self.cost_histogram) if self.cost_histogram else None

    @property
    def cost_maximum(self) -> Optional[Fraction]:
        return max(self.cost_histogram) if self.cost_histogram else None


def _boundary_prefix_ok(inst: Instance, vehicle_index: int, layout, prefix) -> bool:
    spec = inst.vehicles[vehicle_index]
    fixed = {(CL, 0): spec.cl_initial, (POS, 0): spec.pos_initial}
    for (kind, t), value in fixed.items():
        p = layout.position(kind, t)
        if p < len(prefix) and prefix[p] + layout.qudits[p].low != value:
            return False
    return True


def enumerate_feasible(
    inst: Instance, vehicle_index: int, budget: int = DEFAULT_BUDGET
) -> PartialPool:
    """All trajectories of one vehicle passing the single-vehicle checks.

    Scans the vehicle's full basis block by block, skipping blocks whose
    leading digits already contradict the fixed initial state. Survivors are
    re-checked with :func:`check_partial` and sorted by (cost, basis index).
    """
    ham = DiagonalHamiltonian(inst, vehicle_index, PenaltyWeights())
    layout = ham.layout
    if layout.total_dimension > budget:
        raise BudgetExceeded(f"per-vehicle basis has {layout.total_dimension} states, budget is {budget}")
    hits: List[int] = []
    for prefix, start in ham.blocks():
        if not _boundary_prefix_ok(inst, vehicle_index, layout, prefix):
            continue
        mask = feasible_mask_block(ham, prefix)
        hits.extend(int(i) + start for i in np.flatnonzero(mask.ravel()))
    entries = []
    for index in hits:
        v = encoding.decode(layout, index)
        report = check_partial(inst, vehicle_index, v)
        if not report.feasible:
            raise AssertionError(f"vectorised scan and checker disagree on index {index}: {report}")
        entries.append(PoolEntry(v, trajectory_cost(inst, v), index))
    entries.sort(key=lambda e: (e.cost, e.index))
    return PartialPool(vehicle_index, tuple(entries))


def enumerate_all(inst: Instance, budget: int = DEFAULT_BUDGET, threads: int = 1) -> List[PartialPool]:
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(lambda n: enumerate_feasible(inst, n, budget), range(inst.num_vehicles)))
    return [enumerate_feasible(inst, n, budget) for n in range(inst.num_vehicles)]


class _Combiner:
    """Fast C7 checks and costs for index tuples over fixed pools."""

    def __init__(self, inst: Instance, pools: Sequence[PartialPool]):
        if len(pools) != inst.num_vehicles:
            raise ValueError(f"{len(pools)} pools for {inst.num_vehicles} vehicles")
        self.inst = inst
        self.pools = pools
        self.powers = [[e.trajectory.pow for e in p.entries] for p in pools]
        self.costs = [[e.cost for e in p.entries] for p in pools]

    def grid_ok(self, choice: Sequence[int]) -> bool:
        steps = zip(*(self.powers[n][i] for n, i in enumerate(choice)))
        return all(self.inst.grid_ok(sum(col)) for col in steps)

    def cost(self, choice: Sequence[int]) -> Fraction:
        return sum((self.costs[n][i] for n, i in enumerate(choice)), Fraction(0))

    def solution(self, choice: Sequence[int]) -> GlobalSolution:
        return GlobalSolution(tuple(self.pools[n][i].trajectory for n, i in enumerate(choice)))

    def result(self, choice, method, examined, level=None) -> SearchResult:
        s = self.solution(choice)
        report = check_global(self.inst, s)
        if not report.feasible:
            raise AssertionError(f"combined solution {choice} fails the global check: {report}")
        return SearchResult(s, self.cost(choice), method, tuple(choice), examined, level)


def _require_nonempty(pools: Sequence[PartialPool]) -> None:
    empty = [p.vehicle_index + 1 for p in pools if len(p) == 0]
    if empty:
        raise InfeasibleError(f"no feasible partial solution for vehicle(s) {empty}")


def brute_force(
    inst: Instance, pools: Sequence[PartialPool], budget: int = DEFAULT_PRODUCT_BUDGET
) -> Tuple[SearchResult, GlobalStats]:
    """Try every combination of partial solutions; certified optimum plus cost statistics."""
    comb = _Combiner(inst, pools)
    _require_nonempty(pools)
    sizes = [len(p) for p in pools]
    total = int(np.prod(sizes, dtype=object))
    if total > budget:
        raise BudgetExceeded(f"{total} combinations, budget is {budget}")
    hist: Counter = Counter()
    best = None
    for choice in itertools.product(*(range(s) for s in sizes)):
        if not comb.grid_ok(choice):
            continue
        c = comb.cost(choice)
        hist[c] += 1
        if best is None or c < best[0]:
            best = (c, choice)
    stats = GlobalStats(total, sum(hist.values()), dict(sorted(hist.items())))
    if best is None:
        raise InfeasibleError("no combination of partial solutions satisfies the grid limit")
    return comb.result(best[1], BRUTE, total), stats


def level_tuples(sizes: Sequence[int], level: int) -> Iterator[Tuple[int, ...]]:
    """Index tuples ``0 <= i_n < sizes[n]`` with ``sum(i) == level`` in lexicographic order."""
    n = len(sizes)
    if level < 0 or n == 0:
        if n == 0 and level == 0:
            yield ()
        return
    # largest total the remaining positions can still absorb
    tail = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        tail[k] = tail[k + 1] + max(sizes[k] - 1, -1)

    prefix: List[int] = []

    def rec(k: int, remaining: int):
        if k == n - 1:
            if remaining < sizes[k]:
                yield tuple(prefix) + (remaining,)
            return
        lo = max(0, remaining - tail[k + 1])
        hi = min(sizes[k] - 1, remaining)
        for i in range(lo, hi + 1):
            prefix.append(i)
            yield from rec(k + 1, remaining - i)
            prefix.pop()

    if any(s < 1 for s in sizes) or level > tail[0]:
        return
    yield from rec(0, level)


def greedy_tree(
    inst: Instance,
    pools: Sequence[PartialPool],
    max_level: Optional[int] = None,
    first_hit: bool = False,
) -> SearchResult:
    """Level-order search over index sums of cost-sorted pools.

    Levels ``L = 0, 1, ...`` hold the index tuples summing to ``L``. The
    first level containing a combination that meets the grid limit ends the
    search; its cheapest such combination is returned (or the first one in
    lexicographic order with ``first_hit``).
    """
    comb = _Combiner(inst, pools)
    _require_nonempty(pools)
    sizes = [len(p) for p in pools]
    deepest = sum(s - 1 for s in sizes)
    max_level = deepest if max_level is None else min(max_level, deepest)
    examined = 0
    for level in range(max_level + 1):
        best = None
        for choice in level_tuples(sizes, level):
            examined += 1
            if not comb.grid_ok(choice):
                continue
            c = comb.cost(choice)
            if best is None or c < best[0]:
                best = (c, choice)
            if first_hit:
                break
        if best is not None:
            return comb.result(best[1], GREEDY, examined, level)
    raise InfeasibleError(f"no feasible combination up to level {max_level}")


def approximation_ratio(cost, optimal_cost) -> Fraction:
    """``cost / optimal_cost``; only defined for a positive optimum."""
    if isinstance(cost, SearchResult):
        cost = cost.cost
    optimal_cost = Fraction(optimal_cost)
    if optimal_cost <= 0:
        raise ValueError(f"approximation ratio undefined for nonpositive optimum {optimal_cost}")
    return Fraction(cost) / optimal_cost

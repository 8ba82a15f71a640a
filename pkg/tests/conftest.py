import itertools

import pytest

from evcrp import search
from evcrp.encoding import decode, layout_for_vehicle
from evcrp.model import (
    GlobalSolution,
    Instance,
    VehicleSpec,
    check_global,
    solution_cost,
    toy_instance,
)


def mini_instance(grid_bounds="inclusive"):
    """Two cars, two steps, two nodes: small enough to enumerate every fleet schedule."""
    return Instance(
        num_vehicles=2,
        num_steps=2,
        num_nodes=2,
        edge_weight=((0, 1), (0, 0)),
        buy_price=(1, 3),
        sell_price=("0.5", 2),
        pow_max=1,
        cl_min=1,
        cl_max=2,
        pow_lim_neg=0,
        pow_lim_pos=1,
        vehicles=(VehicleSpec(1, 1, 1, 1), VehicleSpec(2, 2, 2, 1)),
        grid_bounds=grid_bounds,
    )


def dfs_pool(inst, vehicle_index):
    """Independent oracle: grow trajectories step by step from the fixed initial state."""
    spec = inst.vehicles[vehicle_index]
    T = inst.num_steps
    out = []

    def rec(cl, pw, pos):
        t = len(pw)
        if t == T:
            if pos[-1] == spec.pos_final and cl[-1] >= spec.cl_final_min:
                out.append((tuple(cl), tuple(pw), tuple(pos)))
            return
        for nxt in inst.pos_values():
            for p in inst.pow_values():
                if nxt != pos[-1]:
                    w = inst.weight(pos[-1], nxt)
                    if w is None or p != 0:
                        continue
                    c = cl[-1] - w
                else:
                    c = cl[-1] + p
                if inst.cl_min <= c <= inst.cl_max:
                    rec(cl + [c], pw + [p], pos + [nxt])

    rec([spec.cl_initial], [], [spec.pos_initial])
    return out


@pytest.fixture(scope="session")
def toy():
    return toy_instance()


@pytest.fixture(scope="session")
def toy_pools(toy):
    return search.enumerate_all(toy)


@pytest.fixture(scope="session")
def mini():
    return mini_instance()


def global_optimum(inst):
    """Independent oracle: scan every fleet schedule and keep those passing check_global."""
    layout = layout_for_vehicle(inst)
    every = [decode(layout, i) for i in range(layout.total_dimension)]
    best = None
    feasible = 0
    for combo in itertools.product(every, repeat=inst.num_vehicles):
        s = GlobalSolution(combo)
        if check_global(inst, s).feasible:
            feasible += 1
            c = solution_cost(inst, s)
            if best is None or c < best:
                best = c
    return best, feasible


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)

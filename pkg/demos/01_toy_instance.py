"""
The four-car toy fleet
======================

Build the built-in instance, price a schedule and ask the checkers why a
schedule is or is not allowed.
"""

from evcrp.model import (
    VehicleTrajectory,
    check_partial,
    toy_instance,
    trajectory_cost,
    validate_instance,
)

toy = toy_instance()
print(validate_instance(toy))
print("buy prices ", [str(p) for p in toy.buy_price])
print("sell prices", [str(p) for p in toy.sell_price])

# Car 1 starts at node 2 with charge 3 and must reach node 4 with at least 5.
# Charge twice while parked, then drive 2 -> 3 -> 4 (both roads are free).
plan = VehicleTrajectory(cl=[3, 4, 5, 5, 5], pow=[1, 1, 0, 0], pos=[2, 2, 2, 3, 4])
print("cost", trajectory_cost(toy, plan), check_partial(toy, 0, plan).feasible)

# There is no road 2 -> 4, so the shortcut is rejected.
shortcut = VehicleTrajectory(cl=[3, 4, 5, 5, 5], pow=[1, 1, 0, 0], pos=[2, 2, 2, 2, 4])
for v in check_partial(toy, 0, shortcut).violations:
    print(v.constraint, "at step", v.step, "-", v.detail)

# Selling at step 2 earns 4.5; the cost stays an exact fraction.
seller = VehicleTrajectory(cl=[3, 3, 2, 2, 2], pow=[0, -1, 0, 0], pos=[1] * 5)
print("selling once:", trajectory_cost(toy, seller))

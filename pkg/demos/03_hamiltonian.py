"""
Penalty energies
================

The diagonal energy of a basis state is the charging cost minus a reward for
each constraint term it satisfies. Two readings of the constraint terms are
available: literal term counting and one indicator per constraint.
"""

from evcrp import hamiltonian as H
from evcrp.model import VehicleTrajectory, toy_instance

toy = toy_instance()
good = VehicleTrajectory(cl=[3, 4, 5, 5, 5], pow=[1, 1, 0, 0], pos=[2, 2, 2, 3, 4])
lazy = VehicleTrajectory(cl=[3, 4, 5, 5, 5], pow=[1, 0, 0, 0], pos=[2, 2, 2, 3, 4])

for variant in H.VARIANTS:
    w = H.PenaltyWeights.uniform(100, variant)
    for name, v in (("good", good), ("lazy", lazy)):
        e = H.total_energy(toy, 0, v, w)
        print(f"{variant:9s} {name}: cost {e.cost_term}, terms {[int(x) for x in e.constraint_terms]}, total {e.total}")

# Scan all 259.2 million states of car 3 (a few seconds with numpy blocks).
# With indicator terms every feasible schedule shares the lowest
# constraint energy, so the bottom of the spectrum is the feasible pool
# ordered by cost.
for index, e in H.lowest_states(toy, 2, 5):
    print(index, e.cost_term, e.total)

"""
Counting and indexing trajectories
==================================

Every trajectory of one car is a digit string in a mixed radix; its value
is the basis index used by the Hamiltonian scans and the sampler.
"""

from evcrp.encoding import decode, encode, layout_for_vehicle, search_space_size
from evcrp.model import VehicleTrajectory, toy_instance

toy = toy_instance()
layout = layout_for_vehicle(toy)

print("radices", layout.radices)
print("states per car", layout.total_dimension)  # 5**5 * 3**4 * 4**5
print("whole fleet  ", search_space_size(toy), f"(~{search_space_size(toy):.2e})")

plan = VehicleTrajectory(cl=[3, 4, 5, 5, 5], pow=[1, 1, 0, 0], pos=[2, 2, 2, 3, 4])
index = encode(layout, plan)
print("index", index)
assert decode(layout, index) == plan

# neighbouring indices differ only in the last digit: the final position
for i in range(index - 1, index + 2):
    print(i, decode(layout, i).pos)

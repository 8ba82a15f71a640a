"""Search-space reduction for the electric vehicle charging and routing problem.

Pipeline: per-vehicle qudit encoding and diagonal Hamiltonians, simulated
Grover sampling of feasible partial solutions, then classical combination
of partial solutions into a fleet schedule.
"""

from .encoding import decode, encode, layout_for_vehicle, search_space_size
from .hamiltonian import PenaltyWeights, ground_state_exhaustive, total_energy
from .model import (
    GlobalSolution,
    Instance,
    VehicleSpec,
    VehicleTrajectory,
    check_global,
    check_partial,
    solution_cost,
    toy_instance,
    trajectory_cost,
    validate_instance,
)
from .sampler import SamplingProblem, Strategy, simulate_sampling, success_probability
from .search import approximation_ratio, brute_force, enumerate_all, enumerate_feasible, greedy_tree

__version__ = "0.1.0"

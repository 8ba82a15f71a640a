"""
Grover sampling of feasible schedules
=====================================

A simulated campaign: each run picks an iteration count, succeeds with the
amplitude-amplification probability and reveals one unseen feasible
schedule on success.
"""

import math

from evcrp import sampler as S
from evcrp.encoding import layout_for_vehicle
from evcrp.model import toy_instance
from evcrp.search import enumerate_feasible

toy = toy_instance()
N = layout_for_vehicle(toy).total_dimension

# success probability of one run against the iteration count
for i in (0, 1000, 5000, int(math.pi / 4 * math.sqrt(N / 6))):
    print(f"i={i:5d}  p={S.success_probability(N, 6, i):.6f}")

pool = enumerate_feasible(toy, 0)
problem = S.SamplingProblem(N, tuple(e.index for e in pool.entries))
trace = S.simulate_sampling(problem, S.Strategy(S.SWEEP_DECREASING), seed=7, max_runs=5000)
print("car 1:", len(trace.found), "schedules after", len(trace.runs), "runs")

# With many targets the fixed sqrt(N) iteration count overshoots, and the
# sweeps keep finding new schedules.
curves = S.strategy_benchmark(
    S.SamplingProblem.synthetic(N, 100), [S.Strategy(k) for k in S.STRATEGIES], num_seeds=20, max_runs=2000
)
for name, c in curves.items():
    print(f"{name:10s} median found after 500 runs: {c.median[499]:5.1f}, after 2000: {c.median[-1]:5.1f}")

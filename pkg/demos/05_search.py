"""
From partial pools to a fleet schedule
======================================

Enumerate each car's feasible schedules, then combine them under the
shared grid limit: exhaustively, and with the level-order heuristic.
"""

from evcrp import search
from evcrp.model import toy_instance

toy = toy_instance()
pools = search.enumerate_all(toy)
print("pool sizes", [len(p) for p in pools])
print("cheapest per car", [str(p[0].cost) for p in pools])

best, stats = search.brute_force(toy, pools)
print(f"{stats.feasible_combinations} of {stats.total_combinations} combinations respect the grid")
for cost, count in stats.cost_histogram.items():
    print(f"  cost {cost}: {'#' * (count // 50)} {count}")

greedy = search.greedy_tree(toy, pools)
print("optimum", best.cost, "choice", best.choice)
print("greedy ", greedy.cost, "choice", greedy.choice, "level", greedy.level_reached,
      "after", greedy.combinations_examined, "tuples")

# Reading the +-3 grid limit strictly leaves a single cost level.
strict = toy_instance("strict")
best, stats = search.brute_force(strict, pools)
greedy = search.greedy_tree(strict, pools)
print("strict: feasible", stats.feasible_combinations, "optimum", best.cost,
      "greedy", greedy.cost, "at level", greedy.level_reached)

"""Simulated Grover sampling of feasible partial solutions.

No state vector is built. A run with ``i`` Grover iterations over a space of
``N`` states with ``K`` unseen targets succeeds with probability
``sin((2i + 1) asin(sqrt(K / N))) ** 2``; on success a uniformly random
unseen target is revealed and ``K`` drops by one.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

CONSTANT = "constant"
SWEEP_DECREASING = "decreasing"
SWEEP_INCREASING = "increasing"
BOYER_RANDOM = "boyer"
STRATEGIES = (CONSTANT, SWEEP_DECREASING, SWEEP_INCREASING, BOYER_RANDOM)

ALL_FOUND = "ALL_FOUND"
MAX_RUNS = "MAX_RUNS"
STOPPED = "STOP_AFTER"


def success_probability(N: int, K: int, i: int) -> float:
    """Probability that one measurement after ``i`` iterations hits one of ``K`` targets."""
    if N < 1 or K < 0 or i < 0:
        raise ValueError(f"need N >= 1, K >= 0, i >= 0; got N={N}, K={K}, i={i}")
    if K > N:
        raise ValueError(f"K={K} exceeds N={N}")
    theta = math.asin(math.sqrt(K / N))
    p = math.sin((2 * i + 1) * theta) ** 2
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class SamplingProblem:
    hilbert_dim: int
    targets: tuple

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if not 0 < len(targets) <= self.hilbert_dim:
            raise ValueError(f"need 0 < K <= N, got K={len(targets)}, N={self.hilbert_dim}")
        if len(set(targets)) != len(targets):
            raise ValueError("targets must be distinct")
        if min(targets) < 0 or max(targets) >= self.hilbert_dim:
            raise ValueError("targets must lie in [0, N)")

    @property
    def K(self) -> int:
        return len(self.targets)

    @classmethod
    def synthetic(cls, hilbert_dim: int, K: int) -> "SamplingProblem":
        """``K`` evenly spread targets; the simulator only depends on ``K`` and ``N``."""
        step = hilbert_dim // K
        return cls(hilbert_dim, tuple(range(0, step * K, step)))


@dataclass(frozen=True)
class Strategy:
    """How many Grover iterations to use in each run.

    ``sweep_max`` and ``constant`` default to ``isqrt(N)``.
    """

    kind: str
    sweep_max: Optional[int] = None
    constant: Optional[int] = None
    growth: float = 6 / 5

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}; choose from {STRATEGIES}")
        if self.sweep_max is not None and self.sweep_max < 1:
            raise ValueError("sweep bound must be >= 1")
        if self.constant is not None and self.constant < 0:
            raise ValueError("constant iteration count must be >= 0")
        if not self.growth > 1:
            raise ValueError("growth factor must exceed 1")

    @classmethod
    def amplitude_estimate(cls, N: int, K_estimate: int) -> "Strategy":
        """Constant ``floor(pi/4 sqrt(N/K))``, the textbook optimum for a known ``K``."""
        return cls(CONSTANT, constant=int(math.pi / 4 * math.sqrt(N / K_estimate)))


class IterationSchedule:
    """Stateful iteration-count generator for one sampling campaign."""

    def __init__(self, strategy: Strategy, N: int, rng: random.Random):
        self.strategy = strategy
        self.rng = rng
        root = max(1, math.isqrt(N))
        self.top = strategy.sweep_max if strategy.sweep_max is not None else root
        self.constant = strategy.constant if strategy.constant is not None else root
        self.sqrt_n = math.sqrt(N)
        self.m = 1.0
        kind = strategy.kind
        if kind == SWEEP_DECREASING:
            self.cursor = self.top
        elif kind == SWEEP_INCREASING:
            self.cursor = 1

    def next(self) -> int:
        kind = self.strategy.kind
        if kind == CONSTANT:
            return self.constant
        if kind == SWEEP_DECREASING:
            i = self.cursor
            self.cursor = i - 1 if i > 1 else self.top
            return i
        if kind == SWEEP_INCREASING:
            i = self.cursor
            self.cursor = i + 1 if i < self.top else 1
            return i
        return self.rng.randrange(math.ceil(self.m))

    def record(self, new_solution: bool) -> None:
        if self.strategy.kind != BOYER_RANDOM:
            return
        if new_solution:
            self.m = 1.0
        else:
            self.m = min(self.m * self.strategy.growth, self.sqrt_n)


@dataclass(frozen=True)
class RunRecord:
    run: int
    iterations: int
    success: bool
    found: Optional[int]
    cumulative_found: int
    cumulative_iterations: int


@dataclass
class SamplingTrace:
    seed: int
    strategy: str
    runs: List[RunRecord] = field(default_factory=list)
    reason: str = MAX_RUNS

    @property
    def found(self) -> List[int]:
        return [r.found for r in self.runs if r.success]

    @property
    def runs_to_collect_all(self) -> float:
        """Run number of the final success, ``inf`` if the targets were not exhausted."""
        return self.runs[-1].run if self.reason == ALL_FOUND else math.inf

    def curve(self, length: int) -> List[int]:
        """``cumulative_found`` after runs ``1..length``, held flat past the end of the trace."""
        out = [r.cumulative_found for r in self.runs[:length]]
        last = out[-1] if out else 0
        return out + [last] * (length - len(out))


def _check_budget(max_runs: int) -> None:
    if max_runs < 1:
        raise ValueError("max_runs must be positive")


def simulate_sampling(
    problem: SamplingProblem,
    strategy: Strategy,
    seed: int,
    max_runs: int,
    stop_after: Optional[int] = None,
) -> SamplingTrace:
    _check_budget(max_runs)
    rng = random.Random(seed)
    schedule = IterationSchedule(strategy, problem.hilbert_dim, rng)
    remaining = list(problem.targets)
    trace = SamplingTrace(seed, strategy.kind)
    found = iterations = 0
    for run in range(1, max_runs + 1):
        i = schedule.next()
        iterations += i
        p = success_probability(problem.hilbert_dim, len(remaining), i)
        hit = None
        if rng.random() < p:
            j = rng.randrange(len(remaining))
            remaining[j], remaining[-1] = remaining[-1], remaining[j]
            hit = remaining.pop()
            found += 1
        schedule.record(hit is not None)
        trace.runs.append(RunRecord(run, i, hit is not None, hit, found, iterations))
        if not remaining:
            trace.reason = ALL_FOUND
            break
        if stop_after is not None and found >= stop_after:
            trace.reason = STOPPED
            break
    return trace


def classical_baseline(
    problem: SamplingProblem, seed: int, max_runs: int, stop_after: Optional[int] = None
) -> SamplingTrace:
    """Uniform random guessing; a run succeeds when it lands on an unseen target."""
    _check_budget(max_runs)
    rng = random.Random(seed)
    unseen = set(problem.targets)
    trace = SamplingTrace(seed, "classical")
    found = 0
    for run in range(1, max_runs + 1):
        guess = rng.randrange(problem.hilbert_dim)
        hit = guess if guess in unseen else None
        if hit is not None:
            unseen.discard(hit)
            found += 1
        trace.runs.append(RunRecord(run, 0, hit is not None, hit, found, 0))
        if not unseen:
            trace.reason = ALL_FOUND
            break
        if stop_after is not None and found >= stop_after:
            trace.reason = STOPPED
            break
    return trace


@dataclass
class StrategyCurve:
    strategy: str
    median: List[float]
    mean: List[float]
    q25: List[float]
    q75: List[float]
    runs_to_collect_all: List[float]

    @property
    def median_runs_to_collect_all(self) -> float:
        return statistics.median(self.runs_to_collect_all)


def _quantile(sorted_values: Sequence[float], q: float) -> float:
    # linear interpolation between closest ranks
    pos = (len(sorted_values) - 1) * q
    lo = math.floor(pos)
    hi = min(lo + 1, len(sorted_values) - 1)
    return sorted_values[lo] + (sorted_values[hi] - sorted_values[lo]) * (pos - lo)


def strategy_benchmark(
    problem: SamplingProblem,
    strategies: Sequence[Strategy],
    num_seeds: int,
    max_runs: int,
    first_seed: int = 0,
    threads: int = 1,
) -> Dict[str, StrategyCurve]:
    """Monte-Carlo curves of targets found per run, one seed list shared by all strategies."""
    if num_seeds < 1:
        raise ValueError("num_seeds must be >= 1")
    seeds = range(first_seed, first_seed + num_seeds)
    jobs = [(s, seed) for s in strategies for seed in seeds]

    def run(job):
        return simulate_sampling(problem, job[0], job[1], max_runs)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            traces = list(ex.map(run, jobs))
    else:
        traces = [run(j) for j in jobs]

    out = {}
    for k, strategy in enumerate(strategies):
        chunk = traces[k * num_seeds : (k + 1) * num_seeds]
        curves = [t.curve(max_runs) for t in chunk]
        columns = [sorted(col) for col in zip(*curves)]
        out[strategy.kind] = StrategyCurve(
            strategy.kind,
            median=[_quantile(c, 0.5) for c in columns],
            mean=[sum(c) / len(c) for c in columns],
            q25=[_quantile(c, 0.25) for c in columns],
            q75=[_quantile(c, 0.75) for c in columns],
            runs_to_collect_all=[t.runs_to_collect_all for t in chunk],
        )
    return out

"""Diagonal qudit Hamiltonians for one vehicle and exhaustive ground-state search.

The full energy is ``H = H_cost + sum_i lambda_i H_i`` with five constraint
terms. Two readings of the constraint terms are provided:

``verbatim``
    Literal projector counting. Every satisfied boundary condition earns one
    reward, every move with zero power earns an ``H3`` reward (even on a
    missing road), every consistent (dis)charge step an ``H4`` reward and
    every move that spends exactly the road energy an ``H5`` reward.
``indicator``
    One ``lambda_1`` reward per satisfied position endpoint, one ``lambda_2``
    reward per satisfied charge boundary and one ``lambda_3`` reward per
    transition that passes :func:`evcrp.model.step_feasible`. Terms 4 and 5
    are identically zero. The minimum ``-2 l1 - 2 l2 - T l3`` is reached
    exactly on the feasible trajectories.

Scalar functions evaluate one trajectory with exact rationals. The
:class:`DiagonalHamiltonian` class evaluates whole blocks of the basis with
numpy on integers scaled by a common denominator, which is still exact.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import encoding
from .encoding import CL, POS, POW, QuditLayout
from .model import ABSENT, Instance, VehicleTrajectory, check_partial, step_feasible

VERBATIM = "verbatim"
INDICATOR = "indicator"
VARIANTS = (VERBATIM, INDICATOR)

DEFAULT_BUDGET = 10**9


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PenaltyWeights:
    lambdas: Tuple[Fraction, ...] = (Fraction(100),) * 5
    variant: str = INDICATOR

    def __post_init__(self):
        lam = tuple(Fraction(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if len(lam) != 5:
            raise ValueError(f"need 5 penalty weights, got {len(lam)}")
        if any(x <= 0 for x in lam):
            raise ValueError(f"penalty weights must be positive, got {[str(x) for x in lam]}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @classmethod
    def uniform(cls, value=100, variant: str = INDICATOR) -> "PenaltyWeights":
        return cls((Fraction(value),) * 5, variant)


@dataclass(frozen=True)
class EnergyBreakdown:
    cost_term: Fraction
    constraint_terms: Tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return self.cost_term + sum(self.constraint_terms, Fraction(0))


def cost_energy(inst: Instance, v: VehicleTrajectory) -> Fraction:
    """Eigenvalue of the cost Hamiltonian: a projector sum over power levels."""
    half = (inst.d_pow - 1) // 2
    energy = Fraction(0)
    for t in range(1, inst.num_steps + 1):
        for j in range(-half, half + 1):
            if v.pow[t - 1] != j:
                continue
            if j > 0:
                energy += j * inst.buy_price[t - 1]
            elif j < 0:
                energy += j * inst.sell_price[t - 1]
    return energy


def verbatim_counts(inst: Instance, vehicle_index: int, v: VehicleTrajectory) -> Tuple[int, ...]:
    """Number of projectors of each constraint term that ``v`` lies in."""
    spec = inst.vehicles[vehicle_index]
    T = inst.num_steps
    h1 = (v.pos[0] == spec.pos_initial) + (v.pos[T] == spec.pos_final)
    h2 = (v.cl[0] == spec.cl_initial) + (v.cl[T] >= spec.cl_final_min)
    h3 = h4 = h5 = 0
    for t in range(1, T + 1):
        moved = v.pos[t - 1] != v.pos[t]
        pw = v.pow[t - 1]
        if moved and pw == 0:
            h3 += 1
        if pw != 0 and v.cl[t] == v.cl[t - 1] + pw:
            h4 += 1
        if moved:
            w = inst.weight(v.pos[t - 1], v.pos[t])
            if w is not ABSENT and v.cl[t] == v.cl[t - 1] - w:
                h5 += 1
    return (h1, h2, h3, h4, h5)


def indicator_counts(inst: Instance, vehicle_index: int, v: VehicleTrajectory) -> Tuple[int, ...]:
    spec = inst.vehicles[vehicle_index]
    T = inst.num_steps
    h1 = (v.pos[0] == spec.pos_initial) + (v.pos[T] == spec.pos_final)
    h2 = (v.cl[0] == spec.cl_initial) + (v.cl[T] >= spec.cl_final_min)
    h3 = sum(
        step_feasible(inst, v.cl[t - 1], v.pos[t - 1], v.cl[t], v.pow[t - 1], v.pos[t])
        for t in range(1, T + 1)
    )
    return (h1, h2, h3, 0, 0)


def _weighted(counts: Sequence[int], weights: PenaltyWeights) -> Tuple[Fraction, ...]:
    return tuple(-lam * c for lam, c in zip(weights.lambdas, counts))


def constraint_energy_verbatim(
    inst: Instance, vehicle_index: int, v: VehicleTrajectory, weights: Optional[PenaltyWeights] = None
) -> Tuple[Fraction, ...]:
    """``lambda_i H_i`` eigenvalues under literal projector counting."""
    weights = weights or PenaltyWeights()
    return _weighted(verbatim_counts(inst, vehicle_index, v), weights)


def constraint_energy_indicator(
    inst: Instance, vehicle_index: int, v: VehicleTrajectory, weights: Optional[PenaltyWeights] = None
) -> Tuple[Fraction, ...]:
    weights = weights or PenaltyWeights()
    return _weighted(indicator_counts(inst, vehicle_index, v), weights)


def constraint_counts(inst: Instance, vehicle_index: int, v: VehicleTrajectory, variant: str):
    if variant == VERBATIM:
        return verbatim_counts(inst, vehicle_index, v)
    return indicator_counts(inst, vehicle_index, v)


def total_energy(
    inst: Instance, vehicle_index: int, v: VehicleTrajectory, weights: Optional[PenaltyWeights] = None
) -> EnergyBreakdown:
    weights = weights or PenaltyWeights()
    counts = constraint_counts(inst, vehicle_index, v, weights.variant)
    return EnergyBreakdown(cost_energy(inst, v), _weighted(counts, weights))


# -- vectorised evaluation ---------------------------------------------------


@dataclass(frozen=True)
class LocalTerm:
    """A diagonal operator acting on a few qudits, given as a dense table.

    ``positions`` are ascending layout positions; axis ``a`` of ``table``
    runs over the digits of qudit ``positions[a]``.
    """

    positions: Tuple[int, ...]
    table: np.ndarray


def _local_term(
    layout: QuditLayout, variables: Sequence[Tuple[str, int]], fn: Callable[..., object], dtype
) -> LocalTerm:
    qudits = [layout.qudits[layout.position(k, t)] for k, t in variables]
    positions = [layout.position(k, t) for k, t in variables]
    table = np.zeros([q.radix for q in qudits], dtype=dtype)
    for digits in itertools.product(*(range(q.radix) for q in qudits)):
        table[digits] = fn(*(d + q.low for d, q in zip(digits, qudits)))
    order = np.argsort(positions)
    return LocalTerm(tuple(positions[i] for i in order), np.transpose(table, order))


def _lcm_denominator(values) -> int:
    return math.lcm(1, *(Fraction(x).denominator for x in values))


class DiagonalHamiltonian:
    """Energy of every basis state of one vehicle's qudit register."""

    def __init__(self, inst: Instance, vehicle_index: int, weights: Optional[PenaltyWeights] = None):
        self.inst = inst
        self.vehicle_index = vehicle_index
        self.weights = weights or PenaltyWeights()
        self.layout = encoding.layout_for_vehicle(inst)
        self.scale = _lcm_denominator(
            list(inst.buy_price) + list(inst.sell_price) + list(self.weights.lambdas)
        )
        self.cost_terms = self._cost_terms()
        self.count_terms = self._count_terms()

    def _cost_terms(self) -> List[LocalTerm]:
        inst, scale = self.inst, self.scale

        def price(t):
            def f(pw):
                if pw > 0:
                    return int(pw * inst.buy_price[t - 1] * scale)
                if pw < 0:
                    return int(pw * inst.sell_price[t - 1] * scale)
                return 0

            return f

        return [
            _local_term(self.layout, [(POW, t)], price(t), np.int64)
            for t in range(1, inst.num_steps + 1)
        ]

    def _count_terms(self) -> List[List[LocalTerm]]:
        inst, lay = self.inst, self.layout
        spec = inst.vehicles[self.vehicle_index]
        T = inst.num_steps

        def term(variables, fn):
            return _local_term(lay, variables, fn, np.int8)

        h1 = [
            term([(POS, 0)], lambda p: p == spec.pos_initial),
            term([(POS, T)], lambda p: p == spec.pos_final),
        ]
        h2 = [
            term([(CL, 0)], lambda c: c == spec.cl_initial),
            term([(CL, T)], lambda c: c >= spec.cl_final_min),
        ]
        if self.weights.variant == INDICATOR:
            h3 = [
                term(
                    [(CL, t - 1), (POS, t - 1), (CL, t), (POW, t), (POS, t)],
                    lambda c0, p0, c1, pw, p1: step_feasible(inst, c0, p0, c1, pw, p1),
                )
                for t in range(1, T + 1)
            ]
            return [h1, h2, h3, [], []]

        def h5_fn(c0, p0, c1, p1):
            if p0 == p1:
                return False
            w = inst.weight(p0, p1)
            return w is not ABSENT and c1 == c0 - w

        h3 = [
            term([(POS, t - 1), (POW, t), (POS, t)], lambda p0, pw, p1: p0 != p1 and pw == 0)
            for t in range(1, T + 1)
        ]
        h4 = [
            term([(CL, t - 1), (CL, t), (POW, t)], lambda c0, c1, pw: pw != 0 and c1 == c0 + pw)
            for t in range(1, T + 1)
        ]
        h5 = [term([(CL, t - 1), (POS, t - 1), (CL, t), (POS, t)], h5_fn) for t in range(1, T + 1)]
        return [h1, h2, h3, h4, h5]

    # block evaluation

    def _add_term(self, out: np.ndarray, term: LocalTerm, prefix: Tuple[int, ...], coef: int = 1):
        k = len(prefix)
        index = []
        shape = [1] * out.ndim
        for axis, p in enumerate(term.positions):
            if p < k:
                index.append(prefix[p])
            else:
                index.append(slice(None))
                shape[p - k] = term.table.shape[axis]
        local = term.table[tuple(index)]
        if coef != 1:
            local = local.astype(out.dtype) * coef
        out += np.reshape(local, shape)

    def _block_shape(self, n_fixed: int) -> Tuple[int, ...]:
        return self.layout.radices[n_fixed:]

    def block_cost(self, prefix: Tuple[int, ...]) -> np.ndarray:
        """Scaled cost of every state in the block with the given leading digits."""
        out = np.zeros(self._block_shape(len(prefix)), dtype=np.int64)
        for term in self.cost_terms:
            self._add_term(out, term, prefix)
        return out

    def block_counts(self, prefix: Tuple[int, ...], i: int) -> np.ndarray:
        out = np.zeros(self._block_shape(len(prefix)), dtype=np.int16)
        for term in self.count_terms[i]:
            self._add_term(out, term, prefix)
        return out

    def block_constraint(self, prefix: Tuple[int, ...]) -> np.ndarray:
        """Scaled ``sum_i lambda_i H_i`` over the block."""
        out = np.zeros(self._block_shape(len(prefix)), dtype=np.int64)
        for lam, terms in zip(self.weights.lambdas, self.count_terms):
            coef = -int(lam * self.scale)
            for term in terms:
                self._add_term(out, term, prefix, coef)
        return out

    def block_total(self, prefix: Tuple[int, ...]) -> np.ndarray:
        out = self.block_constraint(prefix)
        for term in self.cost_terms:
            self._add_term(out, term, prefix)
        return out

    def blocks(self, block_limit: int = 1 << 20):
        n_fixed = encoding.split_prefix(self.layout, block_limit)
        return encoding.iter_blocks(self.layout, n_fixed)

    def unscale(self, value) -> Fraction:
        return Fraction(int(value), self.scale)

    def breakdown(self, index: int) -> EnergyBreakdown:
        v = encoding.decode(self.layout, index)
        return total_energy(self.inst, self.vehicle_index, v, self.weights)


def _check_budget(layout: QuditLayout, budget: int) -> None:
    if layout.total_dimension > budget:
        raise BudgetExceeded(
            f"per-vehicle basis has {layout.total_dimension} states, budget is {budget}"
        )


def map_blocks(ham: DiagonalHamiltonian, fn, threads: int = 1) -> list:
    """``fn(prefix, start)`` for every block, results in block order."""
    blocks = list(ham.blocks())
    if threads > 1 and len(blocks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(lambda b: fn(*b), blocks))
    return [fn(*b) for b in blocks]


def ground_state_exhaustive(
    inst: Instance,
    vehicle_index: int,
    weights: Optional[PenaltyWeights] = None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> Tuple[int, EnergyBreakdown]:
    """Exact argmin of the total energy over the whole basis, ties to the smallest index."""
    ham = DiagonalHamiltonian(inst, vehicle_index, weights)
    _check_budget(ham.layout, budget)

    def block_min(prefix, start):
        energy = ham.block_total(prefix)
        i = int(np.argmin(energy))
        return int(energy.flat[i]), start + i

    _, index = min(map_blocks(ham, block_min, threads))
    return index, ham.breakdown(index)


def constraint_ground_set(
    inst: Instance,
    vehicle_index: int,
    weights: Optional[PenaltyWeights] = None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> Tuple[Fraction, np.ndarray]:
    """Minimum of the constraint-only energy and every basis index attaining it."""
    ham = DiagonalHamiltonian(inst, vehicle_index, weights)
    _check_budget(ham.layout, budget)

    def block_argmins(prefix, start):
        energy = ham.block_constraint(prefix).ravel()
        m = int(energy.min())
        return m, np.flatnonzero(energy == m).astype(np.int64) + start

    results = map_blocks(ham, block_argmins, threads)
    best = min(m for m, _ in results)
    return ham.unscale(best), np.concatenate([idx for m, idx in results if m == best])


def lowest_states(
    inst: Instance,
    vehicle_index: int,
    k: int,
    weights: Optional[PenaltyWeights] = None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> List[Tuple[int, EnergyBreakdown]]:
    """The ``k`` lowest-energy basis states ordered by (energy, index)."""
    if k < 1:
        raise ValueError("k must be positive")
    ham = DiagonalHamiltonian(inst, vehicle_index, weights)
    _check_budget(ham.layout, budget)

    def block_candidates(prefix, start):
        energy = ham.block_total(prefix).ravel()
        if energy.size > k:
            kth = np.partition(energy, k - 1)[k - 1]
            below = np.flatnonzero(energy < kth)
            at = np.flatnonzero(energy == kth)[: k - below.size]
            picked = np.concatenate([below, at])
        else:
            picked = np.arange(energy.size)
        return [(int(energy[i]), start + int(i)) for i in picked]

    candidates = map_blocks(ham, block_candidates, threads)
    best = heapq.nsmallest(k, (c for block in candidates for c in block))
    return [(index, ham.breakdown(index)) for _, index in best]


def is_feasible_index(inst: Instance, vehicle_index: int, index: int) -> bool:
    layout = encoding.layout_for_vehicle(inst)
    return check_partial(inst, vehicle_index, encoding.decode(layout, index)).feasible


def feasible_mask_block(ham: DiagonalHamiltonian, prefix: Tuple[int, ...]) -> np.ndarray:
    """Boolean mask of trajectories in the block passing every single-vehicle check.

    Uses the indicator tables, so ``ham`` must be built with that variant.
    """
    if ham.weights.variant != INDICATOR:
        raise ValueError("feasibility masks need the indicator variant")
    T = ham.inst.num_steps
    score = ham.block_counts(prefix, 0) + ham.block_counts(prefix, 1) + ham.block_counts(prefix, 2)
    return score == 4 + T


def term_counts_block(ham: DiagonalHamiltonian, prefix: Tuple[int, ...]) -> Dict[str, np.ndarray]:
    return {f"h{i + 1}": ham.block_counts(prefix, i) for i in range(5)}

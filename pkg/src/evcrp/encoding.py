"""Mixed-radix bijection between one vehicle's trajectory and a qudit basis index.

Every trajectory variable is one qudit whose levels are the variable's
allowed values. Digit order, most significant first::

    cl_0, pos_0, (cl_1, pow_1, pos_1), ..., (cl_T, pow_T, pos_T)

Digits are zero-based: ``cl - cl_min``, ``pow - pow_min``, ``pos - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, Tuple

import numpy as np

from .model import Instance, VehicleTrajectory

CL, POW, POS = "CL", "POW", "POS"


@dataclass(frozen=True)
class Qudit:
    kind: str
    step: int
    radix: int
    low: int  # value encoded by digit 0


@dataclass(frozen=True)
class QuditLayout:
    qudits: Tuple[Qudit, ...]
    num_steps: int

    @property
    def radices(self) -> Tuple[int, ...]:
        return tuple(q.radix for q in self.qudits)

    @property
    def total_dimension(self) -> int:
        return math.prod(self.radices)

    def __len__(self):
        return len(self.qudits)

    def position(self, kind: str, step: int) -> int:
        return self._positions[(kind, step)]

    @cached_property
    def _positions(self) -> Dict[Tuple[str, int], int]:
        return {(q.kind, q.step): i for i, q in enumerate(self.qudits)}


def layout_for_vehicle(inst: Instance) -> QuditLayout:
    cl = (CL, inst.d_cl, inst.cl_min)
    pw = (POW, inst.d_pow, inst.pow_min)
    pos = (POS, inst.d_pos, 1)
    qudits = [Qudit(cl[0], 0, cl[1], cl[2]), Qudit(pos[0], 0, pos[1], pos[2])]
    for t in range(1, inst.num_steps + 1):
        qudits.extend(Qudit(kind, t, radix, low) for kind, radix, low in (cl, pw, pos))
    return QuditLayout(tuple(qudits), inst.num_steps)


def _value(v: VehicleTrajectory, kind: str, t: int) -> int:
    if kind == CL:
        return v.cl[t]
    if kind == POS:
        return v.pos[t]
    return v.pow[t - 1]


def digits_of(layout: QuditLayout, v: VehicleTrajectory) -> Tuple[int, ...]:
    if v.num_steps != layout.num_steps:
        raise ValueError(f"trajectory has {v.num_steps} steps, layout has {layout.num_steps}")
    out = []
    for q in layout.qudits:
        d = _value(v, q.kind, q.step) - q.low
        if not 0 <= d < q.radix:
            raise ValueError(
                f"{q.kind}[{q.step}] = {d + q.low} outside {q.low}..{q.low + q.radix - 1}"
            )
        out.append(d)
    return tuple(out)


def from_digits(layout: QuditLayout, digits) -> VehicleTrajectory:
    T = layout.num_steps
    cl = [0] * (T + 1)
    pos = [0] * (T + 1)
    pw = [0] * T
    for q, d in zip(layout.qudits, digits):
        value = int(d) + q.low
        if q.kind == CL:
            cl[q.step] = value
        elif q.kind == POS:
            pos[q.step] = value
        else:
            pw[q.step - 1] = value
    return VehicleTrajectory(cl, pw, pos)


def encode(layout: QuditLayout, v: VehicleTrajectory) -> int:
    index = 0
    for d, r in zip(digits_of(layout, v), layout.radices):
        index = index * r + d
    return index


def index_digits(layout: QuditLayout, index: int) -> Tuple[int, ...]:
    index = int(index)
    if not 0 <= index < layout.total_dimension:
        raise ValueError(f"basis index {index} outside [0, {layout.total_dimension})")
    digits = []
    for r in reversed(layout.radices):
        index, d = divmod(index, r)
        digits.append(d)
    return tuple(reversed(digits))


def decode(layout: QuditLayout, index: int) -> VehicleTrajectory:
    return from_digits(layout, index_digits(layout, index))


def search_space_size(inst: Instance, include_initial: bool = False) -> int:
    """Size of the unreduced search space.

    With ``include_initial`` off: all free variables of all vehicles,
    ``(d_cl d_pow d_pos) ** (N T)``. With it on: one vehicle's Hilbert space
    including its ``t = 0`` qudits, ``d_cl d_pos (d_cl d_pow d_pos) ** T``.
    """
    per_step = inst.d_cl * inst.d_pow * inst.d_pos
    if include_initial:
        return inst.d_cl * inst.d_pos * per_step**inst.num_steps
    return per_step ** (inst.num_vehicles * inst.num_steps)


def split_prefix(layout: QuditLayout, block_limit: int) -> int:
    """Smallest number of leading digits to fix so each block has at most ``block_limit`` states."""
    radices = layout.radices
    rest = layout.total_dimension
    k = 0
    while k < len(radices) and rest > block_limit:
        rest //= radices[k]
        k += 1
    return k


def iter_blocks(layout: QuditLayout, n_fixed: int) -> Iterator[Tuple[Tuple[int, ...], int]]:
    """Yield ``(prefix_digits, first_index)`` for each block in ascending index order.

    Inside a block the remaining digits span a C-ordered grid of shape
    ``layout.radices[n_fixed:]``, so ``first_index + flat_offset`` is the
    basis index of a grid cell.
    """
    radices = layout.radices
    block = math.prod(radices[n_fixed:])
    for b, prefix in enumerate(np.ndindex(*radices[:n_fixed])):
        yield tuple(int(p) for p in prefix), b * block

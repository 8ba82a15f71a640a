"""EVCRP instance data, vehicle trajectories, the money cost and constraint checks.

Conventions at every public boundary:

* nodes are numbered ``1..num_nodes``;
* ``cl`` and ``pos`` are indexed by ``t = 0..T`` (``t = 0`` is the initial
  state), ``pow`` by ``t = 1..T`` and stored at list position ``t - 1``;
* vehicles are addressed by their 0-based position in ``Instance.vehicles``.

Missing roads are ``None`` (:data:`ABSENT`) in ``edge_weight``. Prices are
:class:`fractions.Fraction`, so costs compare exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

ABSENT = None

STRICT = "strict"
INCLUSIVE = "inclusive"
GRID_BOUNDS = (STRICT, INCLUSIVE)


class DomainError(ValueError):
    """A trajectory value lies outside the instance's variable domains."""


def as_rational(value) -> Fraction:
    """Exact conversion of ints, decimal strings and floats (via their repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not prices")
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class VehicleSpec:
    pos_initial: int
    pos_final: int
    cl_initial: int
    cl_final_min: int


@dataclass(frozen=True)
class Instance:
    """Full problem data.

    ``grid_bounds`` selects how the per-step fleet power limit is read:
    ``"strict"`` keeps ``pow_lim_neg < sum < pow_lim_pos``, ``"inclusive"``
    admits the bounds themselves. ``pow_min`` defaults to ``-pow_max``; any
    other value makes the power domain asymmetric and the instance invalid.
    """

    num_vehicles: int
    num_steps: int
    num_nodes: int
    edge_weight: Tuple[Tuple[Optional[int], ...], ...]
    buy_price: Tuple[Fraction, ...]
    sell_price: Tuple[Fraction, ...]
    pow_max: int
    cl_min: int
    cl_max: int
    pow_lim_neg: int
    pow_lim_pos: int
    vehicles: Tuple[VehicleSpec, ...]
    grid_bounds: str = STRICT
    pow_min: Optional[int] = None

    def __post_init__(self):
        if self.pow_min is None:
            object.__setattr__(self, "pow_min", -self.pow_max)
        # normalise containers so instances stay hashable and immutable
        object.__setattr__(self, "edge_weight", tuple(tuple(r) for r in self.edge_weight))
        object.__setattr__(self, "buy_price", tuple(as_rational(p) for p in self.buy_price))
        object.__setattr__(self, "sell_price", tuple(as_rational(p) for p in self.sell_price))
        object.__setattr__(self, "vehicles", tuple(self.vehicles))

    @property
    def d_cl(self) -> int:
        return self.cl_max - self.cl_min + 1

    @property
    def d_pow(self) -> int:
        return self.pow_max - self.pow_min + 1

    @property
    def d_pos(self) -> int:
        return self.num_nodes

    def weight(self, i: int, j: int) -> Optional[int]:
        """Energy spent on the road ``i -> j`` (1-based), ``None`` if there is no road."""
        return self.edge_weight[i - 1][j - 1]

    def pow_values(self) -> range:
        return range(self.pow_min, self.pow_max + 1)

    def cl_values(self) -> range:
        return range(self.cl_min, self.cl_max + 1)

    def pos_values(self) -> range:
        return range(1, self.num_nodes + 1)

    def grid_ok(self, total: int) -> bool:
        if self.grid_bounds == INCLUSIVE:
            return self.pow_lim_neg <= total <= self.pow_lim_pos
        return self.pow_lim_neg < total < self.pow_lim_pos


@dataclass(frozen=True)
class VehicleTrajectory:
    cl: Tuple[int, ...]
    pow: Tuple[int, ...]
    pos: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "cl", tuple(int(x) for x in self.cl))
        object.__setattr__(self, "pow", tuple(int(x) for x in self.pow))
        object.__setattr__(self, "pos", tuple(int(x) for x in self.pos))
        if not (len(self.cl) == len(self.pos) == len(self.pow) + 1):
            raise ValueError(
                f"inconsistent lengths: cl={len(self.cl)}, pow={len(self.pow)}, pos={len(self.pos)}"
            )

    @property
    def num_steps(self) -> int:
        return len(self.pow)

    @classmethod
    def idle(cls, inst: Instance, vehicle_index: int) -> "VehicleTrajectory":
        """Stay at the initial node with the initial charge for every step."""
        spec = inst.vehicles[vehicle_index]
        T = inst.num_steps
        return cls((spec.cl_initial,) * (T + 1), (0,) * T, (spec.pos_initial,) * (T + 1))


@dataclass(frozen=True)
class GlobalSolution:
    trajectories: Tuple[VehicleTrajectory, ...]

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(self.trajectories))

    def __len__(self):
        return len(self.trajectories)

    def step_power(self, t: int) -> int:
        """Fleet power drawn at step ``t`` (1-based)."""
        return sum(v.pow[t - 1] for v in self.trajectories)


class Violation(NamedTuple):
    constraint: str
    step: Optional[int]
    vehicle: Optional[int]
    detail: str = ""


@dataclass(frozen=True)
class FeasibilityReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.feasible

    def tags(self) -> List[str]:
        return [v.constraint for v in self.violations]


@dataclass(frozen=True)
class InstanceReport:
    problems: Tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.valid


def validate_instance(inst: Instance) -> InstanceReport:
    """Schema and domain checks on the instance data itself."""
    problems = []
    P = inst.num_nodes
    T = inst.num_steps
    for name in ("num_vehicles", "num_steps", "num_nodes", "pow_max"):
        if getattr(inst, name) < 1:
            problems.append(f"{name} must be a positive integer")
    if len(inst.buy_price) != T:
        problems.append(f"buy_price length {len(inst.buy_price)} != num_steps {T}")
    if len(inst.sell_price) != T:
        problems.append(f"sell_price length {len(inst.sell_price)} != num_steps {T}")
    if inst.cl_min > inst.cl_max:
        problems.append(f"cl_min {inst.cl_min} > cl_max {inst.cl_max}")
    if inst.d_pow % 2 == 0:
        problems.append(f"power domain size {inst.d_pow} is even")
    elif inst.pow_min != -inst.pow_max:
        problems.append(f"power domain {inst.pow_min}..{inst.pow_max} is not symmetric")
    if inst.pow_lim_neg >= inst.pow_lim_pos:
        problems.append(f"pow_lim_neg {inst.pow_lim_neg} >= pow_lim_pos {inst.pow_lim_pos}")
    if inst.grid_bounds not in GRID_BOUNDS:
        problems.append(f"grid_bounds must be one of {GRID_BOUNDS}, got {inst.grid_bounds!r}")
    if len(inst.edge_weight) != P or any(len(row) != P for row in inst.edge_weight):
        problems.append(f"edge_weight must be {P}x{P}")
    else:
        for i, row in enumerate(inst.edge_weight, start=1):
            for j, w in enumerate(row, start=1):
                if i == j and w != 0:
                    problems.append(f"edge_weight[{i}][{j}] on the diagonal must be 0")
                elif w is not ABSENT and (not isinstance(w, int) or isinstance(w, bool) or w < 0):
                    problems.append(f"edge_weight[{i}][{j}] = {w!r} is not a nonnegative integer")
    if len(inst.vehicles) != inst.num_vehicles:
        problems.append(f"{len(inst.vehicles)} vehicle specs for num_vehicles {inst.num_vehicles}")
    for n, spec in enumerate(inst.vehicles, start=1):
        for name in ("pos_initial", "pos_final"):
            if not 1 <= getattr(spec, name) <= P:
                problems.append(f"vehicle {n}: {name} {getattr(spec, name)} outside 1..{P}")
        for name in ("cl_initial", "cl_final_min"):
            if not inst.cl_min <= getattr(spec, name) <= inst.cl_max:
                problems.append(
                    f"vehicle {n}: {name} {getattr(spec, name)} outside {inst.cl_min}..{inst.cl_max}"
                )
    return InstanceReport(tuple(problems))


def domain_problems(inst: Instance, v: VehicleTrajectory) -> List[str]:
    if (
        v.num_steps == inst.num_steps
        and inst.cl_min <= min(v.cl) and max(v.cl) <= inst.cl_max
        and inst.pow_min <= min(v.pow) and max(v.pow) <= inst.pow_max
        and 1 <= min(v.pos) and max(v.pos) <= inst.num_nodes
    ):
        return []
    out = []
    if v.num_steps != inst.num_steps:
        out.append(f"trajectory has {v.num_steps} steps, instance has {inst.num_steps}")
    for t, x in enumerate(v.cl):
        if not inst.cl_min <= x <= inst.cl_max:
            out.append(f"cl[{t}] = {x} outside {inst.cl_min}..{inst.cl_max}")
    for t, x in enumerate(v.pow, start=1):
        if not inst.pow_min <= x <= inst.pow_max:
            out.append(f"pow[{t}] = {x} outside {inst.pow_min}..{inst.pow_max}")
    for t, x in enumerate(v.pos):
        if not 1 <= x <= inst.num_nodes:
            out.append(f"pos[{t}] = {x} outside 1..{inst.num_nodes}")
    return out


def _require_domain(inst: Instance, v: VehicleTrajectory) -> None:
    problems = domain_problems(inst, v)
    if problems:
        raise DomainError("; ".join(problems))


def step_price(inst: Instance, t: int, pw: int) -> Fraction:
    """Money paid for drawing ``pw`` units at step ``t`` (negative when selling)."""
    if pw > 0:
        return pw * inst.buy_price[t - 1]
    if pw < 0:
        return pw * inst.sell_price[t - 1]
    return Fraction(0)


def trajectory_cost(inst: Instance, v: VehicleTrajectory) -> Fraction:
    _require_domain(inst, v)
    return sum((step_price(inst, t, pw) for t, pw in enumerate(v.pow, start=1)), Fraction(0))


def solution_cost(inst: Instance, s: GlobalSolution) -> Fraction:
    return sum((trajectory_cost(inst, v) for v in s.trajectories), Fraction(0))


def step_violation(
    inst: Instance, cl_prev: int, pos_prev: int, cl: int, pw: int, pos: int
) -> Optional[Tuple[str, str]]:
    """Check one transition ``t-1 -> t``; return ``(tag, detail)`` or ``None``.

    A move must use an existing road, draw no power and lose exactly the
    road's energy. A stay changes the charge level by exactly the power drawn.
    """
    if pos_prev != pos:
        if pw != 0:
            return "C3", f"moves {pos_prev}->{pos} while drawing {pw}"
        w = inst.weight(pos_prev, pos)
        if w is ABSENT:
            return "C5", f"no road {pos_prev}->{pos}"
        if cl != cl_prev - w:
            return "C5", f"move {pos_prev}->{pos} costs {w}, charge went {cl_prev}->{cl}"
        return None
    if cl != cl_prev + pw:
        return "C4", f"charge went {cl_prev}->{cl} with power {pw}"
    return None


def step_feasible(inst: Instance, cl_prev: int, pos_prev: int, cl: int, pw: int, pos: int) -> bool:
    return step_violation(inst, cl_prev, pos_prev, cl, pw, pos) is None


def check_partial(inst: Instance, vehicle_index: int, v: VehicleTrajectory) -> FeasibilityReport:
    """Check the single-vehicle constraints C1-C6 and report every violation."""
    spec = inst.vehicles[vehicle_index]
    T = inst.num_steps
    found = [Violation("C6", None, vehicle_index, p) for p in domain_problems(inst, v)]
    if found:
        return FeasibilityReport(tuple(found))
    if v.pos[0] != spec.pos_initial:
        found.append(Violation("C1", 0, vehicle_index, f"starts at {v.pos[0]}"))
    if v.pos[T] != spec.pos_final:
        found.append(Violation("C1", T, vehicle_index, f"ends at {v.pos[T]}"))
    if v.cl[0] != spec.cl_initial:
        found.append(Violation("C2", 0, vehicle_index, f"starts with charge {v.cl[0]}"))
    if v.cl[T] < spec.cl_final_min:
        found.append(Violation("C2", T, vehicle_index, f"ends with charge {v.cl[T]}"))
    for t in range(1, T + 1):
        bad = step_violation(inst, v.cl[t - 1], v.pos[t - 1], v.cl[t], v.pow[t - 1], v.pos[t])
        if bad is not None:
            found.append(Violation(bad[0], t, vehicle_index, bad[1]))
    return FeasibilityReport(tuple(found))


def check_global(inst: Instance, s: GlobalSolution) -> FeasibilityReport:
    """Per-vehicle checks for every trajectory plus the grid limit C7 at every step."""
    if len(s) != inst.num_vehicles:
        return FeasibilityReport(
            (Violation("C7", None, None, f"{len(s)} trajectories for {inst.num_vehicles} vehicles"),)
        )
    found: List[Violation] = []
    out_of_domain = False
    for n, v in enumerate(s.trajectories):
        violations = check_partial(inst, n, v).violations
        out_of_domain |= bool(violations) and violations[0].constraint == "C6"
        found.extend(violations)
    if out_of_domain:
        return FeasibilityReport(tuple(found))
    for t in range(1, inst.num_steps + 1):
        total = s.step_power(t)
        if not inst.grid_ok(total):
            found.append(Violation("C7", t, None, f"fleet power {total}"))
    return FeasibilityReport(tuple(found))


def toy_instance(grid_bounds: str = INCLUSIVE) -> Instance:
    """The four-car, four-step, four-node benchmark instance.

    The default reads the grid limit of +-3 as inclusive; it is the reading
    under which the fleet can reach its charge targets at more than one cost
    level (the strict reading leaves exactly fleet power 2 at every step).
    """
    A = ABSENT
    return Instance(
        num_vehicles=4,
        num_steps=4,
        num_nodes=4,
        edge_weight=(
            (0, 0, 0, 1),
            (0, 0, 0, A),
            (A, 0, 0, 0),
            (1, A, 0, 0),
        ),
        buy_price=(3, 5, 4, 5),
        sell_price=("2", "4.5", "3.5", "4"),
        pow_max=1,
        cl_min=1,
        cl_max=5,
        pow_lim_neg=-3,
        pow_lim_pos=3,
        vehicles=(
            VehicleSpec(2, 4, 3, 5),
            VehicleSpec(1, 3, 1, 3),
            VehicleSpec(2, 3, 1, 4),
            VehicleSpec(4, 1, 3, 4),
        ),
        grid_bounds=grid_bounds,
    )


def energy_balance(inst: Instance, v: VehicleTrajectory) -> int:
    """Net charge change implied by power drawn minus road energy spent."""
    spent = 0
    for t in range(1, v.num_steps + 1):
        a, b = v.pos[t - 1], v.pos[t]
        if a != b:
            w = inst.weight(a, b)
            if w is ABSENT:
                raise DomainError(f"no road {a}->{b}")
            spent += w
    return sum(v.pow) - spent


def replace(inst: Instance, **changes) -> Instance:
    """Copy of ``inst`` with some fields replaced (no validation)."""
    return Instance(**{**inst.__dict__, **changes})

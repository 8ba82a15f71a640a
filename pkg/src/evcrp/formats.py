"""JSON and CSV readers/writers for instances, pools, results, traces and energies."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .encoding import decode, layout_for_vehicle
from .hamiltonian import EnergyBreakdown
from .model import Instance, VehicleSpec, VehicleTrajectory, check_partial
from .sampler import SamplingTrace, StrategyCurve
from .search import GlobalStats, PartialPool, SearchResult

INSTANCE_INT_FIELDS = (
    "num_vehicles",
    "num_steps",
    "num_nodes",
    "pow_max",
    "cl_min",
    "cl_max",
    "pow_lim_neg",
    "pow_lim_pos",
)
VEHICLE_FIELDS = ("pos_initial", "pos_final", "cl_initial", "cl_final_min")


class SchemaError(ValueError):
    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


def format_rational(x) -> str:
    """Plain decimal when the value has a finite expansion, ``p/q`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    places = max(twos, fives)
    scaled = abs(x.numerator) * 10**places // x.denominator
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if x < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _price(x, where: str, problems: List[str]):
    if isinstance(x, bool) or not isinstance(x, (int, str, Fraction)):
        problems.append(f"{where}: {x!r} is not a number or decimal string")
        return None
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError):
        problems.append(f"{where}: cannot parse {x!r} as a rational")
        return None


def instance_from_dict(data: Dict) -> Instance:
    """Build an :class:`Instance`, raising :class:`SchemaError` on type or shape problems.

    Domain-level checks are left to :func:`evcrp.model.validate_instance`.
    """
    problems: List[str] = []
    if not isinstance(data, dict):
        raise SchemaError(["top level must be a JSON object"])
    for key in INSTANCE_INT_FIELDS:
        if key not in data:
            problems.append(f"missing field {key!r}")
        elif not _is_int(data[key]):
            problems.append(f"{key}: {data[key]!r} is not an integer")
    for key in ("edge_weight", "buy_price", "sell_price", "vehicles"):
        if key not in data:
            problems.append(f"missing field {key!r}")
        elif not isinstance(data[key], list):
            problems.append(f"{key} must be an array")
    if problems:
        raise SchemaError(problems)

    weights = []
    for i, row in enumerate(data["edge_weight"], start=1):
        if not isinstance(row, list):
            problems.append(f"edge_weight row {i} must be an array")
            continue
        out_row = []
        for j, w in enumerate(row, start=1):
            if w is not None and not _is_int(w):
                problems.append(f"edge_weight[{i}][{j}]: {w!r} is not an integer or null")
            out_row.append(w)
        weights.append(tuple(out_row))
    buy = [_price(x, f"buy_price[{t}]", problems) for t, x in enumerate(data["buy_price"], 1)]
    sell = [_price(x, f"sell_price[{t}]", problems) for t, x in enumerate(data["sell_price"], 1)]
    vehicles = []
    for n, v in enumerate(data["vehicles"], start=1):
        if not isinstance(v, dict):
            problems.append(f"vehicle {n} must be an object")
            continue
        bad = [k for k in VEHICLE_FIELDS if not _is_int(v.get(k))]
        if bad:
            problems.append(f"vehicle {n}: missing or non-integer {', '.join(bad)}")
            continue
        vehicles.append(VehicleSpec(*(v[k] for k in VEHICLE_FIELDS)))
    extras = {}
    if "grid_bounds" in data:
        extras["grid_bounds"] = data["grid_bounds"]
    if "pow_min" in data:
        if not _is_int(data["pow_min"]):
            problems.append(f"pow_min: {data['pow_min']!r} is not an integer")
        extras["pow_min"] = data["pow_min"]
    if problems:
        raise SchemaError(problems)
    return Instance(
        edge_weight=tuple(weights),
        buy_price=tuple(buy),
        sell_price=tuple(sell),
        vehicles=tuple(vehicles),
        **{k: data[k] for k in INSTANCE_INT_FIELDS},
        **extras,
    )


def parse_instance(text: str) -> Instance:
    """Parse instance JSON; floats are read from their decimal text, so 4.5 becomes 9/2."""
    return instance_from_dict(json.loads(text, parse_float=Fraction))


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as f:
        return parse_instance(f.read())


def instance_to_dict(inst: Instance) -> Dict:
    out = {k: getattr(inst, k) for k in INSTANCE_INT_FIELDS}
    out["edge_weight"] = [list(r) for r in inst.edge_weight]
    out["buy_price"] = [format_rational(p) for p in inst.buy_price]
    out["sell_price"] = [format_rational(p) for p in inst.sell_price]
    out["vehicles"] = [{k: getattr(v, k) for k in VEHICLE_FIELDS} for v in inst.vehicles]
    out["grid_bounds"] = inst.grid_bounds
    if inst.pow_min != -inst.pow_max:
        out["pow_min"] = inst.pow_min
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def trajectory_to_dict(v: VehicleTrajectory) -> Dict:
    return {"cl": list(v.cl), "pow": list(v.pow), "pos": list(v.pos)}


def pools_to_dict(pools: Sequence[PartialPool]) -> List[Dict]:
    return [
        {
            "vehicle": p.vehicle_index + 1,
            "size": len(p),
            "solutions": [
                {"index": e.index, "cost": format_rational(e.cost), **trajectory_to_dict(e.trajectory)}
                for e in p.entries
            ],
        }
        for p in pools
    ]


def result_to_dict(result: SearchResult) -> Dict:
    return {
        "method": result.method,
        "cost": format_rational(result.cost),
        "level": result.level_reached,
        "combinations_examined": result.combinations_examined,
        "certified_optimal": result.is_certified_optimal,
        "choice": list(result.choice),
        "solution": [trajectory_to_dict(v) for v in result.solution.trajectories],
    }


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    if x == float("inf"):
        return "inf"
    return format(x, ".10g")


def stats_csv(stats: GlobalStats) -> str:
    return _csv(["cost", "count"], [(format_rational(c), n) for c, n in stats.cost_histogram.items()])


def trace_csv(trace: SamplingTrace) -> str:
    rows = [
        (
            r.run,
            r.iterations,
            int(r.success),
            "" if r.found is None else r.found,
            r.cumulative_found,
            r.cumulative_iterations,
        )
        for r in trace.runs
    ]
    return _csv(
        ["run", "iterations", "success", "found_index", "cumulative_found", "cumulative_iterations"],
        rows,
    )


def benchmark_csv(curves: Dict[str, StrategyCurve]) -> str:
    rows = []
    for name, c in curves.items():
        for run, vals in enumerate(zip(c.median, c.mean, c.q25, c.q75), start=1):
            rows.append((name, run, *(_num(v) for v in vals)))
    return _csv(["strategy", "run", "median_found", "mean_found", "q25", "q75"], rows)


def energies_csv(inst: Instance, vehicle_index: int, states: Sequence[Tuple[int, EnergyBreakdown]]) -> str:
    layout = layout_for_vehicle(inst)
    rows = []
    for index, e in states:
        feasible = check_partial(inst, vehicle_index, decode(layout, index)).feasible
        rows.append(
            (
                index,
                format_rational(e.cost_term),
                *(format_rational(h) for h in e.constraint_terms),
                format_rational(e.total),
                str(feasible).lower(),
            )
        )
    return _csv(["index", "cost_term", "h1", "h2", "h3", "h4", "h5", "total", "feasible"], rows)

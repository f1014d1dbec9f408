"""Run reports and their byte-stable JSON form."""
from __future__ import annotations

import json
import math
import time
from contextlib import contextmanager

from mcut.decomposition import TreeDecomposition, heuristic_tree_decomposition
from mcut.errors import InputError
from mcut.fractional import DEFAULT_EPSILON, pair_distances
from mcut.graph import Graph
from mcut.io import InstanceFiles
from mcut.oracle import brute_force_multicut, verify_multicut, verify_sdd
from mcut.pipeline import run_pipeline
from mcut.region import gvy_bound, gvy_multicut

BOUND_SLACK = 1e-6


def dumps(obj, indent: int = 2) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits.

    Non-finite floats become ``null``.
    """
    out: list[str] = []

    def emit(x, depth):
        pad = " " * (indent * (depth + 1))
        end = " " * (indent * depth)
        if x is None:
            out.append("null")
        elif x is True:
            out.append("true")
        elif x is False:
            out.append("false")
        elif isinstance(x, int):
            out.append(str(x))
        elif isinstance(x, float):
            out.append(format(x, ".17g") if math.isfinite(x) else "null")
        elif isinstance(x, str):
            out.append(_string(x))
        elif isinstance(x, dict):
            if not x:
                out.append("{}")
                return
            out.append("{\n")
            for i, (k, v) in enumerate(x.items()):
                out.append(f"{pad}{_string(str(k))}: ")
                emit(v, depth + 1)
                out.append(",\n" if i < len(x) - 1 else "\n")
            out.append(end + "}")
        elif isinstance(x, (list, tuple)):
            if not x:
                out.append("[]")
            elif all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
                out.append("[")
                for i, v in enumerate(x):
                    emit(v, depth + 1)
                    if i < len(x) - 1:
                        out.append(", ")
                out.append("]")
            else:
                out.append("[\n")
                for i, v in enumerate(x):
                    out.append(pad)
                    emit(v, depth + 1)
                    out.append(",\n" if i < len(x) - 1 else "\n")
                out.append(end + "]")
        else:
            raise TypeError(f"cannot serialise {type(x).__name__}")

    emit(obj, 0)
    return "".join(out) + "\n"


def _string(s: str) -> str:
    return json.dumps(s, ensure_ascii=True)


class Timer:
    def __init__(self):
        self.ms: dict[str, float] = {}

    @contextmanager
    def __call__(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.ms[name] = self.ms.get(name, 0.0) + (time.perf_counter() - t0) * 1000.0


def _pair_feasible(fs_distances) -> bool:
    return all(d >= 1.0 - 1e-9 for d in fs_distances)


def solve_report(inst: InstanceFiles, *, epsilon: float = DEFAULT_EPSILON, lengths: str = "lp",
                 oracle: bool = False, baseline: bool = False, timings: bool = False) -> dict:
    """Run the pipeline on one instance and assemble its report.

    ``verification.ok`` is false when any check or bound fails.
    """
    g: Graph = inst.graph
    if lengths == "given" and not inst.has_lengths and g.m:
        raise InputError("the graph file carries no lengths; use --lengths lp")
    td: TreeDecomposition = inst.td or heuristic_tree_decomposition(g)
    clock = Timer()
    with clock("pipeline"):
        run = run_pipeline(g, td, lengths=lengths, epsilon=epsilon)
    res = run.result
    x = run.fs.x if run.fs is not None else {e.id: e.length for e in g.edges}
    if lengths == "lp":
        multicut_applies = True
    else:
        multicut_applies = _pair_feasible(pair_distances(g, x, g.pairs)) if g.k else True
    with clock("verify"):
        mc = verify_multicut(g, run.cut) if multicut_applies else None
        sdd = verify_sdd(g, run.cut, x)
    bounds = dict(run.bounds)
    bounds["gvy_bound"] = gvy_bound(g.k, run.fstar)
    gvy = None
    if baseline and run.fs is not None:
        with clock("baseline"):
            gvy = gvy_multicut(g, run.fs)
    opt = None
    if oracle:
        with clock("oracle"):
            opt = brute_force_multicut(g, upper_bound=run.cut)
    bounds_ok = (res.X3.cost <= bounds["b8"] + BOUND_SLACK
                 and res.X2.cost <= bounds["b128"] + BOUND_SLACK
                 and run.cut.cost <= bounds["b136"] + BOUND_SLACK)
    diag = res.diagnostics
    r = run.width
    structure_ok = (diag["iterations"] <= r and diag["max_cores_per_bag"] <= r * r
                    and diag["max_shadow_count"] <= 2 * r**3 + 2 * r)
    multicut_ok = None if mc is None and not multicut_applies else mc is None
    report = {
        "instance": {
            "name": inst.name,
            "n": g.n,
            "m": g.m,
            "k": g.k,
            "width": r,
            "seed": inst.meta.get("seed"),
        },
        "lp": {
            "lengths": lengths,
            "epsilon": epsilon if lengths == "lp" else None,
            "F*": run.fstar,
            "flow": run.flow.total if run.flow is not None else None,
            "scale": run.fs.scale if run.fs is not None else None,
            "dropped_pairs": list(run.fs.dropped_pairs) if run.fs is not None else [],
        },
        "algorithm": {
            "name": "three-phase",
            "cut_edges": [i + 1 for i in run.cut.sorted_ids()],
            "cost": run.cut.cost,
            "phase_costs": {"X2": res.X2.cost, "X3": res.X3.cost},
            "iterations": diag["iterations"],
            "diagnostics": {
                "max_shadow_count": diag["max_shadow_count"],
                "max_cores_per_bag": diag["max_cores_per_bag"],
                "cores": diag["cores"],
                "components": diag["components"],
            },
        },
        "baseline": {"cost": gvy.cost if gvy is not None else None,
                     "cut_edges": [i + 1 for i in gvy.sorted_ids()] if gvy is not None else None},
        "oracle": {"opt_cost": opt.cost if opt is not None else None},
        "bounds": bounds,
        "verification": {
            "multicut_ok": multicut_ok,
            "sdd_ok": sdd is None,
            "bounds_ok": bounds_ok,
            "structure_ok": structure_ok,
            "witness": str(mc or sdd) if (mc or sdd) else None,
        },
    }
    v = report["verification"]
    v["ok"] = bool(v["sdd_ok"] and bounds_ok and structure_ok and multicut_ok is not False)
    if timings:
        report["timings_ms"] = dict(clock.ms)
    return report

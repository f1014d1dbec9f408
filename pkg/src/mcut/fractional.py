"""Fractional multicut lengths and a certifying multicommodity flow.

The LP pair (minimum fractional multicut / maximum multiflow) is solved
approximately with the multiplicative-weights flow router in
:mod:`mcut.kernels`. The returned lengths are normalised so the closest
terminal pair sits at distance exactly 1, which makes them primal feasible;
the routed flow is divided by its maximum edge congestion, which makes it
dual feasible. Weak duality then gives ``flow <= OPT_LP <= F*``.
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from mcut import kernels
from mcut.checks import Violation, plain_dijkstra
from mcut.errors import InputError
from mcut.graph import INFINITE, Graph, connected_components, is_infinite

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.1


@dataclass(frozen=True)
class FractionalSolution:
    x: dict  # edge id -> length
    cost: float  # F* = sum c(e) x(e)
    pair_distances: tuple
    epsilon: float
    scale: float  # raw lengths were divided by this
    dropped_pairs: tuple = ()


@dataclass(frozen=True)
class FlowPath:
    pair: int
    edges: tuple
    value: float


@dataclass(frozen=True)
class FlowPaths:
    paths: tuple
    total: float
    congestion: float = 0.0  # raw flow was divided by this


def pair_distances(g: Graph, x: dict, pairs) -> list[float]:
    cache: dict[int, dict] = {}
    out = []
    for s, t in pairs:
        if s not in cache:
            cache[s] = plain_dijkstra(g, s, x)
        out.append(cache[s].get(t, math.inf))
    return out


def classify_pairs(g: Graph) -> tuple[list[int], list[int]]:
    """Split pair indices into (active, dropped-because-disconnected).

    Raises :class:`InputError` for a pair with ``s == t`` or a pair joined by
    infinite-capacity edges alone; no multicut exists for either.
    """
    comp_of = {}
    for i, comp in enumerate(connected_components(g)):
        for v in comp:
            comp_of[v] = i
    inf_graph = Graph(g.n, [e for e in g.edges if is_infinite(e.capacity)], (), g.vertices,
                      simple=g.simple, check=False)
    inf_comp = {}
    for i, comp in enumerate(connected_components(inf_graph)):
        for v in comp:
            inf_comp[v] = i
    active, dropped = [], []
    for i, (s, t) in enumerate(g.pairs):
        if s == t:
            raise InputError(f"pair {i} has source equal to sink ({s}); no multicut exists")
        if inf_comp[s] == inf_comp[t]:
            raise InputError(f"pair {i} ({s}, {t}) is joined by uncuttable edges only")
        if comp_of[s] != comp_of[t]:
            dropped.append(i)
        else:
            active.append(i)
    return active, dropped


def normalize_lengths(g: Graph, raw, pairs) -> tuple[dict, float]:
    """Divide raw lengths (by edge position) by the smallest pair distance."""
    ids = [e.id for e in g.edges]
    raw_map = {eid: float(v) for eid, v in zip(ids, raw)}
    alpha = min(pair_distances(g, raw_map, pairs))
    return {eid: v / alpha for eid, v in raw_map.items()}, alpha


def solve_fractional(g: Graph, epsilon: float = DEFAULT_EPSILON) -> tuple[FractionalSolution, FlowPaths]:
    if not 0.0 < epsilon < 1.0:
        raise InputError(f"epsilon must lie in (0, 1), got {epsilon}")
    if g.k == 0:
        x = {e.id: 0.0 for e in g.edges}
        return FractionalSolution(x, 0.0, (), epsilon, 1.0), FlowPaths((), 0.0)
    active, dropped = classify_pairs(g)
    for i in dropped:
        log.warning("pair %d %s is already disconnected; dropped", i, g.pairs[i])
    if not active:
        x = {e.id: 0.0 for e in g.edges}
        dists = tuple(math.inf for _ in g.pairs)
        return FractionalSolution(x, 0.0, dists, epsilon, 1.0, tuple(dropped)), FlowPaths((), 0.0)

    a = g.arrays
    src = np.asarray([g.pairs[i][0] for i in active], dtype=np.int64)
    dst = np.asarray([g.pairs[i][1] for i in active], dtype=np.int64)
    best, flow, aug_pair, aug_amount, aug_ptr, aug_edges, _, status = kernels.gk_multiflow(
        a.indptr, a.nbr, a.sedge, a.eu, a.ev, a.cap, src, dst, float(epsilon))
    if status < 0:
        raise InputError("a terminal pair is joined by uncuttable edges only")

    active_pairs = [g.pairs[i] for i in active]
    x, alpha = normalize_lengths(g, best, active_pairs)
    dists = pair_distances(g, x, g.pairs)
    cost = math.fsum(e.capacity * x[e.id] for e in g.edges if not is_infinite(e.capacity))

    congestion = 0.0
    for e, f in zip(g.edges, flow):
        if 0.0 < e.capacity < INFINITE:
            congestion = max(congestion, f / e.capacity)
    merged: dict[tuple, float] = defaultdict(float)
    order = []
    for r, (j, amount) in enumerate(zip(aug_pair, aug_amount)):
        key = (active[j], tuple(int(a.eid[p]) for p in aug_edges[aug_ptr[r]:aug_ptr[r + 1]]))
        if key not in merged:
            order.append(key)
        merged[key] += amount
    paths = tuple(FlowPath(pair, edges, merged[(pair, edges)] / congestion)
                  for pair, edges in order) if congestion > 0 else ()
    total = math.fsum(p.value for p in paths)
    fs = FractionalSolution(x, cost, tuple(dists), epsilon, alpha, tuple(dropped))
    return fs, FlowPaths(paths, total, congestion)


def verify_primal(g: Graph, fs: FractionalSolution, tol: float = 1e-9) -> Violation | None:
    """Recompute pair distances under ``fs.x``; report the first shortfall."""
    for e in g.edges:
        xe = fs.x.get(e.id)
        if xe is None or not xe >= 0.0:
            return Violation("primal", f"edge {e.id} has invalid length {xe}", e.id)
        if is_infinite(e.capacity) and xe != 0.0:
            return Violation("primal", f"infinite edge {e.id} has nonzero length {xe}", e.id)
    for i, d in enumerate(pair_distances(g, fs.x, g.pairs)):
        if d < 1.0 - tol:
            return Violation("primal", f"pair {i} {g.pairs[i]} at distance {d} < 1", i)
    return None


def verify_dual(g: Graph, fp: FlowPaths, tol: float = 1e-9) -> Violation | None:
    """Check every path joins its own pair and no edge is over capacity."""
    load: dict[int, float] = defaultdict(float)
    for idx, p in enumerate(fp.paths):
        if p.value < 0:
            return Violation("dual", f"path {idx} has negative value {p.value}", idx)
        if not 0 <= p.pair < g.k:
            return Violation("dual", f"path {idx} names unknown pair {p.pair}", idx)
        s, t = g.pairs[p.pair]
        v = s
        for eid in p.edges:
            if not g.has_edge(eid):
                return Violation("dual", f"path {idx} uses unknown edge {eid}", idx)
            e = g.edge(eid)
            if v not in (e.u, e.v):
                return Violation("dual", f"path {idx} is not contiguous at edge {eid}", idx)
            v = e.other(v)
            load[eid] += p.value
        if v != t:
            return Violation("dual", f"path {idx} ends at {v}, not at sink {t}", idx)
    for eid, f in sorted(load.items()):
        c = g.edge(eid).capacity
        if not is_infinite(c) and f > c * (1.0 + tol) + (tol if c == 0 else 0.0):
            return Violation("dual", f"edge {eid} carries {f} > capacity {c}", eid)
    return None

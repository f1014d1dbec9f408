"""Ground truth for small instances and independent verifiers.

Nothing here calls the compiled kernels; verifiers recompute from the raw
graph so a bug in the fast path cannot hide itself.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from mcut.checks import Violation
from mcut.errors import InputError, VerificationError
from mcut.fractional import FlowPaths, FractionalSolution
from mcut.graph import CutSet, Graph, find_path, is_infinite, remove_edges

DEFAULT_MAX_EDGES = 24


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n + 1))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x


def brute_force_multicut(g: Graph, max_edges: int = DEFAULT_MAX_EDGES,
                         upper_bound: CutSet | None = None) -> CutSet:
    """Exact minimum multicut by branch and bound over edge subsets.

    Edges are decided in order of decreasing capacity, trying "keep" before
    "cut"; kept edges are merged in a union-find and a branch dies as soon as
    it joins some pair. Among optimal cuts the lexicographically smallest
    sorted id list is returned. ``upper_bound`` (any feasible cut) only
    speeds up the search.
    """
    finite = [e for e in g.edges if not is_infinite(e.capacity)]
    if len(finite) > max_edges:
        raise InputError(f"{len(finite)} cuttable edges exceed the limit of {max_edges}; "
                         "the exhaustive oracle is meant for small instances "
                         "(raise max_edges at your own risk)")
    for i, (s, t) in enumerate(g.pairs):
        if s == t:
            raise InputError(f"pair {i} has source equal to sink ({s}); no multicut exists")
    base = _UnionFind(g.n)
    for e in g.edges:
        if is_infinite(e.capacity):
            a, b = base.find(e.u), base.find(e.v)
            if a != b:
                base.parent[a] = b
    for i, (s, t) in enumerate(g.pairs):
        if base.find(s) == base.find(t):
            raise InputError(f"pair {i} ({s}, {t}) is joined by uncuttable edges only")
    if not g.pairs:
        return CutSet(frozenset(), 0.0)

    order = sorted(finite, key=lambda e: (-e.capacity, e.id))
    pairs = g.pairs
    best_ids: tuple | None = None
    best_cost = math.inf
    if upper_bound is not None:
        if verify_multicut(g, upper_bound) is None:
            best_ids = tuple(sorted(upper_bound.edge_ids))
            best_cost = math.fsum(g.edge(i).capacity for i in best_ids)
    slack = 1e-12

    def consider(ids):
        nonlocal best_ids, best_cost
        cand = tuple(sorted(ids))
        cost = math.fsum(g.edge(i).capacity for i in cand)
        if cost < best_cost or (cost == best_cost and (best_ids is None or cand < best_ids)):
            best_ids, best_cost = cand, cost

    def joined(parent):
        for s, t in pairs:
            x = s
            while parent[x] != x:
                x = parent[x]
            y = t
            while parent[y] != y:
                y = parent[y]
            if x == y:
                return True
        return False

    def root(parent, x):
        while parent[x] != x:
            x = parent[x]
        return x

    def search(i, parent, cost, cut):
        if cost > best_cost * (1 + slack) + slack:
            return
        if i == len(order):
            consider(cut)
            return
        e = order[i]
        a, b = root(parent, e.u), root(parent, e.v)
        if a == b:
            # endpoints already joined: cutting it only adds cost, unless it is free
            search(i + 1, parent, cost, cut)
            if e.capacity == 0.0:
                cut.append(e.id)
                search(i + 1, parent, cost, cut)
                cut.pop()
            return
        merged = parent[:]
        merged[a] = b
        if not joined(merged):
            search(i + 1, merged, cost, cut)
        cut.append(e.id)
        search(i + 1, parent, cost + e.capacity, cut)
        cut.pop()

    start = base.parent[:]
    for v in range(len(start)):
        start[v] = base.find(v)
    search(0, start, 0.0, [])
    if best_ids is None:
        raise VerificationError("no multicut found; this should be impossible")
    return CutSet.of(g, best_ids)


def _cut_ids(cut) -> frozenset:
    return cut.edge_ids if isinstance(cut, CutSet) else frozenset(int(i) for i in cut)


def verify_multicut(g: Graph, cut) -> Violation | None:
    """None if removing ``cut`` separates every pair; else a witness path."""
    ids = _cut_ids(cut)
    for i in ids:
        if not g.has_edge(i):
            return Violation("multicut", f"cut names unknown edge {i}", i)
    rest = remove_edges(g, ids)
    for i, (s, t) in enumerate(g.pairs):
        path = find_path(rest, s, t)
        if path is not None:
            return Violation("multicut", f"pair {i} ({s}, {t}) still connected via {path}",
                             path)
    return None


def _adjacency(g: Graph, lengths=None):
    adj: dict[int, list] = {v: [] for v in g.vertices}
    for e in g.edges:
        ln = e.length if lengths is None else lengths[e.id]
        adj[e.u].append((e.v, ln))
        adj[e.v].append((e.u, ln))
    return adj


def _dijkstra_below(adj, source, limit):
    """Distances from ``source`` that are strictly below ``limit``."""
    dist = {source: 0.0}
    done = set()
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        if d >= limit:
            break
        done.add(v)
        for w, ln in adj[v]:
            nd = d + ln
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return {v: dist[v] for v in done}


def verify_sdd(g_full: Graph, cut, lengths=None) -> Violation | None:
    """None if every component of ``g_full - cut`` has weak diameter below 1.

    Distances are measured in ``g_full`` itself, under ``lengths`` (by edge
    id) when given.
    """
    ids = _cut_ids(cut)
    adj_full = _adjacency(g_full, lengths)
    rest = remove_edges(g_full, ids)
    seen: set[int] = set()
    radj = rest.adjacency
    for v0 in sorted(rest.vertices):
        if v0 in seen:
            continue
        comp = [v0]
        seen.add(v0)
        j = 0
        while j < len(comp):
            x = comp[j]
            j += 1
            for eid in radj[x]:
                y = rest.edge(eid).other(x)
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
        comp.sort()
        for u in comp[:-1]:
            near = _dijkstra_below(adj_full, u, 1.0)
            for v in comp:
                if v not in near:
                    return Violation("sdd", f"vertices {u} and {v} share a component but are "
                                     "at distance >= 1", (u, v))
    return None


@dataclass(frozen=True)
class GapReport:
    flow_value: float
    fstar: float
    algorithm_cost: float
    integral_opt: float | None = None
    gvy_cost: float | None = None
    ratios: dict = field(default_factory=dict)
    headroom: dict = field(default_factory=dict)


def gap_report(g: Graph, fs: FractionalSolution, fp: FlowPaths, algorithm_cost: float, *,
               r: int | None = None, opt: float | None = None, gvy: float | None = None,
               phase_costs: dict | None = None) -> GapReport:
    """Collect the flow / LP / cut values and check every inequality between them.

    Raises :class:`VerificationError` naming each violated bound.
    """
    from mcut.pipeline import cost_bounds
    from mcut.region import gvy_bound

    f, F = fp.total, fs.cost
    bad = []
    if f > F + 1e-6:
        bad.append(f"flow {f} exceeds F* {F}")
    if opt is not None:
        if f > opt + 1e-6:
            bad.append(f"flow {f} exceeds integral optimum {opt}")
        if opt > algorithm_cost + 1e-9:
            bad.append(f"integral optimum {opt} exceeds algorithm cost {algorithm_cost}")
        if gvy is not None and opt > gvy + 1e-9:
            bad.append(f"integral optimum {opt} exceeds baseline cost {gvy}")
    headroom = {}
    if r is not None:
        b = cost_bounds(r, F)
        headroom["total"] = b["b136"] + 1e-6 - algorithm_cost
        if phase_costs:
            headroom["X2"] = b["b128"] + 1e-6 - phase_costs.get("X2", 0.0)
            headroom["X3"] = b["b8"] + 1e-6 - phase_costs.get("X3", 0.0)
    if gvy is not None:
        headroom["gvy"] = gvy_bound(g.k, F) + 1e-6 - gvy
    for name, room in headroom.items():
        if room < 0:
            bad.append(f"{name} cost bound exceeded by {-room}")
    if bad:
        raise VerificationError("; ".join(bad))

    def ratio(x, y):
        return x / y if y else (1.0 if x == 0 else math.inf)

    ratios = {"cost/F*": ratio(algorithm_cost, F), "F*/flow": ratio(F, f)}
    if opt is not None:
        ratios["cost/opt"] = ratio(algorithm_cost, opt)
        ratios["opt/flow"] = ratio(opt, f)
    if gvy is not None:
        ratios["gvy/F*"] = ratio(gvy, F)
        if opt is not None:
            ratios["gvy/opt"] = ratio(gvy, opt)
    return GapReport(f, F, algorithm_cost, opt, gvy, ratios, headroom)

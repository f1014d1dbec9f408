"""Capacitated, length-weighted undirected graphs with terminal pairs.

Vertices are integer ids in ``1..n``. Edge ids are stable: subgraph
operations keep the ids of surviving edges, so a cut found on a subgraph can
be read directly against the parent graph.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from mcut import kernels
from mcut.errors import InputError, InternalError

INFINITE = math.inf
"""Capacity of edges that may never be cut. Always paired with length 0."""


def is_infinite(capacity: float) -> bool:
    return capacity == INFINITE


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    capacity: float
    length: float = 0.0

    def other(self, w: int) -> int:
        return self.v if w == self.u else self.u


class GraphArrays(NamedTuple):
    """Flat numpy view of a graph consumed by the kernels."""

    eid: np.ndarray
    eu: np.ndarray
    ev: np.ndarray
    cap: np.ndarray
    length: np.ndarray
    indptr: np.ndarray
    nbr: np.ndarray
    sedge: np.ndarray
    alive: np.ndarray


class Graph:
    """Immutable undirected graph.

    ``edges`` may hold :class:`Edge` objects or ``(u, v, capacity[, length])``
    tuples; tuples get ids equal to their position. ``vertices`` defaults to
    all of ``1..n``. Parallel edges are rejected unless ``simple=False``
    (only auxiliary graphs built by the algorithm use that).
    """

    def __init__(
        self,
        n: int,
        edges: Iterable = (),
        pairs: Iterable[tuple[int, int]] = (),
        vertices: Iterable[int] | None = None,
        *,
        simple: bool = True,
        check: bool = True,
    ):
        if n < 0:
            raise InputError(f"vertex count must be nonnegative, got {n}")
        self.n = int(n)
        built = []
        for pos, e in enumerate(edges):
            if not isinstance(e, Edge):
                if len(e) == 3:
                    u, v, c = e
                    ln = 0.0
                else:
                    u, v, c, ln = e
                e = Edge(pos, int(u), int(v), float(c), float(ln))
            built.append(e)
        self.edges: tuple[Edge, ...] = tuple(built)
        self.pairs: tuple[tuple[int, int], ...] = tuple((int(s), int(t)) for s, t in pairs)
        if vertices is None:
            self.vertices = frozenset(range(1, self.n + 1))
        else:
            self.vertices = frozenset(int(v) for v in vertices)
        self.simple = simple
        if check:
            self._validate()

    def _validate(self) -> None:
        for v in self.vertices:
            if not 1 <= v <= self.n:
                raise InputError(f"vertex {v} outside [1, {self.n}]")
        seen_ids = set()
        seen_pairs = set()
        for e in self.edges:
            if e.id in seen_ids:
                raise InputError(f"duplicate edge id {e.id}")
            seen_ids.add(e.id)
            for w in (e.u, e.v):
                if w not in self.vertices:
                    raise InputError(f"edge {e.id} endpoint {w} is not a vertex")
            if e.u == e.v:
                raise InputError(f"edge {e.id} is a self-loop at {e.u}")
            if math.isnan(e.capacity) or e.capacity < 0:
                raise InputError(f"edge {e.id} has negative capacity {e.capacity}")
            if math.isnan(e.length) or e.length < 0 or math.isinf(e.length):
                raise InputError(f"edge {e.id} has invalid length {e.length}")
            if is_infinite(e.capacity) and e.length != 0.0:
                raise InputError(f"edge {e.id} has infinite capacity but nonzero length")
            if self.simple:
                key = (min(e.u, e.v), max(e.u, e.v))
                if key in seen_pairs:
                    raise InputError(f"duplicate edge {key[0]}-{key[1]} (edge {e.id})")
                seen_pairs.add(key)
        for i, (s, t) in enumerate(self.pairs):
            for w in (s, t):
                if w not in self.vertices:
                    raise InputError(f"pair {i} terminal {w} is not a vertex")

    # ------------------------------------------------------------------ access

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def k(self) -> int:
        return len(self.pairs)

    @cached_property
    def _by_id(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    def edge(self, eid: int) -> Edge:
        return self._by_id[eid]

    def has_edge(self, eid: int) -> bool:
        return eid in self._by_id

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Incident edge ids per vertex, in edge order."""
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append(e.id)
            adj[e.v].append(e.id)
        return {v: tuple(ids) for v, ids in adj.items()}

    @cached_property
    def arrays(self) -> GraphArrays:
        m = len(self.edges)
        eid = np.fromiter((e.id for e in self.edges), dtype=np.int64, count=m)
        eu = np.fromiter((e.u for e in self.edges), dtype=np.int64, count=m)
        ev = np.fromiter((e.v for e in self.edges), dtype=np.int64, count=m)
        cap = np.fromiter((e.capacity for e in self.edges), dtype=np.float64, count=m)
        length = np.fromiter((e.length for e in self.edges), dtype=np.float64, count=m)
        deg = np.zeros(self.n + 2, dtype=np.int64)
        np.add.at(deg, eu + 1, 1)
        np.add.at(deg, ev + 1, 1)
        indptr = np.cumsum(deg)
        # CSR slots ordered by (vertex, edge position)
        ends = np.concatenate([eu, ev])
        other = np.concatenate([ev, eu])
        pos = np.concatenate([np.arange(m, dtype=np.int64)] * 2)
        order = np.lexsort((pos, ends))
        nbr = np.ascontiguousarray(other[order])
        sedge = np.ascontiguousarray(pos[order])
        alive = np.zeros(self.n + 1, dtype=np.uint8)
        if self.vertices:
            alive[np.fromiter(self.vertices, dtype=np.int64)] = 1
        return GraphArrays(eid, eu, ev, cap, length, indptr, nbr, sedge, alive)

    def total_mass(self) -> float:
        """Sum of ``c(e) * l(e)`` over finite-capacity edges."""
        return math.fsum(e.capacity * e.length for e in self.edges if not is_infinite(e.capacity))

    # ------------------------------------------------------------ derivations

    def with_lengths(self, lengths) -> "Graph":
        """Copy with new lengths, given by edge id (mapping) or edge position."""
        if hasattr(lengths, "get"):
            new = [Edge(e.id, e.u, e.v, e.capacity, float(lengths[e.id])) for e in self.edges]
        else:
            new = [Edge(e.id, e.u, e.v, e.capacity, float(x)) for e, x in zip(self.edges, lengths)]
        return Graph(self.n, new, self.pairs, self.vertices, simple=self.simple)

    def with_capacities(self, scale: float) -> "Graph":
        new = [Edge(e.id, e.u, e.v, e.capacity * scale, e.length) for e in self.edges]
        return Graph(self.n, new, self.pairs, self.vertices, simple=self.simple)

    def with_pairs(self, pairs) -> "Graph":
        return Graph(self.n, self.edges, pairs, self.vertices, simple=self.simple, check=False)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, k={self.k}, |V|={len(self.vertices)})"


@dataclass(frozen=True)
class DistanceField:
    sources: frozenset
    dist: np.ndarray

    def __getitem__(self, v: int) -> float:
        return float(self.dist[v])


@dataclass(frozen=True)
class CutSet:
    edge_ids: frozenset
    cost: float

    @classmethod
    def of(cls, g: Graph, edge_ids: Iterable[int]) -> "CutSet":
        ids = frozenset(int(i) for i in edge_ids)
        caps = []
        for i in ids:
            c = g.edge(i).capacity
            if is_infinite(c):
                raise InternalError(f"cut contains infinite-capacity edge {i}")
            caps.append(c)
        return cls(ids, math.fsum(caps))

    def __len__(self) -> int:
        return len(self.edge_ids)

    def sorted_ids(self) -> list[int]:
        return sorted(self.edge_ids)


# ---------------------------------------------------------------- operations


def _check_vertices(g: Graph, vs: Iterable[int], what: str) -> list[int]:
    out = []
    for v in vs:
        if v not in g.vertices:
            raise InputError(f"{what}: vertex {v} is not in the graph")
        out.append(int(v))
    return out


def multi_source_distances(g: Graph, sources: Iterable[int], limit: float = INFINITE) -> DistanceField:
    """Shortest-path distances from the nearest source; ``inf`` if unreachable."""
    src = _check_vertices(g, sources, "sources")
    if not src:
        raise InputError("sources must be nonempty")
    a = g.arrays
    dist = kernels.dijkstra(a.indptr, a.nbr, a.sedge, a.length, a.alive,
                            np.asarray(sorted(set(src)), dtype=np.int64), limit)
    return DistanceField(frozenset(src), dist)


def ball(g: Graph, df: DistanceField, t: float) -> frozenset:
    """Closed ball: vertices at distance at most ``t``."""
    idx = np.nonzero(df.dist <= t)[0]
    return frozenset(int(v) for v in idx if v in g.vertices)


def _edge_sides(g: Graph, df: DistanceField):
    a = g.arrays
    du = df.dist[a.eu]
    dv = df.dist[a.ev]
    return a, np.minimum(du, dv), np.maximum(du, dv)


def volume(g: Graph, df: DistanceField, t: float, initial: float) -> float:
    """Initial volume plus the ``c * l`` mass inside the ball of radius ``t``.

    Edges crossing the ball contribute ``c * (t - d(inner endpoint))``.
    Infinite-capacity edges carry no volume.
    """
    if t < 0:
        raise InputError(f"radius must be nonnegative, got {t}")
    a, lo, hi = _edge_sides(g, df)
    finite = a.cap != INFINITE
    inside = finite & (hi <= t)
    cross = finite & (lo <= t) & (hi > t)
    return float(initial + np.sum(a.cap[inside] * a.length[inside])
                 + np.sum(a.cap[cross] * (t - lo[cross])))


def cut_capacity(g: Graph, df: DistanceField, t: float) -> float:
    """Total capacity of edges with exactly one endpoint in the ball."""
    if t < 0:
        raise InputError(f"radius must be nonnegative, got {t}")
    a, lo, hi = _edge_sides(g, df)
    cross = (lo <= t) & (hi > t)
    if not cross.any():
        return 0.0
    return float(np.sum(a.cap[cross]))


def boundary_edges(g: Graph, vertex_set) -> list[int]:
    """Ids of edges with exactly one endpoint in ``vertex_set``."""
    return [e.id for e in g.edges if (e.u in vertex_set) != (e.v in vertex_set)]


def induced_subgraph(g: Graph, vs: Iterable[int]) -> Graph:
    keep = frozenset(vs) & g.vertices
    edges = [e for e in g.edges if e.u in keep and e.v in keep]
    pairs = [(s, t) for s, t in g.pairs if s in keep and t in keep]
    return Graph(g.n, edges, pairs, keep, simple=g.simple, check=False)


def remove_vertices(g: Graph, vs: Iterable[int]) -> Graph:
    return induced_subgraph(g, g.vertices - frozenset(vs))


def remove_edges(g: Graph, edge_ids: Iterable[int]) -> Graph:
    drop = frozenset(edge_ids)
    edges = [e for e in g.edges if e.id not in drop]
    return Graph(g.n, edges, g.pairs, g.vertices, simple=g.simple, check=False)


def connected_components(g: Graph) -> list[frozenset]:
    """Components in ascending order of their smallest vertex."""
    seen: set[int] = set()
    comps = []
    adj = g.adjacency
    for v in sorted(g.vertices):
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        seen.add(v)
        while queue:
            x = queue.popleft()
            for eid in adj[x]:
                y = g.edge(eid).other(x)
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(frozenset(comp))
    return comps


def find_path(g: Graph, s: int, t: int) -> list[int] | None:
    """Vertex sequence of a BFS path from ``s`` to ``t``, or None."""
    if s not in g.vertices or t not in g.vertices:
        return None
    prev = {s: None}
    queue = deque([s])
    adj = g.adjacency
    while queue:
        x = queue.popleft()
        if x == t:
            break
        for eid in adj[x]:
            y = g.edge(eid).other(x)
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if t not in prev:
        return None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def component_diameter(g_full: Graph, vertices: Sequence[int] | frozenset) -> float:
    """Weak diameter: max over pairs of the set of their distance in ``g_full``."""
    vs = sorted(vertices)
    if not vs:
        raise InputError("vertex set must be nonempty")
    if len(vs) == 1:
        return 0.0
    a = g_full.arrays
    idx = np.asarray(vs, dtype=np.int64)
    worst = 0.0
    for v in vs[:-1]:
        d = kernels.dijkstra(a.indptr, a.nbr, a.sedge, a.length, a.alive,
                             np.asarray([v], dtype=np.int64), INFINITE)
        worst = max(worst, float(d[idx].max()))
    return worst

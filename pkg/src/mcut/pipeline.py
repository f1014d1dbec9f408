"""Three-phase small diameter decomposition for graphs of bounded width.

1. Cores: balls of radius ``a`` grown top-down from the uncovered part of
   each bag, inside the uncovered part of its subtree plus whatever cores
   hang below it as attachments.
2. Components: cores are processed top-down; each grows a ball of radius
   below ``b - a`` in what is left of the graph, chosen by region growing
   with initial volume ``Vol'(b - a) / h``.
3. Each component lies within ``b`` of its core's center (at most ``r``
   vertices), so balls grown from the center vertices split it into pieces
   of weak diameter below 1.

Everything runs on the transformed graph of a :class:`WidthDecomposition`;
:func:`run_pipeline` maps the result back to the original edges.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from mcut import kernels
from mcut.decomposition import LINK, TreeDecomposition, WidthDecomposition, tree_to_width
from mcut.errors import InputError, InternalError
from mcut.fractional import DEFAULT_EPSILON, FlowPaths, FractionalSolution, solve_fractional
from mcut.graph import INFINITE, CutSet, Graph
from mcut.region import RadiusChoice, _radius

COVER_SLACK = 1e-9


@dataclass(frozen=True)
class PipelineConfig:
    a: float = 0.125
    b: float = 0.25
    h: float | None = None  # None: 2r^3 + 2r from the width

    def __post_init__(self):
        if not self.a > 0.0:
            raise InputError(f"a must be positive, got {self.a}")
        if self.b != 2.0 * self.a:
            raise InputError(f"b must equal 2a, got a={self.a}, b={self.b}")
        if self.h is not None and not self.h > 0.0:
            raise InputError(f"h must be positive, got {self.h}")

    def resolved_h(self, r: int) -> float:
        return float(2 * r**3 + 2 * r) if self.h is None else float(self.h)


@dataclass(frozen=True)
class Core:
    id: int
    vertices: frozenset
    center: frozenset
    center_bag: int
    rank: int


@dataclass(frozen=True)
class Component:
    id: int
    vertices: frozenset
    core_id: int
    center: frozenset


@dataclass(frozen=True)
class CoreStep:
    """What happened when one core was processed in phase 2."""

    core_id: int
    component_id: int | None  # None: core already absorbed, skipped
    isolated: bool = False
    initial: float = 0.0
    inner_volume: float = 0.0  # Vol' at radius b - a
    choice: RadiusChoice | None = None
    certificate: float = 0.0  # ln(1 + h) / (b - a) * Vol(t)
    shadow: tuple = ()  # edge ids touching the radius-(b - a) ball


@dataclass(frozen=True)
class PipelineResult:
    X2: CutSet
    X3: CutSet
    components: tuple
    cores: tuple
    phase_costs: dict
    diagnostics: dict
    steps: tuple = ()
    iterations: int = 0


@dataclass(frozen=True)
class PipelineRun:
    result: PipelineResult
    cut: CutSet  # on the original graph
    wd: WidthDecomposition
    fstar: float
    fs: FractionalSolution | None = None
    flow: FlowPaths | None = None
    bounds: dict = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.wd.width


def cost_bounds(r: int, fstar: float) -> dict:
    lg = math.log(r + 1)
    return {"b136": 136.0 * lg * fstar, "b128": 128.0 * lg * fstar, "b8": 8.0 * lg * fstar}


# ------------------------------------------------------------------ helpers


def _dist(arr, alive, sources, limit=INFINITE):
    return kernels.dijkstra(arr.indptr, arr.nbr, arr.sedge, arr.length, alive,
                            np.asarray(sorted(sources), dtype=np.int64), limit)


def _crossing(arr, alive, inside):
    """Ids of edges between ``inside`` and the rest of the alive vertices."""
    eu, ev = arr.eu, arr.ev
    mask = (alive[eu] != 0) & (alive[ev] != 0) & (inside[eu] != inside[ev])
    return arr.eid[mask].tolist()


def _inner_volume(arr, alive, dist, t):
    """Vol' of the closed ball of radius ``t`` among alive vertices."""
    eu, ev = arr.eu, arr.ev
    both = (alive[eu] != 0) & (alive[ev] != 0) & (arr.cap != INFINITE)
    du, dv = dist[eu], dist[ev]
    lo, hi = np.minimum(du, dv), np.maximum(du, dv)
    inside = both & (hi <= t)
    cross = both & (lo <= t) & (hi > t)
    return math.fsum((arr.cap[inside] * arr.length[inside]).tolist()
                     + (arr.cap[cross] * (t - lo[cross])).tolist())


def _grow_from_centers(arr, alive, centers, dists, mass, r):
    """Balls of radius in [1/4, 1/2) from each center; returns cut edge ids.

    ``dists[y]`` holds distances from ``y`` in the graph the cover refers to,
    so every center sees every remaining vertex at its true distance even if
    earlier balls broke its shortest paths.
    """
    alive = alive.copy()
    init = mass / r
    cut: list[int] = []
    choices = []
    for y in centers:
        if not alive.any():
            break
        dist = dists[y]
        rc = _radius(arr, dist, alive, 0.25, 0.5, init, f"center {y}")
        inside = (dist <= rc.t) & (alive != 0)
        cut.extend(_crossing(arr, alive, inside))
        alive[inside] = 0
        choices.append((y, rc))
    if alive.any():
        left = np.nonzero(alive)[0].tolist()
        raise InternalError(f"vertices {left[:10]} escaped every center ball")
    return cut, choices


# ----------------------------------------------------- cover decomposition


def sdd_with_cover(g: Graph, cover, r: int | None = None) -> CutSet:
    """Small diameter decomposition when every vertex is within 1/4 of ``cover``.

    Cost is at most ``8 ln(r + 1) F`` with ``F = sum c*l`` and ``r`` at least
    the cover size.
    """
    cover = sorted(set(int(v) for v in cover))
    for v in cover:
        if v not in g.vertices:
            raise InputError(f"cover vertex {v} is not in the graph")
    if not g.vertices:
        return CutSet(frozenset(), 0.0)
    if not cover:
        raise InputError("cover must be nonempty for a nonempty graph")
    r = len(cover) if r is None else int(r)
    if r < len(cover):
        raise InputError(f"cover has {len(cover)} vertices, more than r={r}")
    arr = g.arrays
    dists = {y: _dist(arr, arr.alive, [y]) for y in cover}
    near = np.minimum.reduce([dists[y] for y in cover])
    for v in sorted(g.vertices):
        if near[v] > 0.25 + COVER_SLACK:
            raise InputError(f"vertex {v} is at distance {near[v]} > 1/4 from the cover")
    cut, _ = _grow_from_centers(arr, arr.alive, cover, dists, g.total_mass(), r)
    return CutSet.of(g, cut)


# ------------------------------------------------------------------ phase 1


def phase1_grow_cores(wd: WidthDecomposition, cfg: PipelineConfig):
    """Returns ``(cores, attachments, iterations)``."""
    g = wd.graph
    arr = g.arrays
    n = g.n
    covered = arr.alive == 0  # slot 0 and absent ids count as covered
    bags = {b: sorted(vs) for b, vs in wd.bags.items()}
    attach: dict[int, set] = {b: set() for b in bags}
    key = lambda b: (wd.level[b], b)  # noqa: E731
    cores: list[Core] = []
    iterations = 0
    while not covered.all():
        iterations += 1
        open_bags = {b for b, vs in bags.items() if not covered[vs].all()}
        roots = sorted((b for b in open_bags if wd.parent[b] not in open_bags), key=key)
        for root in roots:
            members = []
            stack = [root]
            while stack:
                x = stack.pop()
                members.append(x)
                stack.extend(c for c in wd.children[x] if c in open_bags)
            tree = set(members)
            unvisited = set(members)
            while unvisited:
                B = min(unvisited, key=key)
                sub = []
                stack = [B]
                while stack:
                    x = stack.pop()
                    sub.append(x)
                    stack.extend(c for c in wd.children[x] if c in tree)
                center = [v for v in bags[B] if not covered[v]]
                if not center:
                    raise InternalError(f"unvisited bag {B} has no uncovered vertex")
                grow = np.zeros(n + 1, dtype=np.uint8)
                for x in sub:
                    for v in bags[x]:
                        if not covered[v]:
                            grow[v] = 1
                    for v in attach[x]:
                        grow[v] = 1
                dist = _dist(arr, grow, center, cfg.a)
                R = np.nonzero(dist <= cfg.a)[0]
                core = Core(len(cores), frozenset(R.tolist()), frozenset(center), B,
                            iterations)
                cores.append(core)
                covered[R] = True
                unvisited -= {wd.bag_of[v] for v in core.vertices}
                unvisited.discard(B)
                if B != root:
                    attach[wd.parent[B]].update(core.vertices)
    return cores, attach, iterations


def cores_per_bag(wd: WidthDecomposition, cores) -> dict:
    counts = Counter()
    for core in cores:
        for b in {wd.bag_of[v] for v in core.vertices}:
            counts[b] += 1
    return {b: counts.get(b, 0) for b in wd.bags}


# ------------------------------------------------------------------ phase 2


def phase2_grow_components(wd: WidthDecomposition, cores, cfg: PipelineConfig):
    """Returns ``(components, X2, steps)``; cores are processed by center-bag level."""
    g = wd.graph
    arr = g.arrays
    r = wd.width
    h = cfg.resolved_h(r)
    span = cfg.b - cfg.a
    log_h = math.log1p(h)
    alive = arr.alive.copy()
    owner = np.full(g.n + 1, -1, dtype=np.int64)
    indptr, nbr = arr.indptr, arr.nbr
    components: list[Component] = []
    steps: list[CoreStep] = []
    for core in sorted(cores, key=lambda c: (wd.level[c.center_bag], c.center_bag, c.id)):
        rest = sorted(v for v in core.vertices if alive[v])
        if not rest:
            steps.append(CoreStep(core.id, None))
            continue
        in_rest = np.zeros(g.n + 1, dtype=bool)
        in_rest[rest] = True
        isolated = True
        for v in rest:
            for slot in range(indptr[v], indptr[v + 1]):
                w = nbr[slot]
                if alive[w] and not in_rest[w]:
                    isolated = False
                    break
            if not isolated:
                break
        cid = len(components)
        if isolated:
            inside = in_rest
            shadow = _crossing_or_inside(arr, alive, inside)
            step = CoreStep(core.id, cid, True, shadow=tuple(shadow))
        else:
            dist = _dist(arr, alive, rest)
            inner = _inner_volume(arr, alive, dist, span)
            init = inner / h
            if init == 0.0:
                # nothing of positive mass within reach: radius 0 cuts nothing
                inside = (dist <= 0.0) & (alive != 0)
                crossing = _crossing(arr, alive, inside)
                cap = math.fsum(g.edge(e).capacity for e in crossing)
                if cap != 0.0:
                    raise InternalError(f"core {core.id}: zero volume but cut capacity {cap}")
                rc = RadiusChoice(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
            else:
                rc = _radius(arr, dist, alive, 0.0, span, init, f"core {core.id}")
                inside = (dist <= rc.t) & (alive != 0)
            reach = (dist <= span) & (alive != 0)
            shadow = _crossing_or_inside(arr, alive, reach)
            step = CoreStep(core.id, cid, False, init, inner, rc, log_h / span * rc.vol,
                            tuple(shadow))
        members = np.nonzero(inside)[0]
        owner[members] = cid
        alive[members] = 0
        components.append(Component(cid, frozenset(members.tolist()), core.id, core.center))
        steps.append(step)
    missing = [v for v in sorted(g.vertices) if owner[v] < 0]
    if missing:
        raise InternalError(f"vertices {missing[:10]} belong to no component")
    split = owner[arr.eu] != owner[arr.ev]
    ids = arr.eid[split].tolist()
    for e in ids:
        if wd.edge_map[e] is LINK:
            raise InternalError(f"phase 2 cut link edge {e}")
    return components, CutSet.of(g, ids), steps


def _crossing_or_inside(arr, alive, ball):
    """Alive edges with at least one endpoint in ``ball``."""
    eu, ev = arr.eu, arr.ev
    mask = (alive[eu] != 0) & (alive[ev] != 0) & (ball[eu] | ball[ev])
    return arr.eid[mask].tolist()


def shadow_diagnostics(steps) -> Counter:
    """Per edge, how many processed cores had it in their radius-(b - a) ball."""
    counts = Counter()
    for step in steps:
        counts.update(step.shadow)
    return counts


# ------------------------------------------------------------------ phase 3


def phase3_decompose(wd: WidthDecomposition, components, cfg: PipelineConfig) -> CutSet:
    """Split every component with balls around its center vertices."""
    if cfg.b > 0.25:
        raise InputError(f"phase 3 needs b <= 1/4, got {cfg.b}")
    g = wd.graph
    arr = g.arrays
    cache: dict[int, np.ndarray] = {}
    cut: list[int] = []
    for comp in components:
        centers = sorted(comp.center)
        for y in centers:
            if y not in cache:
                cache[y] = _dist(arr, arr.alive, [y])
        near = np.minimum.reduce([cache[y] for y in centers])
        members = sorted(comp.vertices)
        far = [v for v in members if near[v] > cfg.b + COVER_SLACK]
        if far:
            raise InternalError(f"component {comp.id}: vertex {far[0]} is {near[far[0]]} "
                                f"from its center, more than b={cfg.b}")
        mask = np.zeros(g.n + 1, dtype=np.uint8)
        mask[members] = 1
        inner = (mask[arr.eu] != 0) & (mask[arr.ev] != 0) & (arr.cap != INFINITE)
        mass = math.fsum((arr.cap[inner] * arr.length[inner]).tolist())
        part, _ = _grow_from_centers(arr, mask, centers, cache, mass, len(centers))
        cut.extend(part)
    for e in cut:
        if wd.edge_map[e] is LINK:
            raise InternalError(f"phase 3 cut link edge {e}")
    return CutSet.of(g, cut)


# ------------------------------------------------------------------ driver


def decompose(wd: WidthDecomposition, cfg: PipelineConfig | None = None) -> PipelineResult:
    cfg = cfg or PipelineConfig()
    cores, _, iterations = phase1_grow_cores(wd, cfg)
    components, X2, steps = phase2_grow_components(wd, cores, cfg)
    X3 = phase3_decompose(wd, components, cfg)
    per_bag = cores_per_bag(wd, cores)
    shadow = shadow_diagnostics(steps)
    diagnostics = {
        "iterations": iterations,
        "max_cores_per_bag": max(per_bag.values(), default=0),
        "max_shadow_count": max(shadow.values(), default=0),
        "initial_volume_sum": math.fsum(s.initial for s in steps),
        "cores": len(cores),
        "components": len(components),
    }
    return PipelineResult(X2, X3, tuple(components), tuple(cores),
                          {"X2": X2.cost, "X3": X3.cost}, diagnostics, tuple(steps), iterations)


def run_pipeline(g: Graph, td: TreeDecomposition, lengths="lp", epsilon: float = DEFAULT_EPSILON,
                 cfg: PipelineConfig | None = None) -> PipelineRun:
    """Decompose ``g`` and return the cut on the original edges.

    ``lengths`` is ``"lp"`` (solve the fractional relaxation first),
    ``"given"`` (use the graph's own lengths) or a mapping edge id -> length.
    With feasible fractional lengths the cut is a multicut.
    """
    fs = fp = None
    if isinstance(lengths, str):
        if lengths == "lp":
            if g.k == 0:
                work = g.with_lengths({e.id: 0.0 for e in g.edges})
                fstar = 0.0
            else:
                fs, fp = solve_fractional(g, epsilon)
                work = g.with_lengths(fs.x)
                fstar = fs.cost
        elif lengths == "given":
            work = g
            fstar = g.total_mass()
        else:
            raise InputError(f"unknown lengths source {lengths!r}; use 'lp' or 'given'")
    else:
        work = g.with_lengths(lengths)
        fstar = work.total_mass()
    wd = tree_to_width(work, td)
    result = decompose(wd, cfg)
    ids = wd.to_original(result.X2.edge_ids | result.X3.edge_ids)
    cut = CutSet.of(g, ids)
    return PipelineRun(result, cut, wd, fstar, fs, fp, cost_bounds(wd.width, fstar))

"""Independent re-checks shared by the unit and acceptance tests."""
import math

import numpy as np

from mcut.graph import Graph, cut_capacity, multi_source_distances, volume

GRID_POINTS = 10_000


def raw_coefficient(g, df, a, b, initial):
    vol_a = volume(g, df, a, initial)
    vol_b = volume(g, df, float(np.nextafter(b, -math.inf)), initial)
    return math.log(vol_b / vol_a) / (b - a)


def holds(g, df, t, coef, initial, rel=1e-9):
    vol = volume(g, df, t, initial)
    return cut_capacity(g, df, t) <= coef * vol + rel * vol


def radius_problems(g, sources, a, b, initial, choice, grid=GRID_POINTS):
    """Failures of ``choice`` against the raw volume and cut definitions."""
    out = []
    if not a <= choice.t < b:
        out.append(f"t={choice.t} outside [{a}, {b})")
        return out
    df = multi_source_distances(g, sources)
    coef = raw_coefficient(g, df, a, b, initial)
    if not math.isclose(coef, choice.bound_coefficient, rel_tol=1e-7, abs_tol=1e-12):
        out.append(f"coefficient {choice.bound_coefficient} != recomputed {coef}")
    if not holds(g, df, choice.t, coef, initial):
        out.append(f"inequality fails at t={choice.t}")
    ts = a + np.arange(grid) * ((b - a) / grid)
    ts = ts[ts < choice.t - (b - a) / grid]
    if ts.size:
        vol, cut = _grid_profile(g, df, ts, initial)
        # clear-cut feasibility only; near-ties are within grid tolerance
        early = np.nonzero(cut < coef * vol * (1 - 1e-7) - 1e-12)[0]
        if early.size:
            out.append(f"grid radius {ts[early[0]]} < {choice.t} is already feasible")
    return out


def _grid_profile(g, df, ts, initial):
    """Volume and cut at every radius in ``ts``, straight from the definitions."""
    rows = [(min(df[e.u], df[e.v]), max(df[e.u], df[e.v]), e.capacity, e.length)
            for e in g.edges if not math.isinf(e.capacity)]
    if not rows:
        return np.full(ts.shape, float(initial)), np.zeros(ts.shape)
    lo, hi, cap, ln = (np.asarray(c, dtype=np.float64) for c in zip(*rows))
    t = ts[:, None]
    inside = hi <= t
    cross = (lo <= t) & ~inside
    part = np.where(cross, t - np.where(np.isfinite(lo), lo, 0.0), 0.0)
    vol = initial + (np.where(inside, cap * ln, 0.0) + cap * part).sum(axis=1)
    cut = np.where(cross, cap, 0.0).sum(axis=1)
    return vol, cut


def random_radius_case(rng: np.random.Generator, max_n=20):
    n = int(rng.integers(2, max_n + 1))
    p = float(rng.uniform(0.1, 0.6))
    edges = []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if rng.random() < p:
                cap = float(rng.integers(0, 6)) if rng.random() < 0.8 else float(rng.uniform(0, 3))
                ln = 0.0 if rng.random() < 0.1 else float(rng.uniform(0, 0.6))
                edges.append((u, v, cap, ln))
    g = Graph(n, edges)
    size = int(rng.integers(1, min(3, n) + 1))
    sources = sorted(int(s) for s in rng.choice(np.arange(1, n + 1), size=size, replace=False))
    a = float(rng.uniform(0, 0.5))
    b = a + float(rng.uniform(0.01, 0.6))
    initial = float(10 ** rng.uniform(-4, 1))
    return g, sources, a, b, initial


def pipeline_problems(g, run, lengths=None, *, multicut=True, replay=True):
    """Every provable property of a pipeline run, as a list of failure strings.

    Each string starts with its category: ``feasibility``, ``bounds`` or
    ``structure``.

    ``lengths`` maps original edge ids to the lengths the run used (the LP
    lengths by default).
    """
    from mcut.decomposition import LINK
    from mcut.oracle import verify_multicut, verify_sdd

    out = []
    res, wd = run.result, run.wd
    tg = wd.graph
    r = wd.width
    if lengths is None:
        lengths = run.fs.x if run.fs is not None else {e.id: e.length for e in g.edges}
    if multicut and g.k:
        v = verify_multicut(g, run.cut)
        if v is not None:
            out.append(f"feasibility: multicut {v}")
    v = verify_sdd(g, run.cut, lengths)
    if v is not None:
        out.append(f"feasibility: sdd {v}")

    lg = math.log(r + 1)
    F = run.fstar
    if res.X3.cost > 8 * lg * F + 1e-6:
        out.append(f"bounds: X3 cost {res.X3.cost} > 8 ln(r+1) F* = {8 * lg * F}")
    if res.X2.cost > 128 * lg * F + 1e-6:
        out.append(f"bounds: X2 cost {res.X2.cost} > 128 ln(r+1) F* = {128 * lg * F}")
    if run.cut.cost > 136 * lg * F + 1e-6:
        out.append(f"bounds: total cost {run.cut.cost} > 136 ln(r+1) F* = {136 * lg * F}")

    for eid in res.X2.edge_ids | res.X3.edge_ids:
        if wd.edge_map[eid] is LINK or math.isinf(tg.edge(eid).capacity):
            out.append(f"structure: infinite edge {eid} was cut")
    if res.iterations > r:
        out.append(f"structure: phase 1 took {res.iterations} iterations > r = {r}")
    by_rank = {}
    for c in res.cores:
        seen = by_rank.setdefault(c.rank, set())
        if seen & c.vertices:
            out.append(f"structure: cores of rank {c.rank} overlap")
        seen |= c.vertices
        if not c.center <= c.vertices or not c.center <= wd.bags[c.center_bag]:
            out.append(f"structure: core {c.id} center is not inside its core and center bag")
    covered = set().union(*(c.vertices for c in res.cores)) if res.cores else set()
    if covered != set(tg.vertices):
        out.append("structure: cores do not cover every vertex")
    centers = [c.center_bag for c in res.cores]
    if len(centers) != len(set(centers)):
        out.append("structure: a bag is the center bag of two cores")
    per_bag = {}
    for c in res.cores:
        for b in {wd.bag_of[x] for x in c.vertices}:
            per_bag[b] = per_bag.get(b, 0) + 1
    if max(per_bag.values(), default=0) > r * r:
        out.append(f"structure: a bag meets {max(per_bag.values())} cores > r^2 = {r * r}")
    shadow = {}
    for s in res.steps:
        for e in s.shadow:
            shadow[e] = shadow.get(e, 0) + 1
    if max(shadow.values(), default=0) > 2 * r**3 + 2 * r:
        out.append(f"structure: shadow count {max(shadow.values())} > 2r^3 + 2r")

    parts = [c.vertices for c in res.components]
    if sum(len(p) for p in parts) != tg.n or set().union(*parts) != set(tg.vertices):
        out.append("structure: components do not partition the vertices")
    for comp in res.components:
        df = multi_source_distances(tg, comp.center)
        far = [x for x in comp.vertices if df[x] > 0.25 + 1e-9]
        if far:
            out.append(f"structure: component {comp.id}: vertex {far[0]} at {df[far[0]]} > b")
    vol_sum = math.fsum(s.initial for s in res.steps)
    if vol_sum > F * (1 + 1e-9) + 1e-12:
        out.append(f"structure: initial volumes sum to {vol_sum} > F* = {F}")

    if replay:
        out.extend(_replay_phase2(tg, res, r))
    return out


def _replay_phase2(tg, res, r):
    """Rebuild each phase 2 ball from raw definitions and recheck its certificate."""
    from mcut.graph import ball, induced_subgraph

    out = []
    h = 2 * r**3 + 2 * r
    span = 0.125
    coef = math.log1p(h) / span
    alive = set(tg.vertices)
    cores = {c.id: c for c in res.cores}
    comps = {c.id: c for c in res.components}
    for step in res.steps:
        rest = cores[step.core_id].vertices & alive
        if step.component_id is None:
            if rest:
                out.append(f"structure: core {step.core_id} skipped with live vertices")
            continue
        comp = comps[step.component_id]
        if step.isolated:
            if comp.vertices != rest:
                out.append(f"structure: isolated core {step.core_id} is not a component")
        else:
            gi = induced_subgraph(tg, alive)
            df = multi_source_distances(gi, rest)
            init = volume(gi, df, span, 0.0) / h
            t = step.choice.t
            if not 0 <= t < span:
                out.append(f"structure: core {step.core_id}: radius {t} outside [0, b - a)")
            if set(ball(gi, df, t)) != set(comp.vertices):
                out.append(f"structure: core {step.core_id}: component is not its ball")
            if init == 0.0:
                if cut_capacity(gi, df, t) != 0.0:
                    out.append(f"structure: core {step.core_id}: zero volume but positive cut")
            else:
                vol = volume(gi, df, t, init)
                if cut_capacity(gi, df, t) > coef * vol * (1 + 1e-9):
                    out.append(f"structure: core {step.core_id}: growth certificate fails")
                if not math.isclose(init, step.initial, rel_tol=1e-9, abs_tol=1e-15):
                    out.append(f"structure: core {step.core_id}: initial volume {step.initial} "
                                f"!= {init}")
        alive -= comp.vertices
    return out

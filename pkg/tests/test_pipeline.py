import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import td_of
from helpers import pipeline_problems
from mcut.decomposition import tree_to_width
from mcut.errors import InputError
from mcut.graph import Graph, component_diameter, connected_components, remove_edges
from mcut.io import generate_partial_ktree
from mcut.oracle import brute_force_multicut, verify_sdd
from mcut.pipeline import (Component, PipelineConfig, cost_bounds, decompose,
                           phase1_grow_cores, phase2_grow_components, phase3_decompose,
                           run_pipeline, sdd_with_cover, shadow_diagnostics)


def width_of(g, bags, tree):
    return tree_to_width(g, td_of(g, bags, tree))


# ------------------------------------------------------------------ config


def test_default_config():
    cfg = PipelineConfig()
    assert (cfg.a, cfg.b) == (0.125, 0.25)
    assert cfg.resolved_h(3) == 60.0
    assert PipelineConfig(h=5.0).resolved_h(3) == 5.0


@pytest.mark.parametrize("kw,msg", [
    ({"a": 0.0, "b": 0.0}, "positive"),
    ({"a": 0.1, "b": 0.25}, "2a"),
    ({"h": -1.0}, "h must"),
])
def test_config_validation(kw, msg):
    with pytest.raises(InputError, match=msg):
        PipelineConfig(**kw)


def test_cost_bounds_constants():
    b = cost_bounds(3, 2.0)
    lg = math.log(4)
    assert b == {"b136": 136 * lg * 2.0, "b128": 128 * lg * 2.0, "b8": 8 * lg * 2.0}


# ----------------------------------------------------- cover decomposition


def test_cover_edgeless_graph():
    g = Graph(3, [])
    assert len(sdd_with_cover(g, [1, 2, 3])) == 0


def test_cover_short_path_is_swallowed():
    g = Graph(3, [(1, 2, 1, 0.1), (2, 3, 1, 0.1)])
    cut = sdd_with_cover(g, [2])
    assert len(cut) == 0
    assert component_diameter(g, {1, 2, 3}) == pytest.approx(0.2)


def test_cover_precondition_witness():
    g = Graph(3, [(1, 2, 1, 0.1), (2, 3, 1, 0.3)])
    with pytest.raises(InputError, match="vertex 3"):
        sdd_with_cover(g, [1])


def test_cover_size_limit():
    g = Graph(3, [(1, 2, 1, 0.1), (2, 3, 1, 0.1)])
    with pytest.raises(InputError, match="more than r"):
        sdd_with_cover(g, [1, 2], r=1)


@settings(max_examples=40)
@given(st.integers(0, 2**63))
def test_cover_decomposition_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 16))
    r = int(rng.integers(1, min(n, 4) + 1))
    cover = [int(v) for v in rng.choice(np.arange(1, n + 1), size=r, replace=False)]
    # every vertex hangs within 1/4 of some cover vertex; extra edges are arbitrary
    edges = {}
    for v in range(1, n + 1):
        if v not in cover:
            y = cover[int(rng.integers(0, r))]
            edges[(min(v, y), max(v, y))] = float(rng.uniform(0, 0.25))
    for _ in range(int(rng.integers(0, 2 * n))):
        u, v = (int(x) for x in rng.integers(1, n + 1, size=2))
        if u != v:
            edges.setdefault((min(u, v), max(u, v)), float(rng.uniform(0, 1.5)))
    g = Graph(n, [(u, v, float(rng.integers(0, 5)), ln) for (u, v), ln in sorted(edges.items())])
    cut = sdd_with_cover(g, cover)
    assert verify_sdd(g, cut) is None
    assert cut.cost <= 8 * math.log(r + 1) * g.total_mass() + 1e-9


# ------------------------------------------------------------------ phase 1


def test_phase1_single_bag_one_core():
    g = Graph(3, [(1, 2, 1, 0.3), (2, 3, 1, 0.9)])
    wd = width_of(g, [{1, 2, 3}], [])
    cores, _, iterations = phase1_grow_cores(wd, PipelineConfig())
    assert len(cores) == 1 and cores[0].rank == 1 and iterations == 1
    assert cores[0].vertices == frozenset({1, 2, 3})


def test_phase1_long_path_edge_bags():
    n = 5
    g = Graph(n, [(v, v + 1, 1, 0.5) for v in range(1, n)])
    td = td_of(g, [{v, v + 1} for v in range(1, n)], [(v, v + 1) for v in range(1, n - 1)])
    wd = tree_to_width(g, td)
    cores, _, iterations = phase1_grow_cores(wd, PipelineConfig())
    assert iterations <= wd.width
    assert set().union(*(c.vertices for c in cores)) == set(wd.graph.vertices)
    # the root bag's core is centered on the whole bag and reaches only zero-length links
    root = cores[0]
    assert root.center_bag == wd.root and root.center == wd.bags[wd.root]
    assert {wd.copy_map[x] for x in root.vertices} == {1, 2}


def test_phase1_singleton_bag_path_all_rank_one():
    # a width decomposition with singleton bags, built by hand
    from mcut.decomposition import WidthDecomposition
    n = 4
    g = Graph(n, [(v, v + 1, 1, 0.5) for v in range(1, n)], [(1, n)])
    wd = WidthDecomposition(
        g, {v: frozenset({v}) for v in range(1, n + 1)},
        {v: (v - 1 if v > 1 else None) for v in range(1, n + 1)},
        {v: v - 1 for v in range(1, n + 1)},
        {v: ((v + 1,) if v < n else ()) for v in range(1, n + 1)},
        1, {v: v for v in range(1, n + 1)}, {i: i for i in range(n - 1)},
        {v: v for v in range(1, n + 1)})
    wd.validate()
    cores, _, iterations = phase1_grow_cores(wd, PipelineConfig())
    assert len(cores) == n and iterations == 1
    assert all(c.rank == 1 and len(c.vertices) == 1 for c in cores)


# ------------------------------------------------------------------ phase 2


def test_phase2_one_core_one_component():
    g = Graph(3, [(1, 2, 1, 0.05), (2, 3, 1, 0.05)], [(1, 3)])
    wd = width_of(g, [{1, 2, 3}], [])
    cores, _, _ = phase1_grow_cores(wd, PipelineConfig())
    comps, X2, steps = phase2_grow_components(wd, cores, PipelineConfig())
    assert len(comps) == 1 and len(X2) == 0
    assert max(shadow_diagnostics(steps).values(), default=0) <= 1


def test_phase2_separate_components_are_isolated():
    g = Graph(4, [(1, 2, 1, 0.05), (3, 4, 1, 0.05)])
    wd = width_of(g, [{1, 2}, {3, 4}], [(1, 2)])
    cores, _, _ = phase1_grow_cores(wd, PipelineConfig())
    comps, X2, steps = phase2_grow_components(wd, cores, PipelineConfig())
    assert len(comps) == 2 and len(X2) == 0
    assert all(s.isolated for s in steps if s.component_id is not None)


# ------------------------------------------------------------------ phase 3


def test_phase3_singletons_cut_nothing():
    g = Graph(3, [(1, 2, 1, 0.2), (2, 3, 1, 0.2)])
    wd = width_of(g, [{1, 2, 3}], [])
    comps = [Component(i, frozenset({v}), i, frozenset({v})) for i, v in enumerate((1, 2, 3))]
    assert len(phase3_decompose(wd, comps, PipelineConfig())) == 0


def test_phase3_small_component_not_split():
    g = Graph(3, [(1, 2, 1, 0.1), (2, 3, 1, 0.1)])
    wd = width_of(g, [{1, 2, 3}], [])
    comps = [Component(0, frozenset({1, 2, 3}), 0, frozenset({2}))]
    assert len(phase3_decompose(wd, comps, PipelineConfig())) == 0


# ----------------------------------------------------------------- pipeline


def test_path_pipeline(path3):
    g, td = path3
    run = run_pipeline(g, td, epsilon=0.05)
    assert 1.0 <= run.cut.cost <= run.bounds["b136"]
    assert brute_force_multicut(g).cost == 1.0
    assert pipeline_problems(g, run) == []


def test_star_pipeline(star3):
    g, td = star3
    run = run_pipeline(g, td)
    assert run.cut.cost >= 2.0
    assert pipeline_problems(g, run) == []


def test_k_zero_pipeline():
    g = Graph(3, [(1, 2, 1.0), (2, 3, 1.0)])
    run = run_pipeline(g, td_of(g, [{1, 2}, {2, 3}], [(1, 2)]))
    assert len(run.cut) == 0 and run.fs is None and run.fstar == 0.0


def test_given_lengths_short_path_not_cut():
    g = Graph(3, [(1, 2, 1.0, 0.1), (2, 3, 1.0, 0.1)], [(1, 3)])
    run = run_pipeline(g, td_of(g, [{1, 2}, {2, 3}], [(1, 2)]), lengths="given")
    assert len(run.cut) == 0
    assert pipeline_problems(g, run, multicut=False) == []


def test_unknown_lengths_source(path3):
    with pytest.raises(InputError, match="lengths source"):
        run_pipeline(*path3, lengths="random")


def test_mapping_lengths(path3):
    g, td = path3
    run = run_pipeline(g, td, lengths={0: 0.6, 1: 0.6})
    assert run.fstar == pytest.approx(1.2)
    assert pipeline_problems(g, run, {0: 0.6, 1: 0.6}) == []


@settings(max_examples=30)
@given(st.integers(3, 40), st.integers(1, 5), st.integers(1, 10), st.integers(0, 2**32))
def test_pipeline_properties_lp(n, k, pairs, seed):
    n = max(n, k + 1)
    pairs = min(pairs, n * (n - 1) // 2)
    inst = generate_partial_ktree(n, k, 0.7, pairs, (1, 5), seed=seed)
    run = run_pipeline(inst.graph, inst.td)
    assert pipeline_problems(inst.graph, run) == []


@settings(max_examples=30)
@given(st.integers(3, 40), st.integers(1, 5), st.integers(0, 2**32))
def test_pipeline_properties_given_lengths(n, k, seed):
    n = max(n, k + 1)
    inst = generate_partial_ktree(n, k, 0.7, 0, (1, 5), seed=seed, random_lengths=True)
    run = run_pipeline(inst.graph, inst.td, lengths="given")
    assert pipeline_problems(inst.graph, run, multicut=False) == []


def test_capacity_scale_invariance():
    inst = generate_partial_ktree(25, 3, 0.7, 0, (1, 5), seed=3, random_lengths=True)
    g = inst.graph
    base = run_pipeline(g, inst.td, lengths="given")
    for lam in (0.5, 4.0):
        scaled = run_pipeline(g.with_capacities(lam), inst.td, lengths="given")
        assert scaled.cut.edge_ids == base.cut.edge_ids
        assert scaled.cut.cost == pytest.approx(lam * base.cut.cost)


def test_decompose_diagnostics(star3):
    g, td = star3
    wd = tree_to_width(g.with_lengths({e.id: 0.5 for e in g.edges}), td)
    res = decompose(wd)
    assert res.diagnostics["cores"] == len(res.cores)
    assert res.diagnostics["components"] == len(res.components)
    assert res.phase_costs == {"X2": res.X2.cost, "X3": res.X3.cost}
    pieces = connected_components(remove_edges(wd.graph, res.X2.edge_ids | res.X3.edge_ids))
    assert all(component_diameter(wd.graph, p) < 1 for p in pieces)

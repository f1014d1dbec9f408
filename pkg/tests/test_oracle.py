import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcut.errors import InputError, VerificationError
from mcut.fractional import solve_fractional
from mcut.graph import INFINITE, Graph, remove_edges, find_path
from mcut.io import generate_partial_ktree
from mcut.oracle import (brute_force_multicut, gap_report, verify_multicut, verify_sdd)
from mcut.pipeline import run_pipeline


def exhaustive(g):
    """Cheapest feasible subset of finite edges by plain enumeration."""
    finite = [e for e in g.edges if not math.isinf(e.capacity)]
    best = None
    for size in range(len(finite) + 1):
        for combo in itertools.combinations(finite, size):
            rest = remove_edges(g, [e.id for e in combo])
            if all(find_path(rest, s, t) is None for s, t in g.pairs):
                cost = math.fsum(e.capacity for e in combo)
                if best is None or cost < best:
                    best = cost
    return best


def test_path_opt_is_one(path3):
    cut = brute_force_multicut(path3[0])
    assert cut.cost == 1.0 and len(cut) == 1
    assert cut.sorted_ids() == [0]  # lexicographic tie-break


def test_star_opt_is_two(star3):
    cut = brute_force_multicut(star3[0])
    assert cut.cost == 2.0
    assert verify_multicut(star3[0], cut) is None


def test_k_zero_opt_is_empty():
    cut = brute_force_multicut(Graph(2, [(1, 2, 1.0)]))
    assert cut.cost == 0.0 and len(cut) == 0


def test_too_many_edges_refused():
    g = Graph(30, [(v, v + 1, 1.0) for v in range(1, 30)], [(1, 30)])
    with pytest.raises(InputError, match="max_edges"):
        brute_force_multicut(g)


def test_uncuttable_pair_refused():
    g = Graph(2, [(1, 2, INFINITE, 0.0)], [(1, 2)])
    with pytest.raises(InputError):
        brute_force_multicut(g)


def test_infinite_edges_skipped():
    g = Graph(3, [(1, 2, INFINITE, 0.0), (2, 3, 5.0)], [(1, 3)])
    cut = brute_force_multicut(g)
    assert cut.sorted_ids() == [1]


@settings(max_examples=40)
@given(st.integers(3, 9), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32))
def test_branch_and_bound_matches_enumeration(n, k, pairs, seed):
    n = max(n, k + 1)
    pairs = min(pairs, n * (n - 1) // 2)
    g = generate_partial_ktree(n, k, 0.7, pairs, (1, 4), seed=seed).graph
    if g.m > 12:
        return
    cut = brute_force_multicut(g)
    assert verify_multicut(g, cut) is None
    assert cut.cost == exhaustive(g)
    assert float(cut.cost).is_integer()


def test_verify_multicut_witness(path3):
    g, _ = path3
    v = verify_multicut(g, [])
    assert v is not None and v.witness == [1, 2, 3]
    assert verify_multicut(g, [0, 1]) is None


def test_verify_multicut_unknown_edge(path3):
    assert verify_multicut(path3[0], [7]) is not None


def test_verify_sdd_examples():
    g = Graph(3, [(1, 2, 1.0, 1.0), (2, 3, 1.0, 1.0)])
    assert verify_sdd(g, [0, 1]) is None
    v = verify_sdd(g, [])
    assert v is not None and v.witness == (1, 2)


def test_verify_sdd_uses_outside_paths():
    # 1 and 3 are close only through 4, which sits in another component
    g = Graph(4, [(1, 2, 1.0, 0.6), (2, 3, 1.0, 0.6), (3, 4, 1.0, 0.1), (4, 1, 1.0, 0.1)])
    assert verify_sdd(g, [2, 3]) is None


def test_verify_sdd_with_override_lengths(path3):
    g, _ = path3
    assert verify_sdd(g, [], {0: 0.25, 1: 0.25}) is None
    assert verify_sdd(g, [], {0: 0.5, 1: 0.5}) is not None


def test_gap_report_path(path3):
    g, td = path3
    run = run_pipeline(g, td, epsilon=0.05)
    opt = brute_force_multicut(g).cost
    rep = gap_report(g, run.fs, run.flow, run.cut.cost, r=run.width, opt=opt,
                     phase_costs=run.result.phase_costs)
    assert rep.integral_opt == 1.0
    assert rep.ratios["opt/flow"] == pytest.approx(1.0, abs=0.15)
    assert all(v >= 0 for v in rep.headroom.values())


def test_gap_report_k_zero():
    g = Graph(2, [(1, 2, 1.0)])
    fs, fp = solve_fractional(g)
    rep = gap_report(g, fs, fp, 0.0, r=1, opt=0.0)
    assert (rep.flow_value, rep.fstar, rep.algorithm_cost) == (0.0, 0.0, 0.0)


def test_gap_report_flags_violations(path3):
    g, td = path3
    fs, fp = solve_fractional(g)
    with pytest.raises(VerificationError, match="exceeds algorithm cost"):
        gap_report(g, fs, fp, 0.5, opt=1.0)

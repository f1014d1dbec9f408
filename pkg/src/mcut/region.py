"""Deterministic region growing and the ball-growing multicut baseline.

Given a source set ``S``, the volume of the ball of radius ``t`` is::

    Vol(S, t) = Vol(S, 0) + sum of c*l over edges inside the ball
                          + sum of c*(t - d(S, u)) over edges leaving it

and the cut ``C(S, t)`` is the capacity leaving the ball. Between two
consecutive endpoint distances ``C`` is constant and ``Vol`` grows with slope
``C``, so the smallest radius in ``[a, b)`` with::

    C(S, t) <= ln(Vol(S, b-) / Vol(S, a)) / (b - a) * Vol(S, t)

is found exactly by solving one linear inequality per interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mcut import kernels
from mcut.errors import InputError, InternalError
from mcut.fractional import FractionalSolution
from mcut.graph import CutSet, Graph

__all__ = ["RadiusChoice", "choose_radius", "gvy_multicut", "gvy_bound"]


@dataclass(frozen=True)
class RadiusChoice:
    t: float
    cut: float
    vol: float
    bound_coefficient: float
    vol_a: float = 0.0
    vol_b: float = 0.0  # one-sided limit at b

    def certificate_holds(self, rel_tol: float = 1e-9) -> bool:
        return self.cut <= self.bound_coefficient * self.vol + rel_tol * self.vol


def _radius(arr, dist: np.ndarray, alive: np.ndarray, a: float, b: float,
            initial: float, what: str = "ball") -> RadiusChoice:
    t, cut, vol, coef, vol_a, vol_b = kernels.sweep_radius(
        dist, arr.eu, arr.ev, arr.cap, arr.length, alive, float(a), float(b), float(initial))
    if math.isnan(t):
        reached = int(np.count_nonzero(np.isfinite(dist) & (alive != 0)))
        raise InternalError(
            f"no radius in [{a}, {b}) satisfies the region growing inequality for {what}: "
            f"initial={initial!r} vol_a={vol_a!r} vol_b={vol_b!r} coef={coef!r} "
            f"reached={reached} dist={dist.tolist()!r}")
    return RadiusChoice(t, cut, vol, coef, vol_a, vol_b)


def choose_radius(g: Graph, sources, a: float, b: float, initial_volume: float) -> RadiusChoice:
    """Smallest radius in ``[a, b)`` satisfying the region growing inequality."""
    if not 0.0 <= a < b:
        raise InputError(f"need 0 <= a < b, got a={a}, b={b}")
    if not initial_volume > 0.0 or math.isinf(initial_volume):
        raise InputError(f"initial volume must be positive and finite, got {initial_volume}")
    src = sorted(set(int(v) for v in sources))
    if not src:
        raise InputError("sources must be nonempty")
    for v in src:
        if v not in g.vertices:
            raise InputError(f"source {v} is not a vertex")
    arr = g.arrays
    dist = kernels.dijkstra(arr.indptr, arr.nbr, arr.sedge, arr.length, arr.alive,
                            np.asarray(src, dtype=np.int64))
    return _radius(arr, dist, arr.alive, a, b, initial_volume)


def gvy_bound(k: int, fstar: float) -> float:
    return 4.0 * math.log(k + 1) * fstar


def gvy_multicut(g: Graph, fs: FractionalSolution) -> CutSet:
    """Grow a ball around each still-connected source, cut its boundary, repeat.

    Radii lie in ``[0, 1/2)`` with initial volume ``F*/k``. Pairs are handled
    in index order.
    """
    if g.k == 0:
        return CutSet(frozenset(), 0.0)
    arr = g.arrays
    lengths = np.fromiter((fs.x.get(int(i), math.nan) for i in arr.eid), dtype=np.float64,
                          count=len(arr.eid))
    if np.isnan(lengths).any() or (lengths < 0).any():
        raise InputError("fractional solution does not cover every edge with a valid length")
    view = arr._replace(length=lengths)
    alive = arr.alive.copy()
    init = fs.cost / g.k
    cut: set[int] = set()
    for i, (s, t) in enumerate(g.pairs):
        if not (alive[s] and alive[t]):
            continue
        dist = kernels.dijkstra(arr.indptr, arr.nbr, arr.sedge, lengths, alive,
                                np.asarray([s], dtype=np.int64))
        if math.isinf(dist[t]):
            continue
        if dist[t] < 1.0 - 1e-9:
            raise InputError(f"pair {i} ({s}, {t}) is at distance {dist[t]} < 1; "
                             "lengths are not a feasible fractional multicut")
        rc = _radius(view, dist, alive, 0.0, 0.5, init, f"pair {i}")
        inside = (dist <= rc.t) & (alive != 0)
        if inside[t]:
            raise InternalError(f"ball around pair {i} swallowed its own sink")
        for p, (s2, t2) in enumerate(g.pairs):
            if inside[s2] and inside[t2] and alive[s2]:
                raise InternalError(f"ball around pair {i} contains both ends of pair {p}")
        crossing = (alive[arr.eu] != 0) & (alive[arr.ev] != 0) & (inside[arr.eu] != inside[arr.ev])
        cut.update(arr.eid[crossing].tolist())
        alive[inside] = 0
    return CutSet.of(g, cut)

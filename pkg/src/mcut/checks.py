"""Independent recomputation helpers for the verifiers.

Kept free of the numpy kernels on purpose: verifiers must not share code
paths with what they verify.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any

from mcut.graph import Graph


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    witness: Any = field(default=None)

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def plain_dijkstra(g: Graph, source: int, lengths: dict | None = None) -> dict[int, float]:
    """Distances from ``source`` using ``lengths`` (by edge id) or the edge lengths."""
    dist = {source: 0.0}
    heap = [(0.0, source)]
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for eid in g.adjacency[v]:
            e = g.edge(eid)
            w = e.other(v)
            nd = d + (lengths[eid] if lengths is not None else e.length)
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist

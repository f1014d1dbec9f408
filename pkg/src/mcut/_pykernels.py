"""Pure-Python kernels.

Reference twin of ``_kernels.pyx``. Both backends perform the same floating
point operations in the same order, so their outputs are bit-identical; the
test suite and ``benchmarks/bench_kernels.py`` check this.

Array conventions shared by both backends: vertices are ids ``1..n`` and
per-vertex arrays have length ``n + 1`` (slot 0 unused). Adjacency is CSR:
the neighbours of ``v`` live in slots ``indptr[v]:indptr[v + 1]`` with
``nbr[slot]`` the neighbour and ``sedge[slot]`` the edge index.
"""
from __future__ import annotations

import heapq
import math

import numpy as np

INF = math.inf


def dijkstra(indptr, nbr, sedge, elen, alive, sources, limit=INF):
    """Multi-source shortest path distances restricted to ``alive`` vertices.

    Vertices farther than ``limit`` (and unreachable ones) get ``inf``.
    """
    n = len(alive) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    sedge = sedge.tolist()
    elen = elen.tolist()
    alive = alive.tolist()
    dist = [INF] * (n + 1)
    done = [False] * (n + 1)
    heap = []
    for s in sources.tolist():
        if alive[s] and dist[s] > 0.0:
            dist[s] = 0.0
            heap.append((0.0, s))
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        if d > limit:
            break
        done[v] = True
        for slot in range(indptr[v], indptr[v + 1]):
            w = nbr[slot]
            if not alive[w] or done[w]:
                continue
            nd = d + elen[sedge[slot]]
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    out = np.full(n + 1, INF)
    for v in range(1, n + 1):
        if done[v]:
            out[v] = dist[v]
    return out


def sweep_radius(dist, eu, ev, cap, elen, alive, a, b, init):
    """Smallest radius ``t`` in ``[a, b)`` with ``C(t) <= coef * Vol(t)``.

    ``coef = ln(Vol(b-) / Vol(a)) / (b - a)``. Returns
    ``(t, cut, vol, coef, vol_a, vol_b)``; ``t`` is nan when no radius
    qualifies (only possible through rounding).
    """
    dist = dist.tolist()
    alive = alive.tolist()
    eu = eu.tolist()
    ev = ev.tolist()
    cap = cap.tolist()
    elen = elen.tolist()

    rel = []
    for e in range(len(eu)):
        u = eu[e]
        v = ev[e]
        c = cap[e]
        if not alive[u] or not alive[v] or c == INF:
            continue
        du = dist[u]
        dv = dist[v]
        lo = du if du < dv else dv
        hi = dv if du < dv else du
        if lo < b:
            rel.append((lo, hi, c, elen[e]))

    points = {a}
    for lo, hi, _, _ in rel:
        if a < lo < b:
            points.add(lo)
        if a < hi < b:
            points.add(hi)
    points = sorted(points)

    cuts = []
    vols = []
    for p in points:
        csum = 0.0
        vsum = 0.0
        for lo, hi, c, ln in rel:
            if hi <= p:
                vsum += c * ln
            elif lo <= p:
                vsum += c * (p - lo)
                csum += c
        cuts.append(csum)
        vols.append(init + vsum)

    last = len(points) - 1
    vol_a = vols[0]
    vol_b = vols[last] + cuts[last] * (b - points[last])
    if vol_b == 0.0:
        coef = 0.0
    elif vol_a == 0.0:
        coef = INF
    else:
        coef = math.log(vol_b / vol_a) / (b - a)

    for j in range(len(points)):
        p = points[j]
        end = points[j + 1] if j < last else b
        cj = cuts[j]
        vj = vols[j]
        if cj == 0.0:
            return p, cj, vj, coef, vol_a, vol_b
        if coef == INF:
            if vj > 0.0:
                return p, cj, vj, coef, vol_a, vol_b
            t = math.nextafter(p, INF)
            if t < end:
                return t, cj, vj + cj * (t - p), coef, vol_a, vol_b
            continue
        if cj <= coef * vj:
            return p, cj, vj, coef, vol_a, vol_b
        if coef > 0.0:
            t = p + (cj - coef * vj) / (coef * cj)
            for _ in range(64):
                if t >= end or cj <= coef * (vj + cj * (t - p)):
                    break
                t = math.nextafter(t, INF)
            if t < end and cj <= coef * (vj + cj * (t - p)):
                return t, cj, vj + cj * (t - p), coef, vol_a, vol_b
    return math.nan, 0.0, 0.0, coef, vol_a, vol_b


def _shortest_pair_path(indptr, nbr, sedge, elen, eu, ev, n, s, t):
    dist = [INF] * (n + 1)
    done = [False] * (n + 1)
    pred = [-1] * (n + 1)
    dist[s] = 0.0
    heap = [(0.0, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        if v == t:
            break
        for slot in range(indptr[v], indptr[v + 1]):
            w = nbr[slot]
            if done[w]:
                continue
            e = sedge[slot]
            nd = d + elen[e]
            if nd < dist[w]:
                dist[w] = nd
                pred[w] = e
                heapq.heappush(heap, (nd, w))
    if not done[t]:
        return INF, []
    path = []
    v = t
    while v != s:
        e = pred[v]
        path.append(e)
        v = eu[e] if ev[e] == v else ev[e]
    path.reverse()
    return dist[t], path


def gk_multiflow(indptr, nbr, sedge, eu, ev, cap, pair_s, pair_t, eps):
    """Multiplicative-weights maximum multicommodity flow.

    Lengths start at ``delta / c(e)``; each augmentation routes the path
    bottleneck and multiplies traversed lengths by ``1 + eps * u / c(e)``.
    Phases follow the usual threshold scheme: in each phase every pair is
    routed until its distance reaches ``(1 + eps) * alpha``. The run stops
    when every pair distance is at least 1, or earlier once the best dual
    ratio ``D(l) / alpha`` is within ``1 / (1 - 3 eps)`` of the
    congestion-scaled primal value (capped at 4 for large ``eps``).

    Returns ``(best_len, flow, aug_pair, aug_amount, aug_ptr, aug_edges,
    phases, status)``. ``status`` is 0 on normal termination, 1 on early
    stop, -1 if some pair is joined by infinite-capacity edges only.
    """
    n = len(indptr) - 2
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    sedge = sedge.tolist()
    eu = eu.tolist()
    ev = ev.tolist()
    cap = cap.tolist()
    pair_s = pair_s.tolist()
    pair_t = pair_t.tolist()
    m = len(cap)
    k = len(pair_s)

    finite = 0
    for e in range(m):
        if 0.0 < cap[e] < INF:
            finite += 1
    if finite < 1:
        finite = 1
    delta = (1.0 + eps) * ((1.0 + eps) * finite) ** (-1.0 / eps)
    gap = 1.0 / (1.0 - 3.0 * eps) if eps < 0.25 else 4.0

    length = [0.0] * m
    for e in range(m):
        c = cap[e]
        if c == INF:
            length[e] = 0.0
        elif c > 0.0:
            length[e] = delta / c
        else:
            length[e] = 1.0
    flow = [0.0] * m
    aug_pair = []
    aug_amount = []
    aug_ptr = [0]
    aug_edges = []

    # last[j] is a lower bound on pair j's current distance (lengths only grow)
    last = [INF] * k
    alpha = INF
    for j in range(k):
        d, _ = _shortest_pair_path(indptr, nbr, sedge, length, eu, ev, n, pair_s[j], pair_t[j])
        last[j] = d
        if d < alpha:
            alpha = d
    if k == 0:
        return (np.zeros(m), np.zeros(m), aug_pair, aug_amount, aug_ptr, aug_edges, 0, 0)
    if alpha == 0.0:
        return (np.asarray(length), np.zeros(m), aug_pair, aug_amount, aug_ptr, aug_edges, 0, -1)

    best_ratio = INF
    best = list(length)
    total = 0.0
    cong = 0.0
    phases = 0
    status = 0
    while True:
        dsum = 0.0
        for e in range(m):
            c = cap[e]
            if 0.0 < c < INF:
                dsum += c * length[e]
        ratio = dsum / alpha
        if ratio < best_ratio:
            best_ratio = ratio
            best = list(length)
        if alpha >= 1.0:
            break
        if cong > 0.0 and best_ratio <= gap * (total / cong):
            status = 1
            break
        phases += 1
        threshold = (1.0 + eps) * alpha
        if threshold > 1.0:
            threshold = 1.0
        low = INF
        for j in range(k):
            if last[j] >= threshold:
                if last[j] < low:
                    low = last[j]
                continue
            s = pair_s[j]
            t = pair_t[j]
            d, path = _shortest_pair_path(indptr, nbr, sedge, length, eu, ev, n, s, t)
            while d < threshold:
                u = INF
                for e in path:
                    if cap[e] < u:
                        u = cap[e]
                if u == INF:
                    return (np.asarray(length), np.asarray(flow), aug_pair, aug_amount,
                            aug_ptr, aug_edges, phases, -1)
                for e in path:
                    flow[e] += u
                    c = cap[e]
                    if c < INF:
                        length[e] = length[e] * (1.0 + eps * u / c)
                        load = flow[e] / c
                        if load > cong:
                            cong = load
                total += u
                aug_pair.append(j)
                aug_amount.append(u)
                aug_edges.extend(path)
                aug_ptr.append(len(aug_edges))
                d, path = _shortest_pair_path(indptr, nbr, sedge, length, eu, ev, n, s, t)
            last[j] = d
            if d < low:
                low = d
        alpha = low
    return (np.asarray(best), np.asarray(flow), aug_pair, aug_amount, aug_ptr, aug_edges,
            phases, status)

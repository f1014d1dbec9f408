# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_pykernels.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, log, pow, nextafter, isnan
from libc.stdlib cimport malloc, free, realloc

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


cdef struct Heap:
    double *key
    i64 *val
    Py_ssize_t size
    Py_ssize_t cap


cdef inline bint _less(double k1, i64 v1, double k2, i64 v2) noexcept nogil:
    return k1 < k2 or (k1 == k2 and v1 < v2)


cdef int _heap_init(Heap *h, Py_ssize_t cap) noexcept nogil:
    if cap < 16:
        cap = 16
    h.key = <double *> malloc(cap * sizeof(double))
    h.val = <i64 *> malloc(cap * sizeof(i64))
    h.size = 0
    h.cap = cap
    if h.key == NULL or h.val == NULL:
        return -1
    return 0


cdef void _heap_free(Heap *h) noexcept nogil:
    free(h.key)
    free(h.val)


cdef int _heap_push(Heap *h, double k, i64 v) noexcept nogil:
    cdef Py_ssize_t i, parent
    cdef double *nk
    cdef i64 *nv
    if h.size == h.cap:
        nk = <double *> realloc(h.key, 2 * h.cap * sizeof(double))
        if nk == NULL:
            return -1
        h.key = nk
        nv = <i64 *> realloc(h.val, 2 * h.cap * sizeof(i64))
        if nv == NULL:
            return -1
        h.val = nv
        h.cap *= 2
    i = h.size
    h.size += 1
    while i > 0:
        parent = (i - 1) >> 1
        if _less(k, v, h.key[parent], h.val[parent]):
            h.key[i] = h.key[parent]
            h.val[i] = h.val[parent]
            i = parent
        else:
            break
    h.key[i] = k
    h.val[i] = v
    return 0


cdef void _heap_pop(Heap *h, double *k, i64 *v) noexcept nogil:
    cdef Py_ssize_t i, child, n
    cdef double lk
    cdef i64 lv
    k[0] = h.key[0]
    v[0] = h.val[0]
    h.size -= 1
    n = h.size
    if n == 0:
        return
    lk = h.key[n]
    lv = h.val[n]
    i = 0
    while True:
        child = 2 * i + 1
        if child >= n:
            break
        if child + 1 < n and _less(h.key[child + 1], h.val[child + 1], h.key[child], h.val[child]):
            child += 1
        if _less(h.key[child], h.val[child], lk, lv):
            h.key[i] = h.key[child]
            h.val[i] = h.val[child]
            i = child
        else:
            break
    h.key[i] = lk
    h.val[i] = lv


def dijkstra(const i64[::1] indptr, const i64[::1] nbr, const i64[::1] sedge,
             const double[::1] elen, const u8[::1] alive, const i64[::1] sources,
             double limit=INFINITY):
    cdef Py_ssize_t n = alive.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out = np.full(n + 1, np.inf)
    cdef double[::1] dist = np.full(n + 1, np.inf)
    cdef u8[::1] done = np.zeros(n + 1, dtype=np.uint8)
    cdef Heap h
    cdef Py_ssize_t i, slot
    cdef i64 s, v, w
    cdef double d, nd
    if _heap_init(&h, indptr[n + 1] + n + 1) != 0:
        _heap_free(&h)
        raise MemoryError()
    with nogil:
        for i in range(sources.shape[0]):
            s = sources[i]
            if alive[s] and dist[s] > 0.0:
                dist[s] = 0.0
                _heap_push(&h, 0.0, s)
        while h.size > 0:
            _heap_pop(&h, &d, &v)
            if done[v] or d > dist[v]:
                continue
            if d > limit:
                break
            done[v] = 1
            for slot in range(indptr[v], indptr[v + 1]):
                w = nbr[slot]
                if not alive[w] or done[w]:
                    continue
                nd = d + elen[sedge[slot]]
                if nd < dist[w]:
                    dist[w] = nd
                    if _heap_push(&h, nd, w) != 0:
                        break
    _heap_free(&h)
    for i in range(1, n + 1):
        if done[i]:
            out[i] = dist[i]
    return out


def sweep_radius(const double[::1] dist, const i64[::1] eu, const i64[::1] ev,
                 const double[::1] cap, const double[::1] elen, const u8[::1] alive,
                 double a, double b, double init):
    cdef Py_ssize_t m = eu.shape[0]
    cdef Py_ssize_t e, j, nrel = 0, npts, q, it
    cdef double du, dv, lo, hi, c, p, end, cj, vj, t, csum, vsum
    cdef double vol_a, vol_b, coef
    cdef double[::1] rlo = np.empty(m, dtype=np.float64)
    cdef double[::1] rhi = np.empty(m, dtype=np.float64)
    cdef double[::1] rc = np.empty(m, dtype=np.float64)
    cdef double[::1] rl = np.empty(m, dtype=np.float64)
    for e in range(m):
        c = cap[e]
        if not alive[eu[e]] or not alive[ev[e]] or c == INFINITY:
            continue
        du = dist[eu[e]]
        dv = dist[ev[e]]
        if du < dv:
            lo = du
            hi = dv
        else:
            lo = dv
            hi = du
        if lo < b:
            rlo[nrel] = lo
            rhi[nrel] = hi
            rc[nrel] = c
            rl[nrel] = elen[e]
            nrel += 1

    cand = [a]
    for e in range(nrel):
        if a < rlo[e] < b:
            cand.append(rlo[e])
        if a < rhi[e] < b:
            cand.append(rhi[e])
    cdef double[::1] pts = np.unique(np.asarray(cand, dtype=np.float64))
    npts = pts.shape[0]
    cdef double[::1] cuts = np.empty(npts, dtype=np.float64)
    cdef double[::1] vols = np.empty(npts, dtype=np.float64)
    for q in range(npts):
        p = pts[q]
        csum = 0.0
        vsum = 0.0
        for e in range(nrel):
            if rhi[e] <= p:
                vsum += rc[e] * rl[e]
            elif rlo[e] <= p:
                vsum += rc[e] * (p - rlo[e])
                csum += rc[e]
        cuts[q] = csum
        vols[q] = init + vsum

    vol_a = vols[0]
    vol_b = vols[npts - 1] + cuts[npts - 1] * (b - pts[npts - 1])
    if vol_b == 0.0:
        coef = 0.0
    elif vol_a == 0.0:
        coef = INFINITY
    else:
        coef = log(vol_b / vol_a) / (b - a)

    for j in range(npts):
        p = pts[j]
        end = pts[j + 1] if j < npts - 1 else b
        cj = cuts[j]
        vj = vols[j]
        if cj == 0.0:
            return p, cj, vj, coef, vol_a, vol_b
        if coef == INFINITY:
            if vj > 0.0:
                return p, cj, vj, coef, vol_a, vol_b
            t = nextafter(p, INFINITY)
            if t < end:
                return t, cj, vj + cj * (t - p), coef, vol_a, vol_b
            continue
        if cj <= coef * vj:
            return p, cj, vj, coef, vol_a, vol_b
        if coef > 0.0:
            t = p + (cj - coef * vj) / (coef * cj)
            for it in range(64):
                if t >= end or cj <= coef * (vj + cj * (t - p)):
                    break
                t = nextafter(t, INFINITY)
            if t < end and cj <= coef * (vj + cj * (t - p)):
                return t, cj, vj + cj * (t - p), coef, vol_a, vol_b
    return float("nan"), 0.0, 0.0, coef, vol_a, vol_b


cdef double _shortest_pair_path(const i64 *indptr, const i64 *nbr, const i64 *sedge,
                                const double *elen, const i64 *eu, const i64 *ev,
                                Py_ssize_t n, i64 s, i64 t, double *dist, u8 *done,
                                i64 *pred, Heap *h, i64 *path,
                                Py_ssize_t *plen) noexcept nogil:
    cdef Py_ssize_t i, slot, cnt
    cdef i64 v, w, e
    cdef double d, nd
    for i in range(n + 1):
        dist[i] = INFINITY
        done[i] = 0
        pred[i] = -1
    h.size = 0
    dist[s] = 0.0
    _heap_push(h, 0.0, s)
    while h.size > 0:
        _heap_pop(h, &d, &v)
        if done[v] or d > dist[v]:
            continue
        done[v] = 1
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
                _heap_push(h, nd, w)
    plen[0] = 0
    if not done[t]:
        return INFINITY
    cnt = 0
    v = t
    while v != s:
        e = pred[v]
        path[cnt] = e
        cnt += 1
        if ev[e] == v:
            v = eu[e]
        else:
            v = ev[e]
    # reverse into s -> t order
    for i in range(cnt // 2):
        e = path[i]
        path[i] = path[cnt - 1 - i]
        path[cnt - 1 - i] = e
    plen[0] = cnt
    return dist[t]


def gk_multiflow(const i64[::1] indptr, const i64[::1] nbr, const i64[::1] sedge,
                 const i64[::1] eu, const i64[::1] ev, const double[::1] cap,
                 const i64[::1] pair_s, const i64[::1] pair_t, double eps):
    cdef Py_ssize_t n = indptr.shape[0] - 2
    cdef Py_ssize_t m = cap.shape[0]
    cdef Py_ssize_t k = pair_s.shape[0]
    cdef Py_ssize_t e, j, i, plen = 0, finite = 0
    cdef double c, d, u, alpha, dsum, ratio, best_ratio, total = 0.0, cong = 0.0
    cdef double threshold, low, load, delta, gap
    cdef int phases = 0, status = 0
    cdef i64 s, t
    cdef double[::1] length = np.zeros(m, dtype=np.float64)
    cdef double[::1] best
    cdef double[::1] flow = np.zeros(m, dtype=np.float64)
    cdef double[::1] dist = np.empty(n + 1, dtype=np.float64)
    cdef u8[::1] done = np.empty(n + 1, dtype=np.uint8)
    cdef i64[::1] pred = np.empty(n + 1, dtype=np.int64)
    cdef i64[::1] path = np.empty(n + 1, dtype=np.int64)
    cdef double[::1] last = np.full(max(k, 1), INFINITY)
    cdef Heap h
    cdef const i64 *pi = &indptr[0]
    cdef const i64 *pn = &nbr[0] if nbr.shape[0] else NULL
    cdef const i64 *ps = &sedge[0] if sedge.shape[0] else NULL
    cdef const i64 *peu = &eu[0] if m else NULL
    cdef const i64 *pev = &ev[0] if m else NULL
    cdef double *pl = &length[0] if m else NULL
    cdef double *pdist = &dist[0]
    cdef u8 *pdone = &done[0]
    cdef i64 *ppred = &pred[0]
    cdef i64 *ppath = &path[0]
    aug_pair = []
    aug_amount = []
    aug_ptr = [0]
    aug_edges = []

    for e in range(m):
        if 0.0 < cap[e] < INFINITY:
            finite += 1
    if finite < 1:
        finite = 1
    delta = (1.0 + eps) * pow((1.0 + eps) * finite, -1.0 / eps)
    gap = 1.0 / (1.0 - 3.0 * eps) if eps < 0.25 else 4.0
    for e in range(m):
        c = cap[e]
        if c == INFINITY:
            length[e] = 0.0
        elif c > 0.0:
            length[e] = delta / c
        else:
            length[e] = 1.0
    if k == 0:
        return (np.zeros(m), np.zeros(m), aug_pair, aug_amount, aug_ptr, aug_edges, 0, 0)
    if _heap_init(&h, indptr[n + 1] + n + 1) != 0:
        _heap_free(&h)
        raise MemoryError()
    try:
        alpha = INFINITY
        for j in range(k):
            d = _shortest_pair_path(pi, pn, ps, pl, peu, pev, n, pair_s[j], pair_t[j],
                                    pdist, pdone, ppred, &h, ppath, &plen)
            last[j] = d
            if d < alpha:
                alpha = d
        if alpha == 0.0:
            return (np.asarray(length).copy(), np.zeros(m), aug_pair, aug_amount, aug_ptr,
                    aug_edges, 0, -1)

        best_ratio = INFINITY
        best = np.array(length, copy=True)
        while True:
            dsum = 0.0
            for e in range(m):
                c = cap[e]
                if 0.0 < c < INFINITY:
                    dsum += c * length[e]
            ratio = dsum / alpha
            if ratio < best_ratio:
                best_ratio = ratio
                best = np.array(length, copy=True)
            if alpha >= 1.0:
                break
            if cong > 0.0 and best_ratio <= gap * (total / cong):
                status = 1
                break
            phases += 1
            threshold = (1.0 + eps) * alpha
            if threshold > 1.0:
                threshold = 1.0
            low = INFINITY
            for j in range(k):
                if last[j] >= threshold:
                    if last[j] < low:
                        low = last[j]
                    continue
                s = pair_s[j]
                t = pair_t[j]
                d = _shortest_pair_path(pi, pn, ps, pl, peu, pev, n, s, t,
                                        pdist, pdone, ppred, &h, ppath, &plen)
                while d < threshold:
                    u = INFINITY
                    for i in range(plen):
                        if cap[path[i]] < u:
                            u = cap[path[i]]
                    if u == INFINITY:
                        return (np.asarray(length).copy(), np.asarray(flow).copy(), aug_pair,
                                aug_amount, aug_ptr, aug_edges, phases, -1)
                    for i in range(plen):
                        e = path[i]
                        flow[e] += u
                        c = cap[e]
                        if c < INFINITY:
                            length[e] = length[e] * (1.0 + eps * u / c)
                            load = flow[e] / c
                            if load > cong:
                                cong = load
                    total += u
                    aug_pair.append(j)
                    aug_amount.append(u)
                    for i in range(plen):
                        aug_edges.append(path[i])
                    aug_ptr.append(len(aug_edges))
                    d = _shortest_pair_path(pi, pn, ps, pl, peu, pev, n, s, t,
                                            pdist, pdone, ppred, &h, ppath, &plen)
                last[j] = d
                if d < low:
                    low = d
            alpha = low
    finally:
        _heap_free(&h)
    return (np.asarray(best).copy(), np.asarray(flow).copy(), aug_pair, aug_amount, aug_ptr,
            aug_edges, phases, status)

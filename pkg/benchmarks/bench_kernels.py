"""Compiled vs pure-Python kernels: speed and bit-for-bit agreement.

    python3 benchmarks/bench_kernels.py [--n 60] [--k 5] [--reps 5]
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from mcut import _pykernels
from mcut.io import generate_partial_ktree

try:
    from mcut import _kernels
except ImportError:  # extension not built
    _kernels = None


def _time(fn, reps):
    best = float("inf")
    out = None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b), equal_nan=True)
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float) and a != a:
        return b != b
    return a == b


def cases(n, k, seed):
    inst = generate_partial_ktree(n, k, 0.7, 10, (1, 5), seed, random_lengths=True)
    g = inst.graph
    a = g.arrays
    src = np.asarray([1], dtype=np.int64)
    dist = _pykernels.dijkstra(a.indptr, a.nbr, a.sedge, a.length, a.alive, src)
    ps = np.asarray([s for s, _ in g.pairs], dtype=np.int64)
    pt = np.asarray([t for _, t in g.pairs], dtype=np.int64)
    return {
        "dijkstra": lambda m: m.dijkstra(a.indptr, a.nbr, a.sedge, a.length, a.alive, src),
        "sweep_radius": lambda m: m.sweep_radius(dist, a.eu, a.ev, a.cap, a.length, a.alive,
                                                 0.25, 0.5, 1.0),
        "gk_multiflow": lambda m: m.gk_multiflow(a.indptr, a.nbr, a.sedge, a.eu, a.ev, a.cap,
                                                 ps, pt, 0.1),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'kernel':<14} {'seed':>4} {'python ms':>10} {'compiled ms':>12} {'speedup':>8}  equal")
    all_equal = True
    for seed in range(args.seeds):
        for name, call in cases(args.n, args.k, seed).items():
            tp, outp = _time(lambda: call(_pykernels), args.reps)
            tc, outc = _time(lambda: call(_kernels), args.reps)
            eq = _same(outp, outc)
            all_equal &= eq
            print(f"{name:<14} {seed:>4} {tp * 1e3:>10.3f} {tc * 1e3:>12.3f} "
                  f"{tp / tc:>7.1f}x  {eq}")
    return 0 if all_equal else 1


if __name__ == "__main__":
    sys.exit(main())

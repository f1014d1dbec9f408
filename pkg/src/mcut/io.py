"""Instance file formats and the seeded instance generator.

``.mcg`` graph format (1-indexed vertices, ``c`` comment lines anywhere)::

    p mcg <n> <m> <k>
    e <u> <v> <capacity> [<length>]     # exactly m lines
    t <s> <t>                           # exactly k lines

Capacities may be ``inf``. Either every edge carries a length or none does.
Edge *numbers* in files and reports are 1-based in ``e``-line order; the
library's edge ids are 0-based positions (number = id + 1).

Cut files hold one edge number per line.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from mcut.decomposition import (TreeDecomposition, format_tree_decomposition,
                                parse_tree_decomposition)
from mcut.errors import InputError
from mcut.graph import INFINITE, Edge, Graph

MASK64 = (1 << 64) - 1


class SplitMixXoshiro:
    """xoshiro256** seeded through splitmix64.

    Fixed here (rather than relying on :mod:`random`) so generated instances
    are stable across Python versions and reproducible in other languages.
    """

    def __init__(self, seed: int):
        x = seed & MASK64
        state = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & MASK64
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
            state.append(z ^ (z >> 31))
        self.s = state

    @staticmethod
    def _rotl(x: int, k: int) -> int:
        return ((x << k) | (x >> (64 - k))) & MASK64

    def next_u64(self) -> int:
        s = self.s
        result = (self._rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n


def _fmt(x: float) -> str:
    if x == INFINITE:
        return "inf"
    if float(x).is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class GraphInfo:
    has_lengths: bool
    meta: dict = field(default_factory=dict)


def parse_graph_info(text: str) -> tuple[Graph, GraphInfo]:
    header = None
    edges: list[Edge] = []
    pairs: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    has_len = None
    meta: dict[str, str] = {}

    def fail(lineno, msg):
        raise InputError(f"line {lineno}: {msg}")

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "c":
            if len(parts) >= 3 and parts[1] in ("seed", "name", "generator"):
                meta[parts[1]] = " ".join(parts[2:])
            continue
        if tag == "p":
            if header is not None:
                fail(lineno, "duplicate 'p' line")
            if len(parts) != 5 or parts[1] != "mcg":
                fail(lineno, "expected 'p mcg <n> <m> <k>'")
            try:
                header = tuple(int(x) for x in parts[2:])
            except ValueError:
                fail(lineno, "non-integer value in 'p' line")
            if header[0] < 1 or header[1] < 0 or header[2] < 0:
                fail(lineno, "counts must be n >= 1, m >= 0, k >= 0")
            continue
        if header is None:
            fail(lineno, "content before 'p mcg' line")
        n, m, k = header
        if tag == "e":
            if len(edges) >= m:
                fail(lineno, f"more than the declared {m} edge lines")
            if pairs:
                fail(lineno, "'e' line after 't' lines")
            if len(parts) not in (4, 5):
                fail(lineno, "expected 'e <u> <v> <capacity> [<length>]'")
            try:
                u, v = int(parts[1]), int(parts[2])
                cap = float(parts[3])
                ln = float(parts[4]) if len(parts) == 5 else 0.0
            except ValueError:
                fail(lineno, f"malformed number in {line!r}")
            this_len = len(parts) == 5
            if has_len is None:
                has_len = this_len
            elif has_len != this_len:
                fail(lineno, "either every edge has a length or none does")
            for w in (u, v):
                if not 1 <= w <= n:
                    fail(lineno, f"vertex {w} outside [1, {n}]")
            if u == v:
                fail(lineno, f"self-loop at vertex {u}")
            if math.isnan(cap) or cap < 0:
                fail(lineno, f"capacity must be nonnegative, got {parts[3]}")
            if not (0.0 <= ln < math.inf):
                fail(lineno, f"length must be finite and nonnegative, got {parts[4]}")
            if cap == INFINITE and ln != 0.0:
                fail(lineno, "infinite-capacity edges must have length 0")
            key = (min(u, v), max(u, v))
            if key in seen:
                fail(lineno, f"duplicate edge {key[0]}-{key[1]} (first on line {seen[key]})")
            seen[key] = lineno
            edges.append(Edge(len(edges), u, v, cap, ln))
        elif tag == "t":
            if len(edges) != m:
                fail(lineno, f"'t' line before all {m} edge lines")
            if len(pairs) >= k:
                fail(lineno, f"more than the declared {k} pair lines")
            if len(parts) != 3:
                fail(lineno, "expected 't <s> <t>'")
            try:
                s, t = int(parts[1]), int(parts[2])
            except ValueError:
                fail(lineno, f"malformed number in {line!r}")
            for w in (s, t):
                if not 1 <= w <= n:
                    fail(lineno, f"terminal {w} outside [1, {n}]")
            pairs.append((s, t))
        else:
            fail(lineno, f"unknown line type {tag!r}")
    if header is None:
        raise InputError("missing 'p mcg' line")
    n, m, k = header
    if len(edges) != m:
        raise InputError(f"header declares {m} edges, found {len(edges)}")
    if len(pairs) != k:
        raise InputError(f"header declares {k} pairs, found {len(pairs)}")
    g = Graph(n, edges, pairs)
    return g, GraphInfo(bool(has_len) if m else True, meta)


def parse_graph(text: str) -> Graph:
    return parse_graph_info(text)[0]


def format_graph(g: Graph, *, lengths: bool = True, meta: dict | None = None) -> str:
    lines = [f"c {key} {val}" for key, val in (meta or {}).items()]
    lines.append(f"p mcg {g.n} {g.m} {g.k}")
    for e in g.edges:
        row = f"e {e.u} {e.v} {_fmt(e.capacity)}"
        if lengths:
            row += f" {_fmt(e.length)}"
        lines.append(row)
    lines.extend(f"t {s} {t}" for s, t in g.pairs)
    return "\n".join(lines) + "\n"


def parse_cut(text: str, g: Graph) -> list[int]:
    """Edge numbers (1-based) from a cut file, returned as edge ids."""
    ids = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            num = int(line)
        except ValueError:
            raise InputError(f"line {lineno}: expected an edge number, got {line!r}") from None
        if not 1 <= num <= g.m:
            raise InputError(f"line {lineno}: edge number {num} outside [1, {g.m}]")
        ids.append(num - 1)
    return ids


def format_cut(edge_ids) -> str:
    return "".join(f"{i + 1}\n" for i in sorted(edge_ids))


@dataclass
class InstanceFiles:
    graph: Graph
    td: TreeDecomposition | None
    has_lengths: bool = False
    meta: dict = field(default_factory=dict)
    name: str = ""
    expected: dict | None = None


def generate_partial_ktree(n: int, k: int, edge_keep_prob: float, num_pairs: int,
                           cap_range: tuple[int, int] = (1, 1), seed: int = 0, *,
                           random_lengths: bool = False) -> InstanceFiles:
    """Random partial k-tree with its width-k tree decomposition.

    A k-tree is grown by attaching each new vertex to a random k-subset of a
    random existing bag; each k-tree edge then survives with probability
    ``edge_keep_prob``. Terminal pairs are distinct unordered vertex pairs.
    """
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    if n < k + 1:
        raise InputError(f"need n >= k + 1, got n={n}, k={k}")
    if not 0.0 <= edge_keep_prob <= 1.0:
        raise InputError(f"edge_keep_prob must lie in [0, 1], got {edge_keep_prob}")
    lo, hi = cap_range
    if lo < 0 or hi < lo:
        raise InputError(f"bad capacity range {cap_range}")
    if num_pairs < 0 or num_pairs > n * (n - 1) // 2:
        raise InputError(f"cannot draw {num_pairs} distinct pairs on {n} vertices")
    rng = SplitMixXoshiro(seed)
    bags = {1: tuple(range(1, k + 2))}
    tree_edges = []
    cand = [(u, v) for u in range(1, k + 2) for v in range(u + 1, k + 2)]
    for v in range(k + 2, n + 1):
        parent = 1 + rng.randbelow(len(bags))
        base = bags[parent]
        drop = base[rng.randbelow(k + 1)]
        keep = tuple(w for w in base if w != drop)
        bid = len(bags) + 1
        bags[bid] = tuple(sorted(keep + (v,)))
        tree_edges.append((parent, bid))
        cand.extend((w, v) for w in keep)
    kept = [uv for uv in cand if rng.random() < edge_keep_prob]
    kept.sort()
    edges = []
    for u, v in kept:
        cap = lo + rng.randbelow(hi - lo + 1)
        ln = rng.random() if random_lengths else 0.0
        edges.append((u, v, float(cap), ln))
    pairs = []
    chosen = set()
    while len(pairs) < num_pairs:
        s = 1 + rng.randbelow(n)
        t = 1 + rng.randbelow(n)
        key = (min(s, t), max(s, t))
        if s == t or key in chosen:
            continue
        chosen.add(key)
        pairs.append((s, t))
    g = Graph(n, edges, pairs)
    td = TreeDecomposition(n, {b: frozenset(vs) for b, vs in bags.items()}, tuple(tree_edges))
    meta = {"generator": f"partial-ktree n={n} k={k} p={edge_keep_prob} pairs={num_pairs} "
                         f"caps={lo}..{hi}", "seed": str(seed)}
    return InstanceFiles(g, td, random_lengths, meta)


def read_instance(graph_path, td_path=None) -> InstanceFiles:
    graph_path = Path(graph_path)
    g, info = parse_graph_info(graph_path.read_text())
    if td_path is None:
        guess = graph_path.with_suffix(".td")
        td_path = guess if guess.exists() else None
    td = parse_tree_decomposition(Path(td_path).read_text(), g) if td_path else None
    return InstanceFiles(g, td, info.has_lengths, dict(info.meta), graph_path.stem)


def write_instance(prefix, inst: InstanceFiles) -> tuple[Path, Path | None]:
    prefix = Path(prefix)
    os.makedirs(prefix.parent, exist_ok=True)
    gp = prefix.with_suffix(".mcg")
    gp.write_text(format_graph(inst.graph, lengths=inst.has_lengths, meta=inst.meta))
    tp = None
    if inst.td is not None:
        tp = prefix.with_suffix(".td")
        tp.write_text(format_tree_decomposition(inst.td))
    return gp, tp

"""Tree decompositions and the disjoint-bag width decomposition.

A tree decomposition is turned into a rooted tree of *disjoint* bags by
giving every appearance of a vertex in a bag its own copy. Copies in adjacent
bags are tied together by zero-length, infinite-capacity link edges, so the
metric is unchanged and no cut can ever separate two copies.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from mcut.errors import InputError
from mcut.graph import INFINITE, Edge, Graph


@dataclass(frozen=True)
class TreeDecomposition:
    n: int
    bags: dict  # bag id -> frozenset of vertices
    tree_edges: tuple

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def validate(self, g: Graph | None = None) -> None:
        """Raise :class:`InputError` naming the violated condition and a witness."""
        ids = set(self.bags)
        if not ids:
            raise InputError("tree decomposition has no bags")
        adj = {i: [] for i in ids}
        for i, j in self.tree_edges:
            if i not in ids or j not in ids:
                raise InputError(f"tree edge {i}-{j} references an unknown bag")
            if i == j:
                raise InputError(f"tree edge {i}-{j} is a self-loop")
            adj[i].append(j)
            adj[j].append(i)
        if len(self.tree_edges) != len(ids) - 1:
            raise InputError(
                f"not a tree: {len(ids)} bags but {len(self.tree_edges)} tree edges")
        start = min(ids)
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        if seen != ids:
            raise InputError(f"not a tree: bag {min(ids - seen)} is disconnected from bag {start}")

        for b, verts in self.bags.items():
            for v in verts:
                if not 1 <= v <= self.n:
                    raise InputError(f"bag {b} holds vertex {v} outside [1, {self.n}]")
        holders: dict[int, list[int]] = {}
        for b in sorted(self.bags):
            for v in self.bags[b]:
                holders.setdefault(v, []).append(b)
        for v in range(1, self.n + 1):
            if v not in holders:
                raise InputError(f"vertex coverage violated: vertex {v} is in no bag")
        # occurrence subtrees must be connected
        for v, hs in holders.items():
            hset = set(hs)
            seen = {hs[0]}
            queue = deque([hs[0]])
            while queue:
                x = queue.popleft()
                for y in adj[x]:
                    if y in hset and y not in seen:
                        seen.add(y)
                        queue.append(y)
            if seen != hset:
                raise InputError(
                    f"connectivity condition violated: bags holding vertex {v} "
                    f"({sorted(hset)}) are not connected in the tree")
        if g is not None:
            if g.n != self.n:
                raise InputError(f"decomposition is for {self.n} vertices, graph has {g.n}")
            for e in g.edges:
                if not set(holders.get(e.u, ())) & set(holders.get(e.v, ())):
                    raise InputError(
                        f"edge coverage violated: edge {e.id} ({e.u}-{e.v}) is in no bag")


def parse_tree_decomposition(text: str, g: Graph | None = None) -> TreeDecomposition:
    """Parse PACE-2017 ``.td`` text; validates, against ``g`` when given."""
    header = None
    bags: dict[int, frozenset] = {}
    tree_edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if header is not None:
                    raise InputError(f"line {lineno}: duplicate 's td' line")
                if len(parts) != 5 or parts[1] != "td":
                    raise InputError(f"line {lineno}: expected 's td <bags> <max_bag> <n>'")
                header = tuple(int(x) for x in parts[2:])
            elif header is None:
                raise InputError(f"line {lineno}: content before 's td' line")
            elif parts[0] == "b":
                if len(parts) < 2:
                    raise InputError(f"line {lineno}: bag line without id")
                bid = int(parts[1])
                if bid in bags:
                    raise InputError(f"line {lineno}: duplicate bag {bid}")
                if not 1 <= bid <= header[0]:
                    raise InputError(f"line {lineno}: bag id {bid} outside [1, {header[0]}]")
                bags[bid] = frozenset(int(x) for x in parts[2:])
            else:
                if len(parts) != 2:
                    raise InputError(f"line {lineno}: expected a tree edge '<i> <j>'")
                tree_edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"line {lineno}: non-integer token in {line!r}") from None
    if header is None:
        raise InputError("missing 's td' line")
    nbags, max_bag, n = header
    if len(bags) != nbags:
        raise InputError(f"header declares {nbags} bags, found {len(bags)}")
    actual = max((len(b) for b in bags.values()), default=0)
    if actual != max_bag:
        raise InputError(f"header declares max bag size {max_bag}, found {actual}")
    td = TreeDecomposition(n, bags, tuple(tree_edges))
    td.validate(g)
    return td


def format_tree_decomposition(td: TreeDecomposition) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {td.n}"]
    for b in sorted(td.bags):
        lines.append(" ".join(["b", str(b)] + [str(v) for v in sorted(td.bags[b])]))
    for i, j in td.tree_edges:
        lines.append(f"{i} {j}")
    return "\n".join(lines) + "\n"


def heuristic_tree_decomposition(g: Graph) -> TreeDecomposition:
    """Min-fill elimination decomposition (no width guarantee)."""
    nxg = nx.Graph()
    nxg.add_nodes_from(range(1, g.n + 1))
    nxg.add_edges_from(sorted((min(e.u, e.v), max(e.u, e.v)) for e in g.edges))
    _, tree = treewidth_min_fill_in(nxg)
    nodes = sorted(tree.nodes, key=lambda s: (sorted(s), len(s)))
    ids = {bag: i for i, bag in enumerate(nodes, 1)}
    edges = sorted(tuple(sorted((ids[x], ids[y]))) for x, y in tree.edges)
    td = TreeDecomposition(g.n, {ids[b]: frozenset(b) for b in nodes}, tuple(edges))
    td.validate(g)
    return td


LINK = None
"""``edge_map`` value for link edges (they have no original counterpart)."""


@dataclass(frozen=True)
class WidthDecomposition:
    graph: Graph
    bags: dict  # bag id -> frozenset of transformed vertices
    parent: dict  # bag id -> parent bag id (root maps to None)
    level: dict
    children: dict
    root: int
    copy_map: dict  # transformed vertex -> original vertex
    edge_map: dict  # transformed edge id -> original edge id, or LINK
    bag_of: dict = field(default_factory=dict)  # transformed vertex -> bag id

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0)

    def subtree(self, b: int) -> list[int]:
        """Bags of the subtree rooted at ``b`` in preorder."""
        out = []
        stack = [b]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(self.children[x]))
        return out

    def to_original(self, transformed_edge_ids) -> list[int]:
        out = []
        for eid in transformed_edge_ids:
            orig = self.edge_map[eid]
            if orig is LINK:
                raise InputError(f"transformed edge {eid} is a link edge")
            out.append(orig)
        return out

    def validate(self) -> None:
        """Assert the width-decomposition invariants (raises AssertionError)."""
        g = self.graph
        covered = set()
        for b, verts in self.bags.items():
            assert not covered & verts, f"bag {b} overlaps another bag"
            covered |= verts
        assert covered == set(g.vertices), "bags do not partition the vertex set"
        r = self.width
        for e in g.edges:
            bu, bv = self.bag_of[e.u], self.bag_of[e.v]
            assert bu == bv or self.parent.get(bu) == bv or self.parent.get(bv) == bu, \
                f"edge {e.id} spans non-adjacent bags {bu}, {bv}"
            if self.edge_map[e.id] is LINK:
                assert e.capacity == INFINITE and e.length == 0.0
        assert all(len(v) <= r for v in self.bags.values())


def tree_to_width(g: Graph, td: TreeDecomposition) -> WidthDecomposition:
    """Copy every vertex once per bag holding it; link copies along tree edges.

    Original edges are realised once, in the lowest-id bag holding both
    endpoints; terminals are lifted to their copy in the lowest-id bag.
    """
    td.validate(g)
    copies: dict[tuple[int, int], int] = {}
    copy_map: dict[int, int] = {}
    bags: dict[int, frozenset] = {}
    bag_of: dict[int, int] = {}
    first_bag: dict[int, int] = {}
    nxt = 1
    for b in sorted(td.bags):
        members = []
        for v in sorted(td.bags[b]):
            copies[(v, b)] = nxt
            copy_map[nxt] = v
            bag_of[nxt] = b
            first_bag.setdefault(v, b)
            members.append(nxt)
            nxt += 1
        bags[b] = frozenset(members)
    n_new = nxt - 1

    holders: dict[int, set] = {}
    for b, verts in td.bags.items():
        for v in verts:
            holders.setdefault(v, set()).add(b)

    edges = []
    edge_map: dict[int, int | None] = {}
    for e in g.edges:
        b = min(holders[e.u] & holders[e.v])
        new_id = len(edges)
        edges.append(Edge(new_id, copies[(e.u, b)], copies[(e.v, b)], e.capacity, e.length))
        edge_map[new_id] = e.id
    for i, j in sorted(tuple(sorted(te)) for te in td.tree_edges):
        for v in sorted(td.bags[i] & td.bags[j]):
            new_id = len(edges)
            edges.append(Edge(new_id, copies[(v, i)], copies[(v, j)], INFINITE, 0.0))
            edge_map[new_id] = LINK

    pairs = [(copies[(s, first_bag[s])], copies[(t, first_bag[t])]) for s, t in g.pairs]
    tg = Graph(n_new, edges, pairs, check=False)

    adj: dict[int, list[int]] = {b: [] for b in td.bags}
    for i, j in td.tree_edges:
        adj[i].append(j)
        adj[j].append(i)
    root = min(td.bags)
    parent: dict[int, int | None] = {root: None}
    level = {root: 0}
    children: dict[int, list[int]] = {b: [] for b in td.bags}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in sorted(adj[x]):
            if y not in parent:
                parent[y] = x
                level[y] = level[x] + 1
                children[x].append(y)
                queue.append(y)
    return WidthDecomposition(tg, bags, parent, level, {b: tuple(c) for b, c in children.items()},
                              root, copy_map, edge_map, bag_of)

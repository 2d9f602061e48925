"""Spanning trees of a connected graph by single edge exchanges.

Edges are numbered 1..m in lexicographic order and a tree is the sorted
tuple of its edge numbers.  Treating the numbers as weights, the root is
the unique minimum-weight tree (greedy).  The parent of a tree ``t`` adds
the smallest non-tree edge ``e`` whose fundamental cycle holds a heavier
tree edge, and drops the heaviest edge of that cycle.

``adj(t, j)`` decodes ``j`` as the pair (a-th non-tree edge enters, b-th
tree edge leaves), with holes where the pair is not a valid exchange.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

from ..node import NodeRecord, PruneMode
from .base import Application, InputError

Tree = tuple


@dataclass(frozen=True)
class UGraph:
    n: int
    edges: tuple[tuple[int, int], ...]  # sorted, u < w; edge k is edges[k-1]

    @property
    def m(self) -> int:
        return len(self.edges)


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def parse_graph(text: str) -> UGraph:
    tokens = text.split()
    if not tokens:
        raise InputError("no input found")
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"non-integer token in input: {exc}") from None
    if len(values) < 2:
        raise InputError("input must start with n and m")
    n, m = values[0], values[1]
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    if m < 0:
        raise InputError(f"m must be non-negative, got {m}")
    if len(values) != 2 + 2 * m:
        raise InputError(f"expected {m} pairs after n and m, found {len(values) - 2} numbers")
    seen = set()
    for k in range(m):
        u, w = values[2 + 2 * k], values[3 + 2 * k]
        if not (1 <= u <= n and 1 <= w <= n):
            raise InputError(f"edge {u} {w}: vertex out of range 1..{n}")
        if u == w:
            raise InputError(f"edge {u} {w} is a loop")
        e = (min(u, w), max(u, w))
        if e in seen:
            raise InputError(f"edge {u} {w} appears twice")
        seen.add(e)
    parent = list(range(n + 1))
    for u, w in seen:
        parent[_find(parent, u)] = _find(parent, w)
    if len({_find(parent, v) for v in range(1, n + 1)}) != 1:
        raise InputError("graph is not connected")
    return UGraph(n, tuple(sorted(seen)))


class _Rooted:
    """A spanning tree hung from vertex 1, for path queries."""

    __slots__ = ("tree", "up", "up_edge", "depth")

    def __init__(self, graph: UGraph, tree: Tree):
        n = graph.n
        nbrs = [[] for _ in range(n + 1)]
        for e in tree:
            u, w = graph.edges[e - 1]
            nbrs[u].append((w, e))
            nbrs[w].append((u, e))
        up = [0] * (n + 1)
        up_edge = [0] * (n + 1)
        depth = [-1] * (n + 1)
        depth[1] = 0
        stack = [1]
        while stack:
            x = stack.pop()
            for y, e in nbrs[x]:
                if depth[y] < 0:
                    depth[y] = depth[x] + 1
                    up[y] = x
                    up_edge[y] = e
                    stack.append(y)
        self.tree = tree
        self.up = up
        self.up_edge = up_edge
        self.depth = depth

    def path(self, u: int, w: int) -> list[int]:
        """Edge numbers on the tree path between u and w."""
        up, up_edge, depth = self.up, self.up_edge, self.depth
        out = []
        while depth[u] > depth[w]:
            out.append(up_edge[u])
            u = up[u]
        while depth[w] > depth[u]:
            out.append(up_edge[w])
            w = up[w]
        while u != w:
            out.append(up_edge[u])
            out.append(up_edge[w])
            u, w = up[u], up[w]
        return out


class SpanningTrees(Application):
    name = "spantree"
    noun = "spanning trees"

    def __init__(self, graph: UGraph, countonly: bool = False, prune: PruneMode = PruneMode.OFF):
        super().__init__(countonly, prune)
        self.graph = graph
        self.n = graph.n
        self.m = graph.m
        self.delta = (self.m - self.n + 1) * (self.n - 1)
        self._cache: dict[Tree, _Rooted] = {}

    @classmethod
    def from_input(cls, text, countonly=False, prune=PruneMode.OFF):
        return cls(parse_graph(text), countonly, prune)

    def _rooted(self, t: Tree) -> _Rooted:
        c = self._cache.get(t)
        if c is None:
            if len(self._cache) >= 64:
                self._cache.clear()
            c = self._cache[t] = _Rooted(self.graph, t)
        return c

    def non_tree(self, t: Tree) -> list[int]:
        inside = set(t)
        return [e for e in range(1, self.m + 1) if e not in inside]

    def fundamental_cycle(self, t: Tree, e: int) -> set[int]:
        if e in t:
            raise ValueError(f"edge {e} is already in the tree")
        u, w = self.graph.edges[e - 1]
        return {e, *self._rooted(t).path(u, w)}

    def root(self) -> Tree:
        parent = list(range(self.n + 1))
        out = []
        for k, (u, w) in enumerate(self.graph.edges, 1):
            a, b = _find(parent, u), _find(parent, w)
            if a != b:
                parent[a] = b
                out.append(k)
        return tuple(out)

    def _index(self, t: Tree, enter: int, leave: int) -> int:
        """j such that adj(t, j) swaps ``enter`` in for ``leave``."""
        a = enter - bisect_left(t, enter)   # rank among non-tree edges
        b = bisect_left(t, leave) + 1       # rank among tree edges
        return (a - 1) * (self.n - 1) + b

    def adj(self, t: Tree, j: int) -> Optional[Tree]:
        a = (j - 1) // (self.n - 1) + 1
        b = (j - 1) % (self.n - 1) + 1
        outside = self.non_tree(t)
        if a > len(outside):
            return None
        e, g = outside[a - 1], t[b - 1]
        u, w = self.graph.edges[e - 1]
        if g not in self._rooted(t).path(u, w):
            return None
        return tuple(sorted(set(t) - {g} | {e}))

    def f(self, t: Tree) -> tuple[Tree, int]:
        rooted = self._rooted(t)
        edges = self.graph.edges
        for e in self.non_tree(t):
            cycle = rooted.path(*edges[e - 1])
            g = max(cycle)
            if g > e:
                parent = tuple(sorted(set(t) - {g} | {e}))
                return parent, self._index(parent, g, e)
        raise AssertionError("f called on the root tree")

    def next_child(self, t: Tree, j: int):
        # A child swaps e in for g where e is the heaviest edge of its own
        # fundamental cycle; the candidate must still pass the parent test.
        n1 = self.n - 1
        edges = self.graph.edges
        rooted = self._rooted(t)
        for a, e in enumerate(self.non_tree(t), 1):
            if a * n1 <= j:
                continue
            cycle = rooted.path(*edges[e - 1])
            if max(cycle) > e:
                continue
            for g in sorted(cycle):
                k = (a - 1) * n1 + bisect_left(t, g) + 1
                if k <= j:
                    continue
                w = tuple(sorted(set(t) - {g} | {e}))
                if self.f(w)[0] == t:
                    return k, w
        return None

    def describe(self, t: Tree) -> str:
        return " ".join(map(str, t))

    def pack(self, t: Tree, depth: int = 0, unexplored: bool = False) -> NodeRecord:
        return NodeRecord(vlong=list(t), depth=depth, unexplored=unexplored)

    def unpack(self, record: NodeRecord) -> Tree:
        t = tuple(record.vlong)
        if len(t) != self.n - 1:
            raise ValueError(f"record holds {len(t)} edges, a spanning tree needs {self.n - 1}")
        return t

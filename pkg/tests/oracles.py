"""Ground truth for the test suite.

Nothing here may call into the traversal code: the fixture tree is walked
with its own recursive preorder, and the enumerators are brute force.
"""

from __future__ import annotations

from itertools import combinations, permutations

from revsearch.engine import SearchProblem
from revsearch.node import NodeRecord

# 25-node example tree, children listed in adjacency order (delta = 6);
# labels coincide with the preorder numbering.
FIXTURE_CHILDREN = {
    0: [1, 7, 18, 22],
    1: [2, 3, 4, 5, 6],
    7: [8, 9, 10, 11, 15, 16],
    11: [12, 13],
    13: [14],
    16: [17],
    18: [19, 20, 21],
    22: [23, 24],
}
FIXTURE_SIZE = 25
FIXTURE_DELTA = 6


def fixture_children(v: int) -> list[int]:
    return FIXTURE_CHILDREN.get(v, [])


def fixture_parent() -> dict[int, tuple[int, int]]:
    out = {}
    for u, kids in FIXTURE_CHILDREN.items():
        for j, w in enumerate(kids, 1):
            out[w] = (u, j)
    return out


def fixture_preorder(v: int = 0) -> list[int]:
    out = [v]
    for w in fixture_children(v):
        out.extend(fixture_preorder(w))
    return out


def fixture_subtree(v: int) -> set[int]:
    return set(fixture_preorder(v)) - {v}


class FixtureTree(SearchProblem):
    """The 25-node example tree as a search problem."""

    delta = FIXTURE_DELTA

    def __init__(self):
        self.parent = fixture_parent()

    def root(self):
        return 0

    def adj(self, v, j):
        kids = fixture_children(v)
        return kids[j - 1] if j <= len(kids) else None

    def f(self, v):
        return self.parent[v]

    def pack(self, v, depth=0, unexplored=False):
        return NodeRecord(vlong=[v], depth=depth, unexplored=unexplored)

    def unpack(self, record):
        return record.vlong[0]


def fixture_depth(v: int) -> int:
    parent = fixture_parent()
    d = 0
    while v != 0:
        v = parent[v][0]
        d += 1
    return d


# ---------------------------------------------------------------- posets


def is_linear_extension(perm, edges) -> bool:
    pos = {x: k for k, x in enumerate(perm)}
    return all(pos[i] < pos[j] for i, j in edges)


def brute_lin_ext(n: int, edges) -> set[tuple[int, ...]]:
    if n > 8:
        raise ValueError(f"brute force refused for n={n} > 8")
    return {p for p in permutations(range(1, n + 1)) if is_linear_extension(p, edges)}


def antichain(n: int) -> tuple[int, list]:
    return n, []


def chain(n: int) -> tuple[int, list]:
    return n, [(i, i + 1) for i in range(1, n)]


def tableaux(k: int) -> tuple[int, list]:
    """2 x k standard Young tableaux poset: a1<a2, a3<a4, ..., odd chain, even chain."""
    n = 2 * k
    edges = [(i, i + 1) for i in range(1, n, 2)]
    edges += [(i, i + 2) for i in range(1, n - 1, 2)]
    edges += [(i, i + 2) for i in range(2, n - 1, 2)]
    return n, sorted(edges)


def matching(k: int) -> tuple[int, list]:
    """Perfect matching poset on 2k elements: a1<a2, a3<a4, ... and a1<a3<...<a(2k-1)."""
    n = 2 * k
    edges = [(i, i + 1) for i in range(1, n, 2)]
    edges += [(i, i + 2) for i in range(1, n - 1, 2)]
    return n, sorted(edges)


def poset_text(n: int, edges) -> str:
    return f"{n} {len(edges)}\n" + "".join(f"{i} {j}\n" for i, j in edges)


def catalan(k: int) -> int:
    c = 1
    for i in range(k):
        c = c * 2 * (2 * i + 1) // (i + 2)
    return c


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------- graphs


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def is_spanning_tree(n: int, edges) -> bool:
    if len(edges) != n - 1:
        return False
    parent = list(range(n + 1))
    for u, w in edges:
        a, b = _find(parent, u), _find(parent, w)
        if a == b:
            return False
        parent[a] = b
    return True


def sorted_edges(edges) -> list[tuple[int, int]]:
    return sorted((min(u, w), max(u, w)) for u, w in edges)


def brute_spantrees(n: int, edges) -> set[tuple[int, ...]]:
    """Spanning trees as tuples of 1-based indices into the sorted edge list."""
    es = sorted_edges(edges)
    if len(es) > 30:
        raise ValueError("brute force refused: too many edges")
    out = set()
    for combo in combinations(range(1, len(es) + 1), n - 1):
        if is_spanning_tree(n, [es[i - 1] for i in combo]):
            out.add(combo)
    return out


def bareiss_det(M: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination, exact over the integers."""
    A = [row[:] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def kirchhoff_count(n: int, edges) -> int:
    L = [[0] * n for _ in range(n)]
    for u, w in edges:
        u, w = u - 1, w - 1
        L[u][u] += 1
        L[w][w] += 1
        L[u][w] -= 1
        L[w][u] -= 1
    return bareiss_det([row[1:] for row in L[1:]])


def complete_graph(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def complete_bipartite(a: int, b: int) -> list[tuple[int, int]]:
    return [(i, a + j) for i in range(1, a + 1) for j in range(1, b + 1)]


def cycle_graph(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(1, n)] + [(1, n)]


def petersen() -> list[tuple[int, int]]:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6 + i, 6 + (i + 2) % 5) for i in range(5)]
    return outer + spokes + inner


def is_connected(n: int, edges) -> bool:
    parent = list(range(n + 1))
    for u, w in edges:
        parent[_find(parent, u)] = _find(parent, w)
    return len({_find(parent, v) for v in range(1, n + 1)}) == 1


def connected_graphs(n: int):
    """Every connected simple labelled graph on vertices 1..n."""
    pairs = list(combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if is_connected(n, edges):
            yield edges


def graph_text(n: int, edges) -> str:
    return f"{n} {len(edges)}\n" + "".join(f"{u} {w}\n" for u, w in edges)

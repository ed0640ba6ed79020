"""Brute-force oracles, written independently of the search kernels.

Nothing here reuses the pair-choice encoding of :mod:`hallspace.kernels`:
matchings are checked as literal subgraphs (forest, component size, left
degree) and 2-path covers against the literal definition (injective, no
chained triple of distinct edges).
"""

from __future__ import annotations

from itertools import combinations, product
from typing import Iterable, Iterator

from .graphs import BipartiteGraph, Hypergraph


def is_hk_forest(edges: list[tuple[int, int]], h: int, k: int) -> bool:
    """True when ``edges`` (left, right) form an (h,k)-matching."""
    left_deg: dict[int, int] = {}
    for u, _ in edges:
        left_deg[u] = left_deg.get(u, 0) + 1
    if any(d != h for d in left_deg.values()):
        return False
    parent: dict[tuple, tuple] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    for u, r in edges:
        a, b = find(("L", u)), find(("R", r))
        if a == b:
            return False  # cycle
        parent[a] = b
    sizes: dict[tuple, int] = {}
    for u, _ in edges:
        root = find(("L", u))
        sizes[root] = sizes.get(root, 0) + 1
    return all(n <= k for n in sizes.values())


def brute_force_cover(g: BipartiteGraph, s: Iterable[int], h: int = 2, k: int = 4) -> list[tuple[int, int]] | None:
    """Enumerate every edge set giving each vertex of ``s`` exactly h edges.

    Any (h,k)-matching covering ``s`` restricts to one of these (dropping
    left vertices outside ``s`` keeps it a matching), so the scan is exhaustive.
    """
    members = sorted(set(s))
    choices = [[[(u, r) for r in c] for c in combinations(g.adj[u], h)] for u in members]
    for pick in product(*choices):
        edges = [e for part in pick for e in part]
        if is_hk_forest(edges, h, k):
            return edges
    return None


def is_two_path_cover(hg: Hypergraph, f: dict[int, tuple[int, int]]) -> bool:
    for e, pair in f.items():
        if len(set(pair)) != 2 or not set(pair) <= set(hg.edges[e]):
            return False
    keys = list(f)
    pairs = {e: set(f[e]) for e in keys}
    if len({frozenset(p) for p in pairs.values()}) != len(keys):
        return False
    for e1 in keys:
        for e2 in keys:
            if e2 == e1 or not pairs[e1] & pairs[e2]:
                continue
            for e3 in keys:
                if e3 != e1 and e3 != e2 and pairs[e2] & pairs[e3]:
                    return False
    return True


def enumerate_two_path_covers(hg: Hypergraph, subset: Iterable[int] | None = None) -> Iterator[dict[int, tuple[int, int]]]:
    idx = list(range(len(hg.edges))) if subset is None else sorted(set(subset))
    for pick in product(*(combinations(hg.edges[e], 2) for e in idx)):
        f = dict(zip(idx, pick))
        if is_two_path_cover(hg, f):
            yield f


def has_two_path_cover(hg: Hypergraph, subset: Iterable[int] | None = None) -> bool:
    return next(enumerate_two_path_covers(hg, subset), None) is not None

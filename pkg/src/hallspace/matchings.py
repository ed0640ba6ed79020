"""(h,k)-matchings, 2-path covers and the counterexample family.

A (2,4)-matching covering a set of left vertices is the same thing as a choice
of one right-vertex pair inside each left neighbourhood such that the pairs
are distinct and no pair meets two others.  Searches run over these pair
choices in lexicographic order of (left vertex, pair), so every answer is
deterministic.  The pair-choice search lives in :mod:`hallspace.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from . import kernels
from .graphs import (
    BipartiteGraph,
    GraphError,
    Hypergraph,
    hypergraph_to_bipartite,
    neighborhood_hypergraph,
    vertex_set,
)

SUPPORTED = {(1, 1): False, (2, 2): False, (2, 4): True}


@dataclass(frozen=True)
class Component:
    """One tree of a matching.

    ``edges`` are (left, right) pairs.  A component without edges is a single
    right vertex, listed in ``right``.
    """

    edges: tuple[tuple[int, int], ...]
    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]]) -> Component:
        edges = tuple(sorted({(int(u), int(r)) for u, r in edges}))
        if not edges:
            raise ValueError("use Component.isolated() for an edgeless component")
        left = tuple(sorted({u for u, _ in edges}))
        right = tuple(sorted({r for _, r in edges}))
        return cls(edges, left, right)

    @classmethod
    def isolated(cls, r: int) -> Component:
        return cls((), (), (int(r),))

    def to_json(self) -> list:
        if not self.edges:
            return [[None, self.right[0]]]
        return [list(e) for e in self.edges]

    @classmethod
    def from_json(cls, data: list) -> Component:
        if len(data) == 1 and data[0][0] is None:
            return cls.isolated(data[0][1])
        return cls.from_edges((u, r) for u, r in data)


@dataclass(frozen=True)
class HKMatching:
    h: int
    k: int
    components: tuple[Component, ...] = ()

    def __post_init__(self):
        if self.h < 1 or self.k < self.h:
            raise ValueError("need 1 <= h <= k")
        object.__setattr__(self, "components", tuple(self.components))

    def left_vertices(self) -> frozenset[int]:
        return frozenset(u for c in self.components for u in c.left)

    def right_vertices(self) -> frozenset[int]:
        return frozenset(r for c in self.components for r in c.right)

    def covers(self, left: Iterable[int] = (), right: Iterable[int] = ()) -> bool:
        return set(left) <= self.left_vertices() and set(right) <= self.right_vertices()

    def component_of_left(self, u: int) -> int | None:
        for i, c in enumerate(self.components):
            if u in c.left:
                return i
        return None

    def component_of_right(self, r: int) -> int | None:
        for i, c in enumerate(self.components):
            if r in c.right:
                return i
        return None

    def without(self, index: int) -> HKMatching:
        comps = self.components[:index] + self.components[index + 1 :]
        return HKMatching(self.h, self.k, comps)

    def extended(self, extra: Iterable[Component]) -> HKMatching:
        return HKMatching(self.h, self.k, self.components + tuple(extra))

    def to_json(self) -> list:
        return [c.to_json() for c in self.components]

    @classmethod
    def from_json(cls, data: list, h: int = 2, k: int = 4) -> HKMatching:
        return cls(h, k, tuple(Component.from_json(c) for c in data))


def validate_matching(g: BipartiteGraph, f: HKMatching) -> list[str]:
    """Return the list of rule violations; empty means ``f`` is a valid matching."""
    problems = []
    owner_left: dict[int, int] = {}
    owner_right: dict[int, int] = {}
    for i, comp in enumerate(f.components):
        tag = f"component {i}"
        for u, r in comp.edges:
            if not g.has_edge(u, r):
                problems.append(f"{tag}: edge ({u},{r}) not in graph")
        if comp.edges:
            left = {u for u, _ in comp.edges}
            right = {r for _, r in comp.edges}
            if left != set(comp.left) or right != set(comp.right):
                problems.append(f"{tag}: vertex sets disagree with edges")
        elif comp.left or len(comp.right) != 1:
            problems.append(f"{tag}: edgeless component must be a single right vertex")
        n_vertices = len(comp.left) + len(comp.right)
        if len(comp.edges) != n_vertices - 1 or not _connected(comp):
            problems.append(f"{tag}: not a tree")
        if len(comp.edges) > f.k:
            problems.append(f"{tag}: more than k={f.k} edges")
        for u in comp.left:
            d = sum(1 for e in comp.edges if e[0] == u)
            if d != f.h:
                problems.append(f"{tag}: left-degree != h at vertex {u} (degree {d})")
        for u in comp.left:
            if u in owner_left:
                problems.append(f"{tag}: left vertex {u} shared with component {owner_left[u]}")
            owner_left.setdefault(u, i)
        for r in comp.right:
            if r in owner_right:
                problems.append(f"{tag}: right vertex {r} shared with component {owner_right[r]}")
            owner_right.setdefault(r, i)
    return problems


def _connected(comp: Component) -> bool:
    if not comp.edges:
        return True
    nodes = {("L", u) for u in comp.left} | {("R", r) for r in comp.right}
    adj: dict[tuple, list[tuple]] = {n: [] for n in nodes}
    for u, r in comp.edges:
        adj[("L", u)].append(("R", r))
        adj[("R", r)].append(("L", u))
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        for m in adj[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return seen == nodes


@dataclass(frozen=True)
class CoverResult:
    matching: HKMatching | None
    reason: str = ""

    def __bool__(self):
        return self.matching is not None


def _pair_options(rows: list[tuple[int, ...]], h: int) -> tuple[list[tuple[tuple[int, ...], ...]], list[list[int]], list[int]]:
    """Candidate h-subsets per row, plus their bitmasks over a dense local index."""
    labels = sorted({r for row in rows for r in row})
    index = {r: i for i, r in enumerate(labels)}
    cands = [tuple(combinations(row, h)) for row in rows]
    masks = [[sum(1 << index[r] for r in c) for c in cs] for cs in cands]
    return cands, masks, labels


def _components_from_pairs(items: list[int], chosen: list[tuple[int, ...]]) -> tuple[Component, ...]:
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first_use: dict[int, int] = {}
    for i, pair in enumerate(chosen):
        for r in pair:
            if r in first_use:
                parent[find(i)] = find(first_use[r])
            else:
                first_use[r] = i
    groups: dict[int, list[int]] = {}
    for i in range(len(items)):
        groups.setdefault(find(i), []).append(i)
    comps = [
        Component.from_edges((items[i], r) for i in members for r in chosen[i])
        for members in groups.values()
    ]
    comps.sort(key=lambda c: c.left[0])
    return tuple(comps)


def find_cover_matching(
    g: BipartiteGraph,
    s: Iterable[int],
    h: int = 2,
    k: int = 4,
    *,
    backend: str | None = None,
) -> CoverResult:
    """Exact search for an (h,k)-matching whose left side is exactly ``s``.

    Only (1,1), (2,2) and (2,4) are supported.  Extra left vertices never help a
    cover, so the search does not use any; a ``None`` answer is exhaustive.
    """
    if (h, k) not in SUPPORTED:
        raise ValueError(f"({h},{k})-matchings are not supported")
    items = list(vertex_set(s, g.left_count))
    for u in items:
        if g.degree(u) < h:
            return CoverResult(None, f"degree too small: left vertex {u}")
    rows = [g.adj[u] for u in items]
    cands, masks, _ = _pair_options(rows, h)
    choice = kernels.solve_cover(masks, chain=SUPPORTED[(h, k)], backend=backend)
    if choice is None:
        return CoverResult(None, "no cover exists")
    chosen = [cands[i][j] for i, j in enumerate(choice)]
    return CoverResult(HKMatching(h, k, _components_from_pairs(items, chosen)))


# 2-path covers ----------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class TwoPathCover:
    assignment: Mapping[int, tuple[int, int]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {str(e): list(p) for e, p in sorted(self.assignment.items())}


def validate_two_path_cover(hg: Hypergraph, cover: TwoPathCover) -> list[str]:
    problems = []
    items = sorted(cover.assignment.items())
    for e, pair in items:
        if not 0 <= e < len(hg.edges):
            problems.append(f"edge {e} does not exist")
            continue
        if len(set(pair)) != 2 or not set(pair) <= set(hg.edges[e]):
            problems.append(f"edge {e}: pair {pair} is not a 2-subset of the edge")
    pairs = [frozenset(p) for _, p in items]
    if len(set(pairs)) != len(pairs):
        problems.append("assignment is not injective")
    for i, (e, _) in enumerate(items):
        touching = [items[j][0] for j in range(len(items)) if j != i and pairs[i] & pairs[j]]
        if len(touching) > 1:
            problems.append(f"edge {e}: pair meets edges {touching} (chained triple)")
    return problems


def two_path_cover(
    hg: Hypergraph, subset: Iterable[int] | None = None, *, backend: str | None = None
) -> TwoPathCover | None:
    """First 2-path cover of the chosen edges in canonical order, or ``None``."""
    idx = list(range(len(hg.edges))) if subset is None else sorted(set(subset))
    for e in idx:
        if not 0 <= e < len(hg.edges):
            raise GraphError(f"edge {e} does not exist")
        if len(hg.edges[e]) < 2:
            raise GraphError(f"edge {e} has fewer than two vertices")
    cands, masks, _ = _pair_options([hg.edges[e] for e in idx], 2)
    choice = kernels.solve_cover(masks, chain=True, backend=backend)
    if choice is None:
        return None
    return TwoPathCover({e: cands[i][j] for i, (e, j) in enumerate(zip(idx, choice))})


def matching_from_cover(g: BipartiteGraph, l_subset: Iterable[int], cover: TwoPathCover) -> HKMatching:
    nh = neighborhood_hypergraph(g, l_subset)
    if set(cover.assignment) != set(range(len(nh.edge_left))):
        raise ValueError("cover domain does not match the left subset")
    items = list(nh.edge_left)
    chosen = [tuple(nh.vertex_labels[v] for v in cover.assignment[i]) for i in range(len(items))]
    for u, pair in zip(items, chosen):
        if not set(pair) <= set(g.adj[u]):
            raise ValueError(f"pair {pair} is outside N({u})")
    return HKMatching(2, 4, _components_from_pairs(items, chosen))


def cover_from_matching(g: BipartiteGraph, l_subset: Iterable[int], f: HKMatching) -> TwoPathCover:
    nh = neighborhood_hypergraph(g, l_subset)
    if f.left_vertices() != set(nh.edge_left):
        raise ValueError("matching's left side does not match the left subset")
    index = {r: v for v, r in enumerate(nh.vertex_labels)}
    assignment = {}
    for i, u in enumerate(nh.edge_left):
        comp = f.components[f.component_of_left(u)]
        pair = tuple(sorted(index[r] for x, r in comp.edges if x == u))
        assignment[i] = pair
    return TwoPathCover(assignment)


# reducible configurations -----------------------------------------------------


@dataclass(frozen=True)
class ReducibleConfiguration:
    """An occurrence of one of the five locally coverable patterns.

    ``kind`` is ``a``..``e``; ``roles`` names the pattern's vertices;
    ``local_cover`` covers ``edges`` using only vertices of degree 1 or 2.
    """

    kind: str
    edges: tuple[int, ...]
    roles: Mapping[str, int]
    local_cover: Mapping[int, tuple[int, int]]


def find_reducible_configuration(hg: Hypergraph) -> ReducibleConfiguration | None:
    """Search the patterns in order a..e, each by increasing edge/vertex index.

    a: a 3-edge holding two degree-1 vertices.
    b: a 2-edge whose endpoints both have degree 1.
    c, d, e: a degree-2 vertex v whose two edges each hold a degree-1 vertex;
       c when both edges have size 3, d when both have size 2, e when mixed.
    Degrees count edges by index, so repeated edges never look reducible.
    """
    for i, e in enumerate(hg.edges):
        if len(e) not in (2, 3):
            raise GraphError(f"edge {i} has size {len(e)}; only sizes 2 and 3 are handled")
    deg = hg.degrees()
    inc = hg.incidence()

    for i, e in enumerate(hg.edges):
        ones = [v for v in e if deg[v] == 1]
        if len(e) == 3 and len(ones) >= 2:
            other = next(v for v in e if v not in ones[:2])
            return ReducibleConfiguration(
                "a", (i,), {"p": ones[0], "q": ones[1], "c": other}, {i: (ones[0], ones[1])}
            )
    for i, e in enumerate(hg.edges):
        if len(e) == 2 and deg[e[0]] == 1 and deg[e[1]] == 1:
            return ReducibleConfiguration("b", (i,), {"p": e[0], "q": e[1]}, {i: e})

    def hinged():
        for v in range(hg.vertex_count):
            if deg[v] != 2:
                continue
            e1, e2 = inc[v]
            p = next((u for u in hg.edges[e1] if deg[u] == 1), None)
            q = next((u for u in hg.edges[e2] if deg[u] == 1), None)
            if p is not None and q is not None:
                yield v, e1, e2, p, q

    for kind, sizes in (("c", (3, 3)), ("d", (2, 2)), ("e", (2, 3))):
        for v, e1, e2, p, q in hinged():
            got = tuple(sorted((len(hg.edges[e1]), len(hg.edges[e2]))))
            if got == sizes:
                cover = {e1: tuple(sorted((p, v))), e2: tuple(sorted((v, q)))}
                return ReducibleConfiguration(kind, (e1, e2), {"v": v, "p": p, "q": q}, cover)
    return None


# the counterexample family ------------------------------------------------------

# Gadget: pentagon v1..v5 (v1 = x) with outer vertices w1..w5 and two pendant
# vertices z2, z5.  Labels: v1..v5 -> 0..4, w1..w5 -> 5..9, z2 -> 10, z5 -> 11.
GADGET_X = 0
GADGET_EDGES = (
    (0, 1, 8),  # v1 v2 w4
    (1, 2, 9),  # v2 v3 w5
    (2, 3, 5),  # v3 v4 w1
    (3, 4, 6),  # v4 v5 w2
    (0, 4, 7),  # v5 v1 w3
    (9, 11),  # w5 z5
    (6, 10),  # w2 z2
)

# Triangle {v1,v2,v3} with a pendant 2-edge at each corner: v1..v3 -> 0..2,
# w1..w3 -> 3..5.
MINIMAL_EDGES = ((0, 1, 2), (0, 3), (1, 4), (2, 5))


def gadget() -> Hypergraph:
    return Hypergraph(12, GADGET_EDGES)


def minimal_counterexample() -> Hypergraph:
    return Hypergraph(6, MINIMAL_EDGES)


def pendant_edges(hg: Hypergraph) -> list[int]:
    """Indices of 2-edges with exactly one degree-1 endpoint."""
    deg = hg.degrees()
    return [i for i, e in enumerate(hg.edges) if len(e) == 2 and (deg[e[0]] == 1) != (deg[e[1]] == 1)]


def amplify(hg: Hypergraph, pendant_edge: int) -> Hypergraph:
    """Replace the pendant 2-edge {x, y} (deg y = 1) by a gadget glued at x."""
    if not 0 <= pendant_edge < len(hg.edges):
        raise GraphError(f"edge {pendant_edge} does not exist")
    e = hg.edges[pendant_edge]
    deg = hg.degrees()
    if len(e) != 2 or pendant_edge not in pendant_edges(hg):
        raise GraphError(f"edge {pendant_edge} is not a pendant 2-edge")
    x, y = (e[0], e[1]) if deg[e[1]] == 1 else (e[1], e[0])

    def relabel(v):
        return v if v < y else v - 1

    base = hg.vertex_count - 1
    gmap = {GADGET_X: relabel(x)}
    fresh = iter(range(base, base + 11))
    for v in range(12):
        if v != GADGET_X:
            gmap[v] = next(fresh)
    edges = [tuple(relabel(v) for v in old) for i, old in enumerate(hg.edges) if i != pendant_edge]
    edges += [tuple(gmap[v] for v in ge) for ge in GADGET_EDGES]
    return Hypergraph(base + 11, tuple(edges))


def amplification_rounds(epsilon) -> int:
    """Least n with (6 + 10n) / (4 + 6n) >= 2 - epsilon."""
    if isinstance(epsilon, float):
        raise TypeError("use an exact rational, not a float")
    epsilon = Fraction(epsilon)
    if epsilon <= Fraction(1, 3):
        raise ValueError("the construction needs epsilon > 1/3")
    target = 2 - epsilon
    n = 0
    while Fraction(6 + 10 * n, 4 + 6 * n) < target:
        n += 1
    return n


def counterexample(epsilon) -> Hypergraph:
    """A hypergraph with |V| >= (2 - epsilon)|E|, no 2-path cover, and every
    proper edge subset coverable (certified by the test suite, not assumed)."""
    hg = minimal_counterexample()
    for _ in range(amplification_rounds(epsilon)):
        hg = amplify(hg, pendant_edges(hg)[0])
    return hg


def counterexample_graph(epsilon) -> BipartiteGraph:
    return hypergraph_to_bipartite(counterexample(epsilon))

"""Bipartite graphs, hypergraphs and expansion.

Vertices are dense integer indices on each side.  Left vertex ``i`` has the
sorted, duplicate-free adjacency list ``g.adj[i]``.  All thresholds are exact
rationals (:class:`fractions.Fraction`); no floating point enters a decision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import kernels

DEFAULT_SUBSET_CAP = 20


class GraphError(ValueError):
    """Structural problem with a graph, hypergraph or vertex set."""


class CapExceeded(ValueError):
    """An exhaustive enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class BipartiteGraph:
    left_count: int
    right_count: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.left_count < 0 or self.right_count < 0:
            raise GraphError("vertex counts must be nonnegative")
        adj = tuple(tuple(row) for row in self.adj)
        if len(adj) != self.left_count:
            raise GraphError(f"expected {self.left_count} adjacency rows, got {len(adj)}")
        for i, row in enumerate(adj):
            if list(row) != sorted(set(row)):
                raise GraphError(f"left vertex {i}: adjacency must be sorted and duplicate-free")
            if row and (row[0] < 0 or row[-1] >= self.right_count):
                raise GraphError(f"left vertex {i}: right index out of range")
        object.__setattr__(self, "adj", adj)

    @classmethod
    def from_lists(cls, adj: Iterable[Iterable[int]], right_count: int | None = None) -> BipartiteGraph:
        """Build from unsorted rows; duplicate entries inside a row are an error."""
        rows = []
        for i, row in enumerate(adj):
            row = list(row)
            if len(set(row)) != len(row):
                raise GraphError(f"left vertex {i}: duplicate edge")
            rows.append(tuple(sorted(row)))
        if right_count is None:
            right_count = 1 + max((r[-1] for r in rows if r), default=-1)
        return cls(len(rows), right_count, tuple(rows))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, r) for u, row in enumerate(self.adj) for r in row]

    def has_edge(self, u: int, r: int) -> bool:
        return 0 <= u < self.left_count and r in self.adj[u]

    def right_adj(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.right_count)]
        for u, row in enumerate(self.adj):
            for r in row:
                out[r].append(u)
        return out

    def right_degrees(self) -> list[int]:
        deg = [0] * self.right_count
        for row in self.adj:
            for r in row:
                deg[r] += 1
        return deg

    def max_right_degree(self) -> int:
        return max(self.right_degrees(), default=0)

    def max_left_degree(self) -> int:
        return max((len(row) for row in self.adj), default=0)


@dataclass(frozen=True)
class Hypergraph:
    vertex_count: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        edges = tuple(tuple(sorted(e)) for e in self.edges)
        for i, e in enumerate(edges):
            if not e:
                raise GraphError(f"edge {i} is empty")
            if len(set(e)) != len(e):
                raise GraphError(f"edge {i} repeats a vertex")
            if e[0] < 0 or e[-1] >= self.vertex_count:
                raise GraphError(f"edge {i}: vertex index out of range")
        object.__setattr__(self, "edges", edges)

    def degrees(self) -> list[int]:
        """Per-vertex count of edges (by index) containing the vertex."""
        deg = [0] * self.vertex_count
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def incidence(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return inc

    def average_degree(self) -> Fraction:
        """Average over vertices of the number of *distinct* edges containing each."""
        if self.vertex_count == 0:
            return Fraction(0)
        distinct: list[set[tuple[int, ...]]] = [set() for _ in range(self.vertex_count)]
        for e in self.edges:
            for v in e:
                distinct[v].add(e)
        return Fraction(sum(len(s) for s in distinct), self.vertex_count)


def vertex_set(members: Iterable[int], size: int, side: str = "left") -> tuple[int, ...]:
    """Normalise ``members`` to a sorted tuple, checking range against ``size``."""
    out = tuple(sorted(set(members)))
    if out and (out[0] < 0 or out[-1] >= size):
        raise GraphError(f"{side} vertex index out of range")
    return out


def neighborhood(g: BipartiteGraph, a: Iterable[int]) -> tuple[int, ...]:
    seen: set[int] = set()
    for u in vertex_set(a, g.left_count):
        seen.update(g.adj[u])
    return tuple(sorted(seen))


@dataclass(frozen=True)
class ExpansionResult:
    certified: bool
    violation: tuple[int, ...] | None = None

    def __bool__(self):
        return self.certified


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("use an exact rational, not a float")
    return Fraction(x)


def is_expander(
    g: BipartiteGraph,
    s: int,
    delta,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    force: bool = False,
    backend: str | None = None,
) -> ExpansionResult:
    """Check that every left set X with 1 <= |X| <= s has |N(X)| >= delta |X|.

    The witness on failure is the first violating set by size, then
    lexicographically.  Enumerating beyond ``cap`` left vertices needs ``force``
    (the work is exponential in ``min(s, |L|)``).
    """
    delta = _as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if s < 1:
        raise ValueError("s must be positive")
    top = min(s, g.left_count)
    if top > cap and not force:
        raise CapExceeded(f"subset size {top} exceeds cap {cap}; pass force=True")
    masks = [sum(1 << r for r in row) for row in g.adj]
    hit = kernels.first_expansion_violation(masks, top, delta.numerator, delta.denominator, backend=backend)
    if hit is None:
        return ExpansionResult(True)
    return ExpansionResult(False, tuple(hit))


@dataclass(frozen=True)
class InducedSubgraph:
    """``graph`` is G minus (A, B); the maps translate between old and new labels."""

    graph: BipartiteGraph
    left_new_to_old: tuple[int, ...]
    right_new_to_old: tuple[int, ...]

    @property
    def left_old_to_new(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.left_new_to_old)}

    @property
    def right_old_to_new(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.right_new_to_old)}


def induced_remove(g: BipartiteGraph, a: Iterable[int] = (), b: Iterable[int] = ()) -> InducedSubgraph:
    a = set(vertex_set(a, g.left_count, "left"))
    b = set(vertex_set(b, g.right_count, "right"))
    left_keep = tuple(u for u in range(g.left_count) if u not in a)
    right_keep = tuple(r for r in range(g.right_count) if r not in b)
    rmap = {old: new for new, old in enumerate(right_keep)}
    adj = tuple(tuple(rmap[r] for r in g.adj[u] if r in rmap) for u in left_keep)
    return InducedSubgraph(BipartiteGraph(len(left_keep), len(right_keep), adj), left_keep, right_keep)


@dataclass(frozen=True)
class NeighborhoodHypergraph:
    """Hypergraph on N(L') with one edge per left vertex of L'.

    ``vertex_labels[v]`` is the right vertex behind hypergraph vertex ``v``;
    ``edge_left[i]`` is the left vertex whose neighbourhood is edge ``i``.
    ``injective`` tells whether distinct left vertices have distinct
    neighbourhoods.
    """

    hypergraph: Hypergraph
    vertex_labels: tuple[int, ...]
    edge_left: tuple[int, ...]
    injective: bool


def neighborhood_hypergraph(g: BipartiteGraph, l_subset: Iterable[int]) -> NeighborhoodHypergraph:
    members = vertex_set(l_subset, g.left_count)
    for u in members:
        if not g.adj[u]:
            raise GraphError(f"left vertex {u} is isolated")
    labels = neighborhood(g, members)
    index = {r: i for i, r in enumerate(labels)}
    edges = tuple(tuple(index[r] for r in g.adj[u]) for u in members)
    injective = len(set(edges)) == len(edges)
    return NeighborhoodHypergraph(Hypergraph(len(labels), edges), labels, members, injective)


def hypergraph_to_bipartite(hg: Hypergraph) -> BipartiteGraph:
    """Left side = edges, right side = vertices."""
    return BipartiteGraph(len(hg.edges), hg.vertex_count, hg.edges)


def random_left_regular(
    left_count: int,
    right_count: int,
    degree: int,
    rng: random.Random,
    max_right_degree: int | None = None,
    attempts: int = 1000,
) -> BipartiteGraph:
    """Uniform ``degree``-subsets per left vertex, redrawn until the right
    degree bound (if any) holds."""
    if degree > right_count:
        raise GraphError("degree exceeds right_count")
    for _ in range(attempts):
        rows = [tuple(sorted(rng.sample(range(right_count), degree))) for _ in range(left_count)]
        g = BipartiteGraph(left_count, right_count, tuple(rows))
        if max_right_degree is None or g.max_right_degree() <= max_right_degree:
            return g
    raise GraphError("could not meet the right degree bound")


def sample_expansion(
    g: BipartiteGraph, size: int, samples: int, rng: random.Random
) -> list[Fraction]:
    """Ratios |N(X)|/|X| for random left sets X of the given size."""
    out = []
    for _ in range(samples):
        x = rng.sample(range(g.left_count), size)
        out.append(Fraction(len(neighborhood(g, x)), size))
    return out


# text formats --------------------------------------------------------------


def format_bipartite(g: BipartiteGraph) -> str:
    lines = [f"bip {g.left_count} {g.right_count}"]
    lines.extend(" ".join(map(str, row)) for row in g.adj)
    return "\n".join(lines) + "\n"


def _content_lines(text: str) -> list[str]:
    lines = [ln.strip() for ln in text.splitlines()]
    # blank lines are empty adjacency rows, but trailing ones are just padding
    while lines and not lines[-1]:
        lines.pop()
    return [ln for ln in lines if not ln.startswith("#")]


def parse_bipartite(text: str) -> BipartiteGraph:
    lines = _content_lines(text)
    if not lines:
        raise GraphError("empty graph file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "bip":
        raise GraphError("expected header 'bip <left_count> <right_count>'")
    try:
        left, right = int(head[1]), int(head[2])
        rows = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise GraphError(f"bad integer: {exc}") from None
    rows += [()] * (left - len(rows))
    if len(rows) != left:
        raise GraphError(f"header says {left} left vertices, found {len(rows)} rows")
    return BipartiteGraph.from_lists(rows, right)


def format_hypergraph(hg: Hypergraph) -> str:
    lines = [f"hyp {hg.vertex_count}"]
    lines.extend(" ".join(map(str, e)) for e in hg.edges)
    return "\n".join(lines) + "\n"


def parse_hypergraph(text: str) -> Hypergraph:
    lines = [ln for ln in _content_lines(text) if ln]
    if not lines:
        raise GraphError("empty hypergraph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "hyp":
        raise GraphError("expected header 'hyp <vertex_count>'")
    try:
        count = int(head[1])
        edges = [tuple(int(t) for t in ln.split()) for ln in lines[1:]]
    except ValueError as exc:
        raise GraphError(f"bad integer: {exc}") from None
    return Hypergraph(count, tuple(edges))

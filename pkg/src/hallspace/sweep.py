"""Exhaustive sweeps over small bipartite graphs.

Graphs are generated left vertex by left vertex.  Right vertices are labelled
in order of first appearance, so each new neighbourhood is some already-used
right vertices plus the next few unused ones.  Every graph with at most
``max_right`` right vertices is isomorphic to at least one generated graph
(relabel the right side by first appearance), so a sweep over the generated
graphs covers every isomorphism class.  Isolated right vertices change neither
expansion nor coverability, hence graphs are generated with exactly
``max_right`` right vertices.

Two modes:

``hall1``
    every left set X has |N(X)| >= (2 - eps)|X|  =>  L has a (2,4)-cover.
    A prefix failing expansion is pruned: its failing set stays a failing set
    in every extension.
``hall2``
    |N(L)| >= (2 - eps)|L|, no two degree-3 left vertices with the same
    neighbourhood, and every proper subset of L coverable  =>  L coverable.
    A prefix repeating a degree-3 neighbourhood is dropped; an uncoverable
    prefix is checked but not extended, since it is a proper subset of every
    extension.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator

from .graphs import BipartiteGraph, format_bipartite, is_expander, neighborhood
from .matchings import find_cover_matching, validate_matching

Rows = tuple[tuple[int, ...], ...]


def canonical_rows(
    max_left: int,
    right_count: int,
    degrees=(2, 3),
    keep: Callable[[Rows], bool] | None = None,
    grow: Callable[[Rows], bool] | None = None,
) -> Iterator[Rows]:
    """Yield adjacency prefixes of length 1..max_left in depth-first order.

    ``keep(rows)`` returning False drops a prefix and all of its extensions;
    ``grow(rows)`` returning False yields the prefix but does not extend it.
    """

    def extend(rows: Rows, used: int):
        if len(rows) == max_left:
            return
        for d in sorted(degrees):
            for fresh in range(d + 1):
                if used + fresh > right_count:
                    break
                new = tuple(range(used, used + fresh))
                for old in combinations(range(used), d - fresh):
                    nxt = rows + (old + new,)
                    if keep is not None and not keep(nxt):
                        continue
                    yield nxt
                    if grow is None or grow(nxt):
                        yield from extend(nxt, used + fresh)

    yield from extend((), 0)


def _expands_with_last(rows: Rows, delta: Fraction) -> bool:
    last = len(rows) - 1
    masks = [sum(1 << r for r in row) for row in rows]
    for size in range(1, len(rows) + 1):
        for rest in combinations(range(last), size - 1):
            union = masks[last]
            for i in rest:
                union |= masks[i]
            if union.bit_count() < delta * size:
                return False
    return True


def _distinct_triples(rows: Rows) -> bool:
    last = rows[-1]
    return len(last) != 3 or last not in rows[:-1]


def _coverable(rows: Rows, backend) -> bool:
    g = BipartiteGraph.from_lists(rows, 1 + max(max(r) for r in rows))
    return bool(find_cover_matching(g, range(len(rows)), backend=backend))


@dataclass
class SweepReport:
    mode: str
    epsilon: Fraction
    max_left: int
    max_right: int
    degrees: tuple[int, ...]
    generated: dict[int, int] = field(default_factory=dict)
    hypotheses_met: dict[int, int] = field(default_factory=dict)
    counterexamples: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.errors

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "epsilon": str(self.epsilon),
            "max_left": self.max_left,
            "max_right": self.max_right,
            "degrees": list(self.degrees),
            "generated": {str(k): v for k, v in sorted(self.generated.items())},
            "hypotheses_met": {str(k): v for k, v in sorted(self.hypotheses_met.items())},
            "counterexamples": self.counterexamples,
            "errors": self.errors,
            "seconds": round(self.seconds, 3),
            "ok": self.ok,
        }


def hall_sweep(
    max_left: int = 5,
    max_right: int = 7,
    epsilon=Fraction(1, 24),
    mode: str = "hall1",
    degrees=(2, 3),
    backend: str | None = None,
) -> SweepReport:
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 2:
        raise ValueError("epsilon must lie in (0, 2)")
    delta = 2 - epsilon
    report = SweepReport(mode, epsilon, max_left, max_right, tuple(degrees))
    started = time.perf_counter()
    if mode == "hall1":
        keep, grow = (lambda rows: _expands_with_last(rows, delta)), None
    elif mode == "hall2":
        keep, grow = _distinct_triples, (lambda rows: _coverable(rows, backend))
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")

    for rows in canonical_rows(max_left, max_right, degrees, keep, grow):
        n = len(rows)
        report.generated[n] = report.generated.get(n, 0) + 1
        g = BipartiteGraph(n, max_right, rows)
        everyone = range(n)
        if mode == "hall1":
            if not is_expander(g, n, delta, force=True, backend=backend):
                report.errors.append("generator kept a non-expanding graph:\n" + format_bipartite(g))
                continue
        else:
            if len(neighborhood(g, everyone)) < delta * n:
                continue
            if not all(find_cover_matching(g, [u for u in everyone if u != x], backend=backend) for x in everyone):
                continue
        report.hypotheses_met[n] = report.hypotheses_met.get(n, 0) + 1
        res = find_cover_matching(g, everyone, backend=backend)
        if not res:
            report.counterexamples.append(format_bipartite(g))
        elif validate_matching(g, res.matching):
            report.errors.append("invalid matching returned for:\n" + format_bipartite(g))
    report.seconds = time.perf_counter() - started
    return report

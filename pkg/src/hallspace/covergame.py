"""The Cover game on bipartite graphs and Cover's robust-pair strategy.

Choose either removes a component of the current (2,4)-matching F, or, while F
has fewer components than the budget, challenges a vertex that Cover must then
cover by extending F.  Cover keeps (l(F), r(F)) robust: every left set C
outside l(F) with |l(F)| + |C| <= s can still be covered once l(F) and r(F)
are deleted.  Robustness is always decided by exhaustive search here, never
assumed.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Protocol, Sequence

from . import kernels
from .graphs import (
    DEFAULT_SUBSET_CAP,
    BipartiteGraph,
    CapExceeded,
    induced_remove,
    is_expander,
    vertex_set,
)
from .matchings import Component, HKMatching, _pair_options, validate_matching

EPSILON_LIMIT = Fraction(1, 23)


def _exact(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("use an exact rational, not a float")
    return Fraction(x)


def mu(epsilon, s: int, d: int) -> Fraction:
    """Component budget eps*s/(72d + 2eps) - d, exactly.  May be <= 0."""
    epsilon = _exact(epsilon)
    if not 0 < epsilon < EPSILON_LIMIT:
        raise ValueError("epsilon must lie in (0, 1/23)")
    if s < 1 or d < 1:
        raise ValueError("s and d must be positive")
    return epsilon * s / (72 * d + 2 * epsilon) - d


def smallest_s(epsilon, d: int, target_mu) -> int:
    """Least integer s with mu(epsilon, s, d) >= target_mu."""
    epsilon = _exact(epsilon)
    return max(1, math.ceil((Fraction(target_mu) + d) * (72 * d / epsilon + 2)))


@dataclass(frozen=True)
class GameParams:
    epsilon: Fraction
    s: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", _exact(self.epsilon))
        mu(self.epsilon, self.s, self.d)  # validates

    @property
    def mu(self) -> Fraction:
        return mu(self.epsilon, self.s, self.d)

    @property
    def degenerate(self) -> bool:
        return self.mu <= 0

    def to_json(self) -> dict:
        return {"epsilon": str(self.epsilon), "s": self.s, "d": self.d, "mu": str(self.mu)}


def theorem_preconditions(
    g: BipartiteGraph, params: GameParams, *, cap: int = DEFAULT_SUBSET_CAP, force: bool = False
) -> list[str]:
    """Reasons the game's guarantee does not apply to ``g``; empty when it does."""
    problems = []
    bad = [u for u in range(g.left_count) if g.degree(u) != 3]
    if bad:
        problems.append(f"left vertices without degree 3: {bad}")
    if g.max_right_degree() > params.d:
        problems.append(f"right degree {g.max_right_degree()} exceeds d={params.d}")
    res = is_expander(g, params.s, 2 - params.epsilon / 2, cap=cap, force=force)
    if not res:
        problems.append(f"not an (s, 2-eps/2)-expander: violating set {list(res.violation)}")
    return problems


# robustness -------------------------------------------------------------------


@dataclass(frozen=True)
class RobustResult:
    robust: bool
    counterexample: tuple[int, ...] | None
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __bool__(self):
        return self.robust


def is_robust(
    g: BipartiteGraph,
    a: Iterable[int],
    b: Iterable[int],
    epsilon,
    s: int,
    *,
    cap: int = DEFAULT_SUBSET_CAP,
    force: bool = False,
    backend: str | None = None,
    collector: list | None = None,
    max_c: int | None = None,
) -> RobustResult:
    """Exhaustive robustness check of the pair (a, b).

    On failure the witness is the first uncoverable C by size, then
    lexicographically.  ``max_c`` further limits |C|.  Non-robust results are
    appended to ``collector`` when one is given.
    """
    _exact(epsilon)
    a = vertex_set(a, g.left_count, "left")
    b = vertex_set(b, g.right_count, "right")
    sub = induced_remove(g, a, b)
    n = sub.graph.left_count
    top = min(s - len(a), n)
    if max_c is not None:
        top = min(top, max_c)
    if n > cap and top > 0 and not force:
        raise CapExceeded(f"{n} left vertices outside A exceed cap {cap}; pass force=True")
    hit = None
    if top > 0:
        _, masks, _ = _pair_options(list(sub.graph.adj), 2)
        hit = kernels.first_uncoverable(masks, top, chain=True, backend=backend)
    if hit is None:
        return RobustResult(True, None, a, b)
    witness = tuple(sub.left_new_to_old[i] for i in hit)
    result = RobustResult(False, witness, a, b)
    if collector is not None:
        collector.append(result)
    return result


def enumerate_pi(g: BipartiteGraph, a: Iterable[int], b: Iterable[int], v: int) -> list[Component]:
    """Connected (2,4)-matchings of G minus (a, b) that cover left vertex ``v``.

    Ordered by edge count, then by sorted edge list.
    """
    a, b = set(a), set(b)
    if v in a:
        return []
    radj = g.right_adj()
    nbrs = [r for r in g.adj[v] if r not in b]
    found: set[tuple[tuple[int, int], ...]] = set()
    for pair in combinations(nbrs, 2):
        base = [(v, pair[0]), (v, pair[1])]
        found.add(tuple(sorted(base)))
        for shared in pair:
            other_end = pair[1] if shared == pair[0] else pair[0]
            for u in radj[shared]:
                if u == v or u in a:
                    continue
                for r in g.adj[u]:
                    if r in b or r == shared or r == other_end:
                        continue
                    found.add(tuple(sorted(base + [(u, shared), (u, r)])))
    return [Component.from_edges(e) for e in sorted(found, key=lambda e: (len(e), e))]


# game state ---------------------------------------------------------------------


class MoveError(ValueError):
    """Choose attempted an illegal move."""


@dataclass(frozen=True)
class Move:
    kind: str  # "remove" | "challenge"
    index: int | None = None
    vertex: int | None = None
    side: str | None = None

    @classmethod
    def remove(cls, index: int) -> Move:
        return cls("remove", index=index)

    @classmethod
    def challenge(cls, vertex: int, side: str = "left") -> Move:
        return cls("challenge", vertex=vertex, side=side)

    def to_json(self) -> dict:
        if self.kind == "remove":
            return {"op": "remove", "index": self.index}
        return {"op": "challenge", "side": self.side, "vertex": self.vertex}

    @classmethod
    def from_json(cls, data: dict) -> Move:
        op = data.get("op")
        if op == "remove":
            return cls.remove(int(data["index"]))
        if op == "challenge":
            return cls.challenge(int(data["vertex"]), data.get("side", "left"))
        raise MoveError(f"unknown move {data!r}")


@dataclass(frozen=True)
class GameState:
    """Immutable game position.

    ``max_components`` replaces the budget mu by a fixed integer (experiment
    mode, no guarantee attached).
    """

    graph: BipartiteGraph
    params: GameParams
    matching: HKMatching = field(default_factory=lambda: HKMatching(2, 4))
    move_log: tuple[Move, ...] = ()
    max_components: int | None = None

    @property
    def budget(self) -> Fraction:
        if self.max_components is not None:
            return Fraction(self.max_components)
        return self.params.mu

    @property
    def theorem_mode(self) -> bool:
        return self.max_components is None

    @property
    def degenerate(self) -> bool:
        return self.budget <= 0

    @property
    def component_count(self) -> int:
        return len(self.matching.components)

    def pair(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(sorted(self.matching.left_vertices())), tuple(sorted(self.matching.right_vertices()))

    def size_condition(self) -> bool:
        """(2/eps)|r(F)| + |l(F)| <= s."""
        a, b = self.pair()
        return 2 / self.params.epsilon * len(b) + len(a) <= self.params.s

    def state_hash(self) -> str:
        blob = json.dumps(self.matching.to_json(), separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def check_legal(self, move: Move) -> None:
        if move.kind == "remove":
            if move.index is None or not 0 <= move.index < self.component_count:
                raise MoveError(f"no component {move.index}")
        elif move.kind == "challenge":
            if move.side == "left":
                size = self.graph.left_count
            elif move.side == "right":
                size = self.graph.right_count
            else:
                raise MoveError(f"unknown side {move.side!r}")
            if move.vertex is None or not 0 <= move.vertex < size:
                raise MoveError(f"{move.side} vertex {move.vertex} out of range")
            if self.degenerate:
                raise MoveError(f"degenerate game: budget {self.budget} <= 0, challenges are illegal")
            if self.component_count >= self.budget:
                raise MoveError(f"{self.component_count} components, budget {self.budget}: challenge illegal")
        else:
            raise MoveError(f"unknown move kind {move.kind!r}")


@dataclass(frozen=True)
class Response:
    state: GameState
    outcome: str  # unchanged | removed | extended | cover_loses
    added: tuple[Component, ...] = ()
    robust_checked: bool = False
    invariant_ok: bool | None = None
    detail: str = ""

    @property
    def cover_loses(self) -> bool:
        return self.outcome == "cover_loses"


@dataclass
class _Ctx:
    cap: int
    force: bool
    backend: str | None
    collector: list | None


def _robust(g, a, b, params: GameParams, ctx: _Ctx) -> RobustResult:
    return is_robust(
        g, a, b, params.epsilon, params.s,
        cap=ctx.cap, force=ctx.force, backend=ctx.backend, collector=ctx.collector,
    )


def _cover_left(g, matching: HKMatching, params, v: int, ctx: _Ctx) -> Component | None:
    a = matching.left_vertices()
    b = matching.right_vertices()
    for comp in enumerate_pi(g, a, b, v):
        if _robust(g, a | set(comp.left), b | set(comp.right), params, ctx):
            return comp
    return None


def _membership(state: GameState, ctx: _Ctx) -> tuple[bool, str]:
    problems = validate_matching(state.graph, state.matching)
    if problems:
        return False, "; ".join(problems)
    a, b = state.pair()
    res = _robust(state.graph, a, b, state.params, ctx)
    if not res:
        return False, f"pair not robust: uncoverable C={list(res.counterexample)}"
    if not state.size_condition():
        return False, "size condition (2/eps)|r(F)| + |l(F)| <= s fails"
    return True, ""


def cover_respond(
    state: GameState,
    move: Move,
    *,
    check: bool = True,
    cap: int = DEFAULT_SUBSET_CAP,
    force: bool = False,
    backend: str | None = None,
    collector: list | None = None,
) -> Response:
    """Cover's answer to ``move``; raises MoveError on an illegal move.

    With ``check`` the new matching is re-verified exhaustively: valid, robust
    and within the size condition.
    """
    state.check_legal(move)
    ctx = _Ctx(cap, force, backend, collector)
    g, params = state.graph, state.params
    logged = state.move_log + (move,)
    added: list[Component] = []

    if move.kind == "remove":
        new = replace(state, matching=state.matching.without(move.index), move_log=logged)
        outcome = "removed"
    elif (move.side == "left" and move.vertex in state.matching.left_vertices()) or (
        move.side == "right" and move.vertex in state.matching.right_vertices()
    ):
        new = replace(state, move_log=logged)
        outcome = "unchanged"
    else:
        matching = state.matching
        targets = [move.vertex] if move.side == "left" else [
            u for u in g.right_adj()[move.vertex] if u not in matching.left_vertices()
        ]
        for u in targets:
            if u in matching.left_vertices():
                continue
            comp = _cover_left(g, matching, params, u, ctx)
            if comp is None:
                return Response(replace(state, move_log=logged), "cover_loses",
                                detail=f"no robust extension covers left vertex {u}")
            added.append(comp)
            matching = matching.extended([comp])
        if move.side == "right" and move.vertex not in matching.right_vertices():
            comp = Component.isolated(move.vertex)
            added.append(comp)
            matching = matching.extended([comp])
        new = replace(state, matching=matching, move_log=logged)
        outcome = "extended"

    if not check:
        return Response(new, outcome, tuple(added))
    ok, detail = _membership(new, ctx)
    return Response(new, outcome, tuple(added), robust_checked=True, invariant_ok=ok, detail=detail)


# adversaries ------------------------------------------------------------------


class Adversary(Protocol):
    def next_move(self, state: GameState) -> Move | None: ...


class ScriptedAdversary:
    def __init__(self, moves: Sequence[Move]):
        self._moves = list(moves)
        self._pos = 0

    @classmethod
    def from_json(cls, data: list[dict]) -> ScriptedAdversary:
        return cls([Move.from_json(m) for m in data])

    def next_move(self, state):
        if self._pos >= len(self._moves):
            return None
        self._pos += 1
        return self._moves[self._pos - 1]


class RandomAdversary:
    """Removes a random component a third of the time, or always at the
    budget; otherwise challenges a uniformly random vertex."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def next_move(self, state):
        count = state.component_count
        if state.degenerate and count == 0:
            return None
        if count and (count >= state.budget or self.rng.randrange(3) == 0):
            return Move.remove(self.rng.randrange(count))
        g = state.graph
        pick = self.rng.randrange(g.left_count + g.right_count)
        if pick < g.left_count:
            return Move.challenge(pick, "left")
        return Move.challenge(pick - g.left_count, "right")


class GreedyAdversary:
    """Challenges the uncovered vertex most entangled with the current
    matching; at the budget it drops the oldest component."""

    def next_move(self, state):
        count = state.component_count
        if state.degenerate and count == 0:
            return None
        if count >= state.budget:
            return Move.remove(0)
        g = state.graph
        a = state.matching.left_vertices()
        b = state.matching.right_vertices()
        radj = g.right_adj()
        cands = [
            ((sum(r in b for r in g.adj[u]), 0, -u), Move.challenge(u, "left"))
            for u in range(g.left_count) if u not in a
        ]
        cands += [
            ((sum(u not in a for u in radj[r]), 1, -r), Move.challenge(r, "right"))
            for r in range(g.right_count) if r not in b
        ]
        return max(cands, key=lambda c: c[0])[1] if cands else None


# play ---------------------------------------------------------------------------


@dataclass
class Transcript:
    records: list[dict]
    final: GameState
    stopped: str

    @property
    def cover_lost(self) -> bool:
        return self.stopped == "cover_loses"

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


def play(
    g: BipartiteGraph,
    params: GameParams,
    adversary: Adversary,
    *,
    max_moves: int = 500,
    max_components: int | None = None,
    check: bool = True,
    cap: int = DEFAULT_SUBSET_CAP,
    force: bool = False,
    backend: str | None = None,
    collector: list | None = None,
) -> Transcript:
    state = GameState(g, params, max_components=max_components)
    mode = "theorem" if state.theorem_mode else "experiment (fixed component budget)"
    first = {
        "step": 0, "move": None, "response": "initial", "component_count": 0,
        "robust_checked": False, "state_hash": state.state_hash(),
        "mode": mode, "budget": str(state.budget),
    }
    if state.degenerate:
        first["note"] = f"budget {state.budget} <= 0: degenerate game, challenges are illegal"
    records = [first]
    stopped = "move budget exhausted"
    for step in range(1, max_moves + 1):
        move = adversary.next_move(state)
        if move is None:
            stopped = "adversary finished"
            break
        rec = {"step": step, "move": move.to_json()}
        try:
            resp = cover_respond(state, move, check=check, cap=cap, force=force,
                                 backend=backend, collector=collector)
        except MoveError as exc:
            rec.update(response=f"illegal: {exc}", component_count=state.component_count,
                       robust_checked=False, state_hash=state.state_hash())
            records.append(rec)
            continue
        state = resp.state
        rec.update(response=resp.outcome, component_count=state.component_count,
                   robust_checked=resp.robust_checked, state_hash=state.state_hash())
        if resp.added:
            rec["added"] = [c.to_json() for c in resp.added]
        if resp.invariant_ok is not None:
            rec["invariant_ok"] = resp.invariant_ok
        if resp.detail:
            rec["detail"] = resp.detail
        records.append(rec)
        if resp.cover_loses:
            stopped = "cover_loses"
            break
    return Transcript(records, state, stopped)

"""Flippable product families, k-winning strategies and r-free families.

A (2,4)-matching F in the adjacency graph of a CNF yields one factor per
component: two complementary assignments to the component's variables that
both satisfy every clause of the component.  Cover's strategy in the cover
game therefore induces a strategy, i.e. a family of such products.  The game
drives the strategy lazily; for small instances the whole family is
enumerated and the defining properties are checked exhaustively.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator

from .cnf import (
    STAR,
    Clause,
    Cnf,
    PartialAssignment,
    PiecewiseAssignment,
    Polynomial,
    adjacency_graph,
    all_assignments,
    boolean_axioms,
    falsifies,
    satisfies,
    tr_clause,
)
from .covergame import GameParams, GameState, Move, cover_respond
from .graphs import CapExceeded
from .matchings import Component, HKMatching, validate_matching

Factor = frozenset  # frozenset[PartialAssignment], all over one domain
STAR_FACTOR: Factor = frozenset({STAR})


class StrategyError(ValueError):
    """A family or strategy cannot be built as requested."""


def factor_domain(factor: Factor) -> frozenset[int]:
    return next(iter(factor)).domain()


def _factor_key(factor: Factor):
    return tuple(sorted(a.items for a in factor))


@dataclass(frozen=True)
class ProductFamily:
    """H_1 x ... x H_t over pairwise disjoint domains."""

    factors: tuple[Factor, ...] = ()

    def __post_init__(self):
        factors = tuple(frozenset(f) for f in self.factors)
        seen: set[int] = set()
        for f in factors:
            if not f:
                raise StrategyError("empty factor")
            doms = {a.domain() for a in f}
            if len(doms) != 1:
                raise StrategyError("factor members disagree on their domain")
            dom = doms.pop()
            if seen & dom:
                raise StrategyError("factor domains overlap")
            seen |= dom
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self) -> int:
        return sum(1 for f in self.factors if f != STAR_FACTOR)

    def key(self) -> frozenset[Factor]:
        """Identity up to factor order and {*} factors."""
        return frozenset(f for f in self.factors if f != STAR_FACTOR)

    def domain(self) -> frozenset[int]:
        return frozenset(v for f in self.factors for a in f for v in a.domain())

    def members(self) -> Iterator[PartialAssignment]:
        if not self.factors:
            yield STAR
            return
        for pick in product(*(sorted(f, key=lambda a: a.items) for f in self.factors)):
            out = STAR
            for a in pick:
                out = out.union(a)
            yield out

    def restrict(self, keep: Iterable[int]) -> ProductFamily:
        keep = set(keep)
        return ProductFamily(tuple(f for i, f in enumerate(self.factors) if i in keep))

    def merge(self, other: ProductFamily) -> ProductFamily:
        if self.domain() & other.domain():
            raise StrategyError("merge of overlapping domains")
        return ProductFamily(self.factors + other.factors)

    def is_restriction_of(self, other: ProductFamily) -> bool:
        return self.key() <= other.key()

    def is_flippable(self) -> bool:
        members = list(self.members())
        return all(
            {a.get(v) for a in members} == {0, 1} for v in self.domain()
        )

    def models(self, p: Polynomial) -> bool:
        """Every member sends p to 0."""
        return all(p.substitute(a).is_zero() for a in self.members())

    def to_json(self) -> list:
        out = [sorted((a.to_json() for a in f), key=lambda d: sorted(d.items())) for f in self.factors]
        return sorted(out, key=lambda f: sorted(f[0]))


# factors from matchings -------------------------------------------------------------


def component_factor(clauses: list[Clause], variables: Iterable[int]) -> Factor:
    """Two complementary assignments to ``variables`` that both satisfy every
    clause; the first such pair in lexicographic order."""
    variables = sorted(set(variables))
    if not variables:
        raise StrategyError("component without variables")
    for alpha in all_assignments(variables):
        beta = PartialAssignment(tuple((v, 1 - b) for v, b in alpha.items))
        if all(satisfies(alpha, c) and satisfies(beta, c) for c in clauses):
            return frozenset({alpha, beta})
    raise StrategyError(f"no flippable pair on variables {variables} for clauses {clauses}")


def flippable_from_matching(phi: Cnf, f: HKMatching) -> ProductFamily:
    adj = adjacency_graph(phi)
    problems = validate_matching(adj.graph, f)
    if problems:
        raise StrategyError("invalid matching: " + "; ".join(problems))
    factors = []
    for comp in f.components:
        clauses = [phi.clauses[u] for u in comp.left]
        factors.append(component_factor(clauses, (r + 1 for r in comp.right)))
    return ProductFamily(tuple(factors))


# strategies -------------------------------------------------------------------------


def _matching_key(m: HKMatching) -> frozenset[Component]:
    return frozenset(m.components)


@dataclass
class GameBackedStrategy:
    """The strategy Cover's play induces; k = ceil(budget) when the budget is positive.

    Queries operate on game states.  ``extend`` challenges the clause's left
    vertex, or the variable's right vertex for a boolean axiom; ``restrict``
    removes components.
    """

    phi: Cnf
    params: GameParams
    max_components: int | None = None
    check: bool = False
    backend: str | None = None
    force: bool = False

    def __post_init__(self):
        self.graph = adjacency_graph(self.phi).graph
        self._tr = {tr_clause(c): ("clause", i) for i, c in enumerate(self.phi.clauses)}
        for v in range(1, self.phi.variable_count + 1):
            for ax in boolean_axioms(v):
                self._tr.setdefault(ax, ("axiom", v))

    @property
    def budget(self) -> Fraction:
        return self.initial().budget

    @property
    def k(self) -> int:
        return max(0, math.ceil(self.budget))

    @property
    def usable(self) -> bool:
        return self.k > 0

    def initial(self) -> GameState:
        return GameState(self.graph, self.params, max_components=self.max_components)

    def family(self, state: GameState) -> ProductFamily:
        return flippable_from_matching(self.phi, state.matching)

    def _respond(self, state: GameState, move: Move) -> GameState:
        resp = cover_respond(state, move, check=self.check, backend=self.backend, force=self.force)
        if resp.cover_loses:
            raise StrategyError(f"Cover cannot answer {move.to_json()}: {resp.detail}")
        return resp.state

    def extend(self, state: GameState, target) -> GameState:
        """``target`` is ("clause", index), ("axiom", variable) or a polynomial of tr(phi)."""
        if isinstance(target, Polynomial):
            if target not in self._tr:
                raise StrategyError(f"{target} is not in tr(phi)")
            target = self._tr[target]
        kind, x = target
        if kind == "clause":
            return self._respond(state, Move.challenge(x, "left"))
        if kind == "axiom":
            return self._respond(state, Move.challenge(x - 1, "right"))
        raise StrategyError(f"unknown query {target!r}")

    def restrict(self, state: GameState, keep: Iterable[int]) -> GameState:
        keep = set(keep)
        for i in reversed(range(state.component_count)):
            if i not in keep:
                state = self._respond(state, Move.remove(i))
        return state

    def explicit(self, cap: int = 20000) -> ExplicitStrategy:
        """All families reachable by play; raises CapExceeded beyond ``cap`` positions."""
        start = self.initial()
        seen = {_matching_key(start.matching): start}
        queue = deque([start])
        g = self.graph
        while queue:
            state = queue.popleft()
            moves = [Move.remove(i) for i in range(state.component_count)]
            if state.component_count < state.budget:
                moves += [Move.challenge(u, "left") for u in range(g.left_count)]
                moves += [Move.challenge(r, "right") for r in range(g.right_count)]
            for move in moves:
                nxt = self._respond(state, move)
                key = _matching_key(nxt.matching)
                if key not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"more than {cap} reachable positions")
                    seen[key] = nxt
                    queue.append(nxt)
        families = {}
        for state in seen.values():
            fam = self.family(state)
            families.setdefault(fam.key(), fam)
        return ExplicitStrategy(list(families.values()), len(seen))


def winning_strategy_from_game(
    phi: Cnf, params: GameParams, max_components: int | None = None, **kw
) -> GameBackedStrategy:
    return GameBackedStrategy(phi, params, max_components, **kw)


@dataclass
class ExplicitStrategy:
    families: list[ProductFamily]
    positions: int = 0

    def __post_init__(self):
        self.index = {f.key(): f for f in self.families}
        self.up: dict[frozenset, list[frozenset]] = {}
        for key in self.index:
            for fac in key:
                self.up.setdefault(key - {fac}, []).append(key)

    def __contains__(self, fam: ProductFamily) -> bool:
        return fam.key() in self.index

    def to_json(self) -> list:
        return [f.to_json() for f in sorted(self.families, key=lambda f: (f.rank, str(f.to_json())))]


@dataclass
class Report:
    ok: bool
    checks: dict = field(default_factory=dict)
    violation: str | None = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "violation": self.violation}


def _extension_witness(strategy: ExplicitStrategy, key: frozenset, p: Polynomial) -> bool:
    """Some family of the strategy containing ``key`` models p.

    With restriction closure established, such a family can be cut down to key
    plus factors touching vars(p), each added one at a time inside the family.
    """
    touch = p.variables()
    frontier = [key]
    seen = {key}
    for _ in range(len(touch) + 1):
        nxt = []
        for k in frontier:
            if strategy.index[k].models(p):
                return True
            for bigger in strategy.up.get(k, ()):
                (fac,) = bigger - k
                if bigger not in seen and factor_domain(fac) & touch:
                    seen.add(bigger)
                    nxt.append(bigger)
        frontier = nxt
    return False


def verify_winning_strategy(strategy: ExplicitStrategy, polys: list[Polynomial], k: int) -> Report:
    checks = {"families": len(strategy.families), "k": k, "polynomials": len(polys)}
    if frozenset() not in strategy.index:
        return Report(False, checks, "{*} is not in the strategy")
    for fam in strategy.families:
        if not fam.is_flippable():
            return Report(False, checks, f"family {fam.to_json()} is not flippable")
        key = fam.key()
        for fac in key:
            if key - {fac} not in strategy.index:
                return Report(False, checks, f"restriction of {fam.to_json()} dropping {sorted(factor_domain(fac))} missing")
    extension_checks = 0
    for fam in sorted(strategy.families, key=lambda f: (f.rank, str(f.to_json()))):
        if fam.rank >= k:
            continue
        for p in polys:
            extension_checks += 1
            if not _extension_witness(strategy, fam.key(), p):
                checks["extension_checks"] = extension_checks
                return Report(False, checks, f"family {fam.to_json()} (rank {fam.rank}) has no extension modelling {p}")
    checks["extension_checks"] = extension_checks
    return Report(True, checks)


# free families ------------------------------------------------------------------------


@dataclass
class FreeFamily:
    """Piecewise assignments: one member from each factor of a strategy family
    of rank at most r."""

    strategy: ExplicitStrategy
    r: int

    def members(self) -> set[PiecewiseAssignment]:
        out = set()
        for fam in self.strategy.families:
            if fam.rank > self.r:
                continue
            factors = [sorted(f, key=lambda a: a.items) for f in fam.key()]
            for pick in product(*factors):
                out.add(PiecewiseAssignment(frozenset(pick)))
        return out


def free_family_from_strategy(strategy: ExplicitStrategy, k: int) -> FreeFamily:
    return FreeFamily(strategy, k - 1)


def verify_free_family(ff: FreeFamily, phi: Cnf, r: int | None = None, cap: int = 200000) -> Report:
    r = ff.r if r is None else r
    members = ff.members()
    if len(members) > cap:
        raise CapExceeded(f"{len(members)} members exceed cap {cap}")
    checks = {"members": len(members), "r": r}
    if not members:
        return Report(False, checks, "family is empty")
    for alpha in members:
        whole = alpha.assignment()
        for i, c in enumerate(phi.clauses):
            if falsifies(whole, c):
                return Report(False, checks, f"consistency: {alpha.to_json()} falsifies clause {i}")
    up: dict[frozenset, list[PiecewiseAssignment]] = {}
    for alpha in members:
        for piece in alpha.pieces:
            smaller = PiecewiseAssignment(alpha.pieces - {piece})
            if smaller not in members:
                return Report(False, checks, f"retraction: {alpha.to_json()} minus a piece is missing")
            up.setdefault(smaller.pieces, []).append(alpha)
    variables = range(1, phi.variable_count + 1)
    for alpha in sorted(members, key=lambda a: (a.norm, str(a.to_json()))):
        if alpha.norm >= r:
            continue
        dom = alpha.domain()
        bigger = up.get(alpha.pieces, [])
        for x in variables:
            if x in dom:
                continue
            got = {b.assignment().get(x) for b in bigger}
            for want in (0, 1):
                if want not in got:
                    return Report(False, checks, f"extension: {alpha.to_json()} cannot set x{x}={want}")
    return Report(True, checks)


# bounds ---------------------------------------------------------------------------------


def _brute_unsat(phi: Cnf, limit: int = 20) -> bool | None:
    if phi.variable_count > limit:
        return None
    for alpha in all_assignments(range(1, phi.variable_count + 1)):
        if not any(falsifies(alpha, c) for c in phi.clauses):
            return False
    return True


@dataclass
class BoundReport:
    mu: Fraction
    mode: str
    monomial_space: Fraction | None
    wide_clauses: Fraction | None
    total_space: Fraction | None
    unsatisfiable: bool | None
    derivation: list[str]

    def to_json(self) -> dict:
        fmt = lambda x: None if x is None else str(x)  # noqa: E731
        return {
            "mu": str(self.mu),
            "mode": self.mode,
            "monomial_space_at_least": fmt(self.monomial_space),
            "clauses_of_width_at_least": fmt(self.wide_clauses),
            "total_space_at_least": fmt(self.total_space),
            "unsatisfiable": self.unsatisfiable,
            "derivation": self.derivation,
        }

    def text(self) -> str:
        lines = [f"mu = {self.mu} ({self.mode} mode)"]
        if self.unsatisfiable is False:
            lines.append("formula is satisfiable: refutation bounds do not apply")
        lines.append("monomial space (PCR) >= " + ("vacuous" if self.monomial_space is None else str(self.monomial_space)))
        lines.append(
            "some RES configuration has >= "
            + ("vacuous" if self.wide_clauses is None else f"{self.wide_clauses} clauses of width >= {self.wide_clauses}")
        )
        lines.append("total space (RES) >= " + ("vacuous" if self.total_space is None else str(self.total_space)))
        lines += ["  " + d for d in self.derivation]
        return "\n".join(lines) + "\n"


def lower_bound_report(phi: Cnf, mu, mode: str = "claim", evidence: str | None = None) -> BoundReport:
    """Space bounds implied by a mu-winning strategy for tr(phi).

    ``mode`` is "verified" when the strategy was checked exhaustively
    (``evidence`` says how) and "claim" when mu is taken on trust.
    """
    if mode not in ("claim", "verified"):
        raise ValueError("mode must be 'claim' or 'verified'")
    mu = Fraction(mu)
    r = mu - 1
    chain = [
        f"mu source: {'exhaustively verified strategy' if mode == 'verified' else 'claimed, not verified'}"
        + (f" ({evidence})" if evidence else ""),
        "Cover wins the game with budget mu -> mu-winning strategy for tr(phi)",
        "k-winning strategy -> every PCR refutation has monomial space >= k/4",
        "k-winning strategy for tr(phi) -> (k-1)-free family for phi",
        "r-free family -> some RES configuration holds >= r/2 clauses of width >= r/2,"
        " so total space >= r^2/4",
    ]
    return BoundReport(
        mu=mu,
        mode=mode,
        monomial_space=mu / 4 if mu > 0 else None,
        wide_clauses=r / 2 if r > 0 else None,
        total_space=r * r / 4 if r > 0 else None,
        unsatisfiable=_brute_unsat(phi),
        derivation=chain,
    )

"""CNFs, random 3-CNFs, adjacency graphs and the twin-variable polynomial encoding.

Variables are 1-based (as in DIMACS); a literal is a nonzero signed variable.
Polynomials live over the rationals in twin variables x and ~x (written
``x3`` and ``~x3``).  A clause C is encoded as the product of ~x over its
positive literals and x over its negative ones, so an assignment satisfies C
exactly when the product evaluates to 0.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .graphs import BipartiteGraph

Clause = tuple[int, ...]


class CnfError(ValueError):
    """Malformed CNF, DIMACS text or polynomial."""


def _check_clause(clause: Iterable[int], variable_count: int, where: str) -> Clause:
    clause = tuple(int(l) for l in clause)
    seen = set()
    for lit in clause:
        if lit == 0:
            raise CnfError(f"{where}: literal 0")
        if abs(lit) > variable_count:
            raise CnfError(f"{where}: variable {abs(lit)} exceeds {variable_count}")
        if abs(lit) in seen:
            raise CnfError(f"{where}: variable {abs(lit)} occurs twice")
        seen.add(abs(lit))
    return clause


@dataclass(frozen=True)
class Cnf:
    variable_count: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.variable_count < 0:
            raise CnfError("variable_count must be nonnegative")
        clauses = tuple(
            _check_clause(c, self.variable_count, f"clause {i}") for i, c in enumerate(self.clauses)
        )
        object.__setattr__(self, "clauses", clauses)

    def variables(self) -> list[int]:
        return sorted({abs(l) for c in self.clauses for l in c})

    def max_width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)


def random_3cnf(n: int, delta, seed: int | None = None, rng: random.Random | None = None) -> Cnf:
    """floor(delta*n) clauses, each uniform over 3 distinct variables and 8 sign
    patterns, drawn independently.  Pass ``seed`` or an explicit ``rng``."""
    if n < 3:
        raise CnfError("need n >= 3")
    if isinstance(delta, float):
        raise TypeError("use an exact rational, not a float")
    if rng is None:
        if seed is None:
            raise ValueError("a seed or an rng is required")
        rng = random.Random(seed)
    m = math.floor(Fraction(delta) * n)
    clauses = []
    for _ in range(m):
        variables = sorted(rng.sample(range(1, n + 1), 3))
        clauses.append(tuple(v if rng.getrandbits(1) else -v for v in variables))
    return Cnf(n, tuple(clauses))


def format_clause(clause: Clause) -> str:
    if not clause:
        return "⊥"
    return " ∨ ".join(f"x{l}" if l > 0 else f"¬x{-l}" for l in clause)


@dataclass(frozen=True)
class AdjacencyGraph:
    """Left = clauses, right = variables (right index = variable - 1)."""

    graph: BipartiteGraph
    clause_names: tuple[str, ...]
    variable_names: tuple[str, ...]


def adjacency_graph(phi: Cnf) -> AdjacencyGraph:
    rows = [tuple(sorted(abs(l) - 1 for l in c)) for c in phi.clauses]
    g = BipartiteGraph(len(rows), phi.variable_count, tuple(rows))
    names = tuple(f"C{i}" for i in range(len(rows)))
    return AdjacencyGraph(g, names, tuple(f"x{v}" for v in range(1, phi.variable_count + 1)))


# DIMACS ---------------------------------------------------------------------------


def dimacs_write(phi: Cnf) -> str:
    lines = [f"p cnf {phi.variable_count} {len(phi.clauses)}"]
    lines += [" ".join(map(str, c + (0,))) for c in phi.clauses]
    return "\n".join(lines) + "\n"


def dimacs_read(text: str) -> Cnf:
    header = None
    tokens: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise CnfError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if header is None:
            raise CnfError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                tokens.append(int(tok))
            except ValueError:
                raise CnfError(f"line {lineno}: bad literal {tok!r}") from None
    if header is None:
        raise CnfError("missing 'p cnf' header")
    if tokens and tokens[-1] != 0:
        raise CnfError("last clause is not terminated by 0")
    clauses, current = [], []
    for tok in tokens:
        if tok == 0:
            clauses.append(tuple(current))
            current = []
        else:
            current.append(tok)
    variables, count = header
    if len(clauses) != count:
        raise CnfError(f"header announces {count} clauses, found {len(clauses)}")
    return Cnf(variables, tuple(clauses))


# assignments ----------------------------------------------------------------------


@dataclass(frozen=True)
class PartialAssignment:
    """Map variable -> {0, 1}; the twin ~x always reads 1 - value(x)."""

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        items = tuple(sorted((int(v), int(b)) for v, b in self.items))
        if len({v for v, _ in items}) != len(items):
            raise CnfError("variable assigned twice")
        for v, b in items:
            if b not in (0, 1):
                raise CnfError(f"value of x{v} must be 0 or 1")
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, values: Mapping[int, int]) -> PartialAssignment:
        return cls(tuple(values.items()))

    @property
    def values(self) -> dict[int, int]:
        return dict(self.items)

    def domain(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.items)

    def __len__(self):
        return len(self.items)

    def get(self, var: int) -> int | None:
        return self.values.get(var)

    def literal(self, lit: int) -> int | None:
        b = self.get(abs(lit))
        if b is None:
            return None
        return b if lit > 0 else 1 - b

    def union(self, other: PartialAssignment) -> PartialAssignment:
        if self.domain() & other.domain():
            raise CnfError("domains overlap")
        return PartialAssignment(self.items + other.items)

    def restrict(self, variables: Iterable[int]) -> PartialAssignment:
        keep = set(variables)
        return PartialAssignment(tuple((v, b) for v, b in self.items if v in keep))

    def to_json(self) -> dict:
        return {str(v): b for v, b in self.items}

    @classmethod
    def from_json(cls, data: Mapping[str, int]) -> PartialAssignment:
        return cls(tuple((int(v), int(b)) for v, b in data.items()))


STAR = PartialAssignment()


@dataclass(frozen=True)
class PiecewiseAssignment:
    """A set of nonempty partial assignments with pairwise disjoint domains."""

    pieces: frozenset[PartialAssignment] = frozenset()

    def __post_init__(self):
        pieces = frozenset(self.pieces)
        seen: set[int] = set()
        for p in pieces:
            if not len(p):
                raise CnfError("empty piece")
            if seen & p.domain():
                raise CnfError("pieces overlap")
            seen |= p.domain()
        object.__setattr__(self, "pieces", pieces)

    @property
    def norm(self) -> int:
        return len(self.pieces)

    def domain(self) -> frozenset[int]:
        return frozenset(v for p in self.pieces for v in p.domain())

    def assignment(self) -> PartialAssignment:
        return PartialAssignment(tuple(item for p in self.pieces for item in p.items))

    def is_subset_of(self, other: PiecewiseAssignment) -> bool:
        return self.pieces <= other.pieces

    def to_json(self) -> list:
        return sorted((p.to_json() for p in self.pieces), key=lambda d: sorted(d.items()))


# polynomials --------------------------------------------------------------------

Monomial = tuple[tuple[int, bool, int], ...]  # (variable, barred, exponent), sorted
ONE: Monomial = ()


def _monomial(factors: Iterable[tuple[int, bool, int]]) -> Monomial:
    acc: dict[tuple[int, bool], int] = {}
    for v, barred, e in factors:
        if v < 1 or e < 1:
            raise CnfError("bad monomial factor")
        acc[(v, bool(barred))] = acc.get((v, bool(barred)), 0) + e
    return tuple(sorted((v, b, e) for (v, b), e in acc.items()))


def _twin_name(v: int, barred: bool) -> str:
    return f"~x{v}" if barred else f"x{v}"


def parse_twin(name: str) -> tuple[int, bool]:
    barred = name.startswith("~")
    body = name[1:] if barred else name
    if not body.startswith("x") or not body[1:].isdigit() or int(body[1:]) < 1:
        raise CnfError(f"bad variable name {name!r}")
    return int(body[1:]), barred


@dataclass(frozen=True)
class Polynomial:
    """Exact rational polynomial in twin variables; no zero coefficients."""

    terms: tuple[tuple[Monomial, Fraction], ...] = ()

    def __post_init__(self):
        acc: dict[Monomial, Fraction] = {}
        for mono, c in self.terms:
            mono = _monomial(mono)
            acc[mono] = acc.get(mono, Fraction(0)) + Fraction(c)
        object.__setattr__(self, "terms", tuple(sorted((m, c) for m, c in acc.items() if c != 0)))

    @classmethod
    def from_dict(cls, terms: Mapping[Monomial, Fraction]) -> Polynomial:
        return cls(tuple(terms.items()))

    @classmethod
    def constant(cls, c) -> Polynomial:
        return cls(((ONE, Fraction(c)),))

    @classmethod
    def var(cls, v: int, barred: bool = False) -> Polynomial:
        return cls(((((v, barred, 1),), Fraction(1)),))

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def monomials(self) -> frozenset[Monomial]:
        return frozenset(m for m, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == ONE for m, _ in self.terms)

    def constant_value(self) -> Fraction:
        return self.as_dict().get(ONE, Fraction(0))

    def variables(self) -> frozenset[int]:
        return frozenset(v for m, _ in self.terms for v, _, _ in m)

    def degree(self) -> int:
        return max((sum(e for _, _, e in m) for m, _ in self.terms), default=0)

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial(self.terms + other.terms)

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def scale(self, c) -> Polynomial:
        c = Fraction(c)
        return Polynomial(tuple((m, c * k) for m, k in self.terms))

    def __mul__(self, other: Polynomial) -> Polynomial:
        return Polynomial(tuple(
            (m1 + m2, c1 * c2) for m1, c1 in self.terms for m2, c2 in other.terms
        ))

    def times_var(self, v: int, barred: bool = False) -> Polynomial:
        return self * Polynomial.var(v, barred)

    def substitute(self, alpha: PartialAssignment) -> Polynomial:
        """Replace x by alpha(x) and ~x by 1 - alpha(x) on dom(alpha)."""
        values = alpha.values
        out = []
        for mono, c in self.terms:
            keep = []
            for v, barred, e in mono:
                if v in values:
                    if (1 - values[v] if barred else values[v]) == 0:
                        c = Fraction(0)
                        break
                else:
                    keep.append((v, barred, e))
            if c:
                out.append((tuple(keep), c))
        return Polynomial(tuple(out))

    def reduce_boolean(self) -> Polynomial:
        """Apply x^k -> x and ~x -> 1 - x; the result is multilinear in plain variables."""
        total = Polynomial()
        for mono, c in self.terms:
            term = Polynomial.constant(c)
            for v, barred, _ in mono:
                factor = Polynomial.constant(1) - Polynomial.var(v) if barred else Polynomial.var(v)
                term = _multilinear(term * factor)
            total = total + term
        return total

    def reduce_mod(self, p: int) -> Polynomial:
        """Coefficients reduced into 0..p-1 (p prime); rational denominators are inverted mod p."""
        out = []
        for mono, c in self.terms:
            if c.denominator % p == 0:
                raise CnfError(f"denominator divisible by {p}")
            out.append((mono, Fraction(c.numerator * pow(c.denominator, -1, p) % p)))
        return Polynomial(tuple(out))

    def to_json(self) -> list:
        return [
            {
                "coeff": f"{c.numerator}/{c.denominator}",
                "monomial": [[f"x{v}", "barred" if b else "plain", e] for v, b, e in m],
            }
            for m, c in self.terms
        ]

    @classmethod
    def from_json(cls, data: list) -> Polynomial:
        terms = []
        for t in data:
            c = Fraction(t["coeff"])
            mono = []
            for name, polarity, e in t["monomial"]:
                v, _ = parse_twin(name)
                if polarity not in ("plain", "barred"):
                    raise CnfError(f"bad polarity {polarity!r}")
                mono.append((v, polarity == "barred", int(e)))
            terms.append((tuple(mono), c))
        return cls(tuple(terms))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            body = "*".join(_twin_name(v, b) + (f"^{e}" if e > 1 else "") for v, b, e in m)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def _multilinear(p: Polynomial) -> Polynomial:
    return Polynomial(tuple((tuple((v, b, 1) for v, b, _ in m), c) for m, c in p.terms))


def tr_clause(clause: Clause) -> Polynomial:
    mono = tuple((abs(l), l > 0, 1) for l in clause)
    return Polynomial(((mono, Fraction(1)),))


def boolean_axioms(v: int) -> tuple[Polynomial, Polynomial]:
    x, xb, one = Polynomial.var(v), Polynomial.var(v, True), Polynomial.constant(1)
    return x * x - x, x + xb - one


def tr_encode(phi: Cnf) -> list[Polynomial]:
    """One product per clause, then x^2 - x and x + ~x - 1 per variable."""
    out = [tr_clause(c) for c in phi.clauses]
    for v in range(1, phi.variable_count + 1):
        out.extend(boolean_axioms(v))
    return out


# substitution -----------------------------------------------------------------------


@dataclass(frozen=True)
class Applied:
    result: object
    status: str  # satisfied | falsified | undetermined


def _apply_clause(clause: Clause, alpha: PartialAssignment) -> Clause | None:
    """None when satisfied, otherwise the clause minus falsified literals."""
    rest = []
    for lit in clause:
        val = alpha.literal(lit)
        if val == 1:
            return None
        if val is None:
            rest.append(lit)
    return tuple(rest)


def apply_assignment(target, alpha: PartialAssignment) -> Applied:
    if isinstance(target, Polynomial):
        out = target.substitute(alpha)
        if out.is_zero():
            return Applied(out, "satisfied")
        if out.is_constant():
            return Applied(out, "falsified")
        return Applied(out, "undetermined")
    if isinstance(target, Cnf):
        reduced = [r for r in (_apply_clause(c, alpha) for c in target.clauses) if r is not None]
        out = Cnf(target.variable_count, tuple(reduced))
        if any(not c for c in reduced):
            return Applied(out, "falsified")
        return Applied(out, "undetermined" if reduced else "satisfied")
    clause = tuple(target)
    r = _apply_clause(clause, alpha)
    if r is None:
        return Applied(None, "satisfied")
    return Applied(r, "undetermined" if r else "falsified")


def satisfies(alpha: PartialAssignment, clause: Clause) -> bool:
    return any(alpha.literal(l) == 1 for l in clause)


def falsifies(alpha: PartialAssignment, clause: Clause) -> bool:
    return all(alpha.literal(l) == 0 for l in clause)


def all_assignments(variables: Iterable[int]) -> Iterator[PartialAssignment]:
    variables = sorted(set(variables))
    for bits in range(1 << len(variables)):
        yield PartialAssignment(tuple((v, (bits >> i) & 1) for i, v in enumerate(variables)))

import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hallspace import kernels
from hallspace.cnf import Cnf, Polynomial, adjacency_graph, random_3cnf, tr_encode
from hallspace.covergame import GameParams, smallest_s, theorem_preconditions
from hallspace.graphs import BipartiteGraph, random_left_regular
from hallspace.proofspace import canonical

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

EPS = Fraction(1, 24)
BACKENDS = kernels.available_backends()


@st.composite
def bipartite_graphs(draw, max_left=5, max_right=7, degrees=(1, 2, 3)):
    right = draw(st.integers(min_value=1, max_value=max_right))
    left = draw(st.integers(min_value=0, max_value=max_left))
    rows = []
    for _ in range(left):
        d = draw(st.sampled_from([x for x in degrees if x <= right] or [right]))
        rows.append(tuple(sorted(draw(st.permutations(range(right)))[:d])))
    return BipartiteGraph(left, right, tuple(rows))


@st.composite
def small_cnfs(draw, max_vars=6, max_clauses=6):
    n = draw(st.integers(min_value=1, max_value=max_vars))
    m = draw(st.integers(min_value=0, max_value=max_clauses))
    clauses = []
    for _ in range(m):
        width = draw(st.integers(min_value=1, max_value=min(3, n)))
        vs = draw(st.permutations(range(1, n + 1)))[:width]
        clauses.append(tuple(v if draw(st.booleans()) else -v for v in vs))
    return Cnf(n, tuple(clauses))


def random_graph(rng: random.Random, max_left=5, max_right=7, degrees=(2, 3)) -> BipartiteGraph:
    right = rng.randint(3, max_right)
    left = rng.randint(1, max_left)
    rows = [tuple(sorted(rng.sample(range(right), rng.choice(degrees)))) for _ in range(left)]
    return BipartiteGraph(left, right, tuple(rows))


def theorem_instances(count: int, seed: int = 1, target_mu: int = 2):
    """Left-3-regular graphs with |L| in 6..9 whose (s, 2-eps/2)-expansion is
    exhaustively certified, for s reaching the requested budget."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        left = rng.randrange(6, 10)
        g = random_left_regular(left, 2 * left + rng.randrange(1, 5), 3, rng, max_right_degree=3)
        params = GameParams(EPS, smallest_s(EPS, 3, target_mu + len(out) % 3), 3)
        if not theorem_preconditions(g, params):
            out.append((g, params))
    return out


def expander_cnfs(count: int, seed: int = 5, target_mu: int = 2):
    """Small CNFs whose adjacency graphs meet the game's preconditions."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = rng.randrange(3, 6)
        n = 2 * m + rng.randrange(1, 4)
        phi = random_3cnf(n, Fraction(m, n), rng=rng)
        g = adjacency_graph(phi).graph
        d = max(1, g.max_right_degree())
        params = GameParams(EPS, smallest_s(EPS, d, target_mu), d)
        if not theorem_preconditions(g, params):
            out.append((phi, params))
    return out


def x_and_not_x() -> Cnf:
    return Cnf(1, ((1,), (-1,)))


class TraceBuilder:
    """Writes index-based steps from element-level operations, with result claims."""

    def __init__(self, system: str, inputs: list):
        self.system, self.inputs = system, inputs
        self.config: set = set()
        self.steps: list[dict] = []

    def _pos(self, x) -> int:
        return canonical(self.system, self.config).index(x)

    def download(self, idx: int):
        self.steps.append({"op": "download", "idx": idx})
        self.config.add(self.inputs[idx])
        return self.inputs[idx]

    def lin(self, p, q, alpha, beta):
        new = p.scale(Fraction(alpha)) + q.scale(Fraction(beta))
        self.steps.append({"op": "lin", "a": self._pos(p), "b": self._pos(q), "alpha": str(alpha),
                           "beta": str(beta), "result": new.to_json()})
        self.config.add(new)
        return new

    def mul(self, p, var: int, barred: bool = False):
        new = p.times_var(var, barred)
        self.steps.append({"op": "mul", "a": self._pos(p), "var": ("~x" if barred else "x") + str(var),
                           "result": new.to_json()})
        self.config.add(new)
        return new

    def res(self, a, b, pivot: int):
        new = (a - {pivot}) | (b - {-pivot}) if pivot in a else (a - {-pivot}) | (b - {pivot})
        self.steps.append({"op": "res", "a": self._pos(a), "b": self._pos(b), "pivot": pivot,
                           "result": sorted(new, key=lambda l: (abs(l), l < 0))})
        self.config.add(new)
        return new

    def erase(self, keep):
        keep = set(keep)
        self.steps.append({"op": "erase", "keep": sorted(self._pos(x) for x in keep)})
        self.config = keep


def pcr_refutation(rng: random.Random | None = None, noise: int = 0) -> tuple[list[Polynomial], list[dict]]:
    """tr((x1) and (not x1)) refuted by PCR, optionally after ``noise`` random
    sound inferences over the axioms of extra variables x2, x3."""
    polys = tr_encode(Cnf(3, ((1,), (-1,))))
    b = TraceBuilder("pcr", polys)
    if noise:
        pool = [b.download(rng.randrange(2, len(polys)))]
        for _ in range(noise):
            kind = rng.randrange(4)
            if kind == 0:
                pool.append(b.download(rng.randrange(len(polys))))
            elif kind == 1:
                p = rng.choice(pool)
                pool.append(b.mul(p, rng.randint(1, 3), rng.random() < 0.5))
            elif kind == 2 and len(pool) > 1:
                p, q = rng.sample(pool, 2)
                new = b.lin(p, q, rng.randint(1, 3), Fraction(rng.randint(-3, 3), rng.randint(1, 2)) or 1)
                if new.is_zero():
                    b.erase(b.config - {new})
                    continue
                pool.append(new)
            else:
                keep = {x for x in b.config if rng.random() < 0.6} or {pool[-1]}
                b.erase(keep)
                pool = [x for x in pool if x in keep] or [b.download(rng.randrange(len(polys)))]
        b.erase(set())
    x = b.download(0)
    nx = b.download(1)
    both = b.lin(x, nx, 1, 1)
    ax = b.download(3)
    b.lin(both, ax, 1, -1)
    return polys, b.steps


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "hallspace_acceptance", None)
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(results):
        status, title, details = results[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")
        for line in details:
            terminalreporter.write_line(f"    {line}")

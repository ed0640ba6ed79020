"""Acceptance criteria 1-9; each records a PASS/FAIL line in the terminal summary."""

import random
from contextlib import contextmanager
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EPS, expander_cnfs, pcr_refutation, random_graph, theorem_instances, x_and_not_x
from hallspace.cnf import Cnf, Polynomial, adjacency_graph, random_3cnf, tr_encode
from hallspace.covergame import (
    GreedyAdversary,
    Move,
    RandomAdversary,
    ScriptedAdversary,
    mu,
    play,
    theorem_preconditions,
)
from hallspace.graphs import BipartiteGraph, neighborhood, sample_expansion
from hallspace.matchings import (
    Component,
    HKMatching,
    amplify,
    counterexample,
    find_cover_matching,
    gadget,
    minimal_counterexample,
    pendant_edges,
    validate_matching,
)
from hallspace.oracle import brute_force_cover, enumerate_two_path_covers, has_two_path_cover, is_hk_forest
from hallspace.proofspace import (
    RefutationNotFound,
    applicable_mutations,
    check_res_trace,
    check_trace,
    erase_dead,
    monomial_count,
    mutate,
    naive_res_refuter,
    res_inputs,
)
from hallspace.strategies import (
    factor_domain,
    flippable_from_matching,
    free_family_from_strategy,
    verify_free_family,
    verify_winning_strategy,
    winning_strategy_from_game,
)
from hallspace.sweep import canonical_rows, hall_sweep


@pytest.fixture
def criterion(request):
    results = request.config.__dict__.setdefault("hallspace_acceptance", {})

    @contextmanager
    def record(n, title):
        details = []
        try:
            yield details
        except BaseException:
            results[n] = ("FAIL", title, details)
            print(f"criterion {n}: FAIL  {title}")
            raise
        results[n] = ("PASS", title, details)
        print(f"criterion {n}: PASS  {title}")
        for line in details:
            print(f"    {line}")

    return record


def _expanding(rows, delta):
    n = len(rows)
    g = BipartiteGraph(n, 7, rows)
    return all(
        len(neighborhood(g, x)) >= delta * size for size in range(1, n + 1) for x in combinations(range(n), size)
    )


def test_criterion_1_hall_sweep(criterion):
    with criterion(1, "every (|L|, 2-eps)-expander with |L|<=5, |R|<=7, degrees 2/3 has a (2,4)-cover") as out:
        report = hall_sweep(5, 7, EPS)
        assert report.ok, report.counterexamples + report.errors
        # independent pass: direct expansion check per prefix, brute-force cover oracle per graph
        delta = 2 - EPS
        checked = 0
        for rows in canonical_rows(5, 7, grow=lambda rows: _expanding(rows, delta)):
            if not _expanding(rows, delta):
                continue
            checked += 1
            assert brute_force_cover(BipartiteGraph(len(rows), 7, rows), range(len(rows))) is not None, rows
        assert checked == sum(report.hypotheses_met.values())
        out.append(f"expanding graphs by |L|: {report.hypotheses_met}; counterexamples: 0; {report.seconds:.2f}s")
        out.append("|L| >= 4 cannot expand by 2-eps into 7 right vertices, so larger sizes are vacuous")


def test_criterion_2_oracle_equivalence(criterion):
    with criterion(2, "find_cover_matching agrees with the exhaustive oracle on 10,000 random graphs") as out:
        rng = random.Random(2024)
        coverable = 0
        for _ in range(10_000):
            g = random_graph(rng)
            everyone = range(g.left_count)
            expected = brute_force_cover(g, everyone)
            res = find_cover_matching(g, everyone)
            assert bool(res) == (expected is not None), g
            if res:
                coverable += 1
                assert validate_matching(g, res.matching) == []
                assert res.matching.left_vertices() == set(everyone)
                assert is_hk_forest([e for c in res.matching.components for e in c.edges], 2, 4)
        out.append(f"10000 graphs, {coverable} coverable, 100% agreement")


def _dichotomy(hg):
    m = len(hg.edges)
    assert not has_two_path_cover(hg)
    for size in range(1, m):
        for sub in combinations(range(m), size):
            assert has_two_path_cover(hg, sub), sub
    return 2**m - 2


def test_criterion_3_counterexamples(criterion):
    with criterion(3, "counterexample suite: 6/4 minimal, 16/10 after one amplification, 5/12 certified") as out:
        mc = minimal_counterexample()
        assert (mc.vertex_count, len(mc.edges)) == (6, 4)
        _dichotomy(mc)
        once = amplify(mc, pendant_edges(mc)[0])
        assert (once.vertex_count, len(once.edges)) == (16, 10)
        hg = counterexample(Fraction(5, 12))
        assert hg.vertex_count >= (2 - Fraction(5, 12)) * len(hg.edges)
        subsets = _dichotomy(hg)
        out.append(f"counterexample(5/12): {hg.vertex_count} vertices, {len(hg.edges)} edges, "
                   f"{subsets} proper subsets coverable, full set not")


def test_criterion_4_gadget(criterion):
    with criterion(4, "every 2-path cover of the gadget uses a pair containing x") as out:
        covers = list(enumerate_two_path_covers(gadget()))
        assert covers
        violating = [f for f in covers if not any(0 in pair for pair in f.values())]
        assert violating == []
        out.append(f"{len(covers)} covers enumerated, 0 violating")


def _script(g, length=500):
    moves = []
    for i in range(length // 4):
        moves += [
            Move.challenge(i % g.left_count),
            Move.challenge((3 * i) % g.right_count, "right"),
            Move.remove(0),
            Move.remove(0),
        ]
    return moves


def test_criterion_5_cover_game(criterion):
    with criterion(5, "Cover never loses in 20 certified instances x 500 moves; invariant and |C| < (2/eps)|B| hold") as out:
        instances = theorem_instances(20, seed=101)
        collector = []
        moves = 0
        for g, params in instances:
            assert theorem_preconditions(g, params) == []
            for adversary in (RandomAdversary(7), GreedyAdversary(), ScriptedAdversary(_script(g))):
                tr = play(g, params, adversary, max_moves=500, collector=collector)
                assert tr.stopped != "cover_loses" and not tr.cover_lost
                for rec in tr.records[1:]:
                    if rec["response"].startswith("illegal"):
                        assert isinstance(adversary, ScriptedAdversary)
                        continue
                    moves += 1
                    assert rec.get("invariant_ok", True), rec
                    assert rec["robust_checked"] or rec["response"] == "unchanged", rec
        assert all(len(c.counterexample) < 2 / EPS * len(c.b) for c in collector)
        out.append(f"{len(instances)} instances, {moves} legal moves, "
                   f"{len(collector)} robustness counterexamples all within the bound")


def test_criterion_6_mu_identity(criterion):
    @settings(max_examples=1000, database=None)
    @given(
        st.fractions(min_value=0, max_value=Fraction(1, 23), max_denominator=10**6).filter(
            lambda e: 0 < e < Fraction(1, 23)
        ),
        st.integers(1, 10**12),
        st.integers(1, 10**6),
    )
    def identity(epsilon, s, d):
        assert (mu(epsilon, s, d) + d) * (72 * d / epsilon + 2) == s

    with criterion(6, "(mu + d)(72d/eps + 2) = s exactly on 1,000 random triples") as out:
        identity()
        out.append("1000 hypothesis examples")


def _pairs(phi, edges):
    fam = flippable_from_matching(phi, HKMatching(2, 4, (Component.from_edges(edges),)))
    (factor,) = fam.factors
    variables = sorted(factor_domain(factor))
    return {tuple(a.get(v) for v in variables) for a in factor}


def test_criterion_7_strategy_pipeline(criterion):
    with criterion(7, "k-winning strategies (k=2,3) verify, (k-1)-free families verify, component pairs reproduced") as out:
        assert _pairs(Cnf(2, ((1, 2),)), [(0, 0), (0, 1)]) == {(0, 1), (1, 0)}
        assert _pairs(Cnf(3, ((1, 2), (2, 3))), [(0, 0), (0, 1), (1, 1), (1, 2)]) == {(0, 1, 0), (1, 0, 1)}
        assert _pairs(Cnf(3, ((1, 2), (-2, 3))), [(0, 0), (0, 1), (1, 1), (1, 2)]) == {(0, 1, 1), (1, 0, 0)}
        for k in (2, 3):
            for phi, params in expander_cnfs(3, target_mu=k):
                strat = winning_strategy_from_game(phi, params)
                assert strat.k == k
                explicit = strat.explicit()
                rep = verify_winning_strategy(explicit, tr_encode(phi), k)
                assert rep.ok, rep.violation
                free = verify_free_family(free_family_from_strategy(explicit, k), phi, k - 1)
                assert free.ok, free.violation
                out.append(f"k={k}: {len(phi.clauses)} clauses, {len(explicit.families)} families, "
                           f"{free.checks['members']} free-family members")


def _valid_traces(rng):
    while True:
        n = rng.randint(3, 5)
        phi = random_3cnf(n, Fraction(rng.randint(4 * n, 7 * n), n), rng=rng)
        try:
            steps = naive_res_refuter(phi)
        except RefutationNotFound:
            continue
        inputs = res_inputs(phi)
        yield "res", inputs, erase_dead("res", inputs, steps)
        polys, psteps = pcr_refutation(rng, rng.randint(3, 10))
        yield "pcr", polys, psteps


def test_criterion_8_checkers(criterion):
    with criterion(8, "checkers: (x)&(~x) total space 2, 100 mutations rejected, {xy+z, z-1} has 3 monomials") as out:
        steps = [
            {"op": "download", "idx": 0},
            {"op": "download", "idx": 1},
            {"op": "res", "a": 0, "b": 1, "pivot": 1, "result": []},
        ]
        res = check_res_trace(x_and_not_x(), steps)
        assert res.ok and res.report.total_space == 2
        rng = random.Random(99)
        rejected = {"res": 0, "pcr": 0}
        for system, inputs, trace in _valid_traces(rng):
            assert check_trace(system, inputs, trace).ok
            index = rng.randrange(len(trace))
            kinds = applicable_mutations(trace[index])
            if not kinds:
                continue
            try:
                bad = mutate(system, inputs, trace, index, rng.choice(kinds), rng)
            except ValueError:
                continue
            assert not check_trace(system, inputs, bad).ok, (system, index)
            rejected[system] += 1
            if sum(rejected.values()) >= 100:
                break
        x, y, z = (Polynomial.var(v) for v in (1, 2, 3))
        assert monomial_count([x * y + z, z - Polynomial.constant(1)]) == 3
        out.append(f"mutations rejected: {rejected['res']} res, {rejected['pcr']} pcr")


def test_criterion_9_asymptotic_smoke(criterion):
    with criterion(9, "asymptotic space bounds are not reproducible at desk scale; smoke output only") as out:
        phi = random_3cnf(10_000, 6, seed=9)
        g = adjacency_graph(phi).graph
        d = g.max_right_degree()
        rng = random.Random(9)
        samples = {size: sample_expansion(g, size, 20, rng) for size in (10, 100, 1000)}
        desk_mu = mu(EPS, g.left_count, d)
        assert desk_mu <= 0
        out.append("The monomial-space lower bound of order n/log n and the total-space lower bound of order")
        out.append("n^2/log^2 n for random 3-CNF are asymptotic and are NOT reproduced here: for desk-scale s and d")
        out.append(f"mu = eps*s/(72d + 2eps) - d is nonpositive (n=10000, delta=6: s=|L|={g.left_count}, d={d}, "
                   f"mu={float(desk_mu):.2f}). Criteria 1-7 verify the constructive steps instead.")
        out.append(f"smoke: max right degree {d}")
        for size, ratios in samples.items():
            out.append(f"smoke: |N(X)|/|X| over 20 random X of size {size}: min {float(min(ratios)):.3f}, "
                       f"mean {float(sum(ratios) / len(ratios)):.3f}")

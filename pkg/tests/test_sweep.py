from fractions import Fraction
from itertools import combinations, product

import pytest

from hallspace.certify import certify_counterexample
from hallspace.graphs import Hypergraph, parse_bipartite
from hallspace.matchings import counterexample, gadget, minimal_counterexample
from hallspace.sweep import canonical_rows, hall_sweep


def _first_appearance(rows):
    label = {}
    for row in rows:
        for r in sorted(row, key=lambda r: (r not in label, r)):
            label.setdefault(r, len(label))
    return tuple(tuple(sorted(label[r] for r in row)) for row in rows)


@pytest.mark.parametrize("max_left,right", [(2, 4), (3, 4), (3, 5)])
def test_generation_covers_every_labelled_graph(max_left, right):
    generated = set(canonical_rows(max_left, right))
    subsets = [c for d in (2, 3) for c in combinations(range(right), d)]
    for n in range(1, max_left + 1):
        for rows in product(subsets, repeat=n):
            assert _first_appearance(rows) in generated


def test_generation_respects_keep_and_grow():
    everything = list(canonical_rows(3, 4))
    kept = list(canonical_rows(3, 4, keep=lambda rows: rows[0] == (0, 1)))
    assert kept and all(rows[0] == (0, 1) for rows in kept)
    flat = list(canonical_rows(3, 4, grow=lambda rows: False))
    assert all(len(rows) == 1 for rows in flat)
    assert len(set(everything)) == len(everything)


def test_hall1_small_sweep_has_no_counterexamples():
    report = hall_sweep(4, 6, Fraction(1, 24))
    assert report.ok and sum(report.hypotheses_met.values()) > 0


def test_hall2_finds_counterexamples_only_above_one_third():
    assert hall_sweep(4, 6, Fraction(1, 24), mode="hall2").ok
    loose = hall_sweep(4, 6, Fraction(1, 2), mode="hall2")
    assert loose.counterexamples and not loose.errors
    shapes = {tuple(sorted(len(row) for row in parse_bipartite(text).adj)) for text in loose.counterexamples}
    assert (2, 2, 2, 3) in shapes


def test_sweep_rejects_bad_arguments():
    with pytest.raises(ValueError):
        hall_sweep(2, 3, Fraction(3))
    with pytest.raises(ValueError):
        hall_sweep(2, 3, mode="hall3")


def test_certificates():
    assert certify_counterexample(minimal_counterexample(), Fraction(1, 2))["ok"]
    cert = certify_counterexample(counterexample(Fraction(5, 12)), Fraction(5, 12))
    assert cert["ok"] and cert["proper_subsets_checked"] == 2**10 - 2
    assert not certify_counterexample(gadget())["ok"]
    assert not certify_counterexample(minimal_counterexample(), Fraction(1, 3))["ok"]
    redundant = Hypergraph(7, minimal_counterexample().edges + ((5, 6),))
    cert = certify_counterexample(redundant)
    assert not cert["full_set_coverable_search"] and not cert["maximal_subsets_coverable_search"]
    assert not cert["ok"]


def test_parallel_certificate_matches_serial():
    hg = counterexample(Fraction(5, 12))
    assert certify_counterexample(hg, Fraction(5, 12), jobs=3) == certify_counterexample(hg, Fraction(5, 12))

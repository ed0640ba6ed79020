"""Brute-force certificates for the counterexample hypergraphs."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .graphs import Hypergraph
from .matchings import two_path_cover
from .oracle import has_two_path_cover

ALL_SUBSETS_LIMIT = 16
BRUTE_FORCE_LIMIT = 200_000


def _pair_choices(hg: Hypergraph, subset) -> int:
    return math.prod(math.comb(len(hg.edges[e]), 2) for e in subset)


def _uncoverable_masks(args) -> list[int]:
    hg, masks = args
    m = len(hg.edges)
    return [mask for mask in masks if two_path_cover(hg, [e for e in range(m) if mask >> e & 1]) is None]


def certify_counterexample(hg: Hypergraph, epsilon=None, *, jobs: int = 1) -> dict:
    """Check: no 2-path cover of all edges, every proper subset coverable,
    and (when ``epsilon`` is given) |V| >= (2 - epsilon)|E| exactly.

    The full edge set and each maximal proper subset go through the
    independent brute-force oracle when their pair-choice space is below
    BRUTE_FORCE_LIMIT.  With at most ALL_SUBSETS_LIMIT edges every proper
    subset is also searched directly; otherwise subset inheritance from the
    maximal ones is relied upon.
    """
    m = len(hg.edges)
    everything = range(m)
    cert: dict = {"vertices": hg.vertex_count, "edges": m}
    if epsilon is not None:
        epsilon = Fraction(epsilon)
        cert["epsilon"] = str(epsilon)
        cert["ratio"] = str(Fraction(hg.vertex_count, m))
        cert["ratio_ok"] = hg.vertex_count >= (2 - epsilon) * m
    cert["full_set_coverable_search"] = two_path_cover(hg) is not None
    if _pair_choices(hg, everything) <= BRUTE_FORCE_LIMIT:
        cert["full_set_coverable_bruteforce"] = has_two_path_cover(hg)
    maximal = [[e for e in everything if e != drop] for drop in everything]
    cert["maximal_subsets_coverable_search"] = all(two_path_cover(hg, s) is not None for s in maximal)
    if all(_pair_choices(hg, s) <= BRUTE_FORCE_LIMIT for s in maximal):
        cert["maximal_subsets_coverable_bruteforce"] = all(has_two_path_cover(hg, s) for s in maximal)
    if m <= ALL_SUBSETS_LIMIT:
        masks = list(range(1, (1 << m) - 1))
        if jobs > 1:
            chunks = [masks[i::jobs] for i in range(jobs)]
            with ProcessPoolExecutor(jobs) as pool:
                bad = sorted(x for part in pool.map(_uncoverable_masks, [(hg, c) for c in chunks]) for x in part)
        else:
            bad = _uncoverable_masks((hg, masks))
        cert["proper_subsets_checked"] = len(masks)
        cert["proper_subsets_uncoverable"] = [[e for e in everything if x >> e & 1] for x in bad]
    cert["ok"] = (
        cert.get("ratio_ok", True)
        and not cert["full_set_coverable_search"]
        and not cert.get("full_set_coverable_bruteforce", False)
        and cert["maximal_subsets_coverable_search"]
        and cert.get("maximal_subsets_coverable_bruteforce", True)
        and not cert.get("proper_subsets_uncoverable")
    )
    return cert


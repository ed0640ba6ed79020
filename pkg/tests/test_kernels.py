import os
import random
import subprocess
import sys
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hallspace import _pykernels, kernels
from hallspace.matchings import _pair_options

compiled = pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")


@st.composite
def option_lists(draw, max_items=7, max_right=9):
    right = draw(st.integers(2, max_right))
    rows = [
        tuple(sorted(draw(st.permutations(range(right)))[: draw(st.integers(2, 3))]))
        for _ in range(draw(st.integers(0, max_items)))
    ]
    _, masks, _ = _pair_options(rows, 2)
    return masks


@st.composite
def neighbour_masks(draw):
    right = draw(st.integers(1, 12))
    return [draw(st.integers(0, (1 << right) - 1)) for _ in range(draw(st.integers(0, 8)))]


@compiled
@given(option_lists(), st.booleans())
def test_solve_cover_backends_agree(options, chain):
    assert kernels.solve_cover(options, chain, backend="python") == kernels.solve_cover(options, chain, backend="cython")


@compiled
@given(option_lists(), st.integers(0, 8))
def test_first_uncoverable_backends_agree(options, size):
    assert kernels.first_uncoverable(options, size, backend="python") == kernels.first_uncoverable(
        options, size, backend="cython"
    )


@compiled
@given(neighbour_masks(), st.integers(1, 8), st.integers(1, 30), st.integers(1, 10))
def test_expansion_backends_agree(masks, size, num, den):
    py = kernels.first_expansion_violation(masks, size, num, den, backend="python")
    assert py == kernels.first_expansion_violation(masks, size, num, den, backend="cython")


@given(option_lists(max_items=5, max_right=7))
def test_first_uncoverable_is_smallest_then_lexicographic(options):
    expected = None
    for size in range(1, len(options) + 1):
        for sub in combinations(range(len(options)), size):
            if _pykernels.solve_cover([options[i] for i in sub]) is None:
                expected = sub
                break
        if expected:
            break
    got = kernels.first_uncoverable(options, len(options), backend="python")
    assert (None if got is None else tuple(got)) == expected


def test_oversized_inputs_fall_back_to_python():
    rng = random.Random(0)
    rows = [tuple(sorted(rng.sample(range(80), 3))) for _ in range(10)]
    _, masks, _ = _pair_options(rows, 2)
    wide = [[m << 60 for m in opts] for opts in masks]
    assert kernels.solve_cover(wide) == kernels.solve_cover(wide, backend="python")


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        kernels.solve_cover([], backend="fortran")


def test_default_backend_is_reported():
    assert kernels.BACKEND in kernels.available_backends()


def test_pure_environment_variable_forces_python():
    env = dict(os.environ, HALLSPACE_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import hallspace; print(hallspace.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"

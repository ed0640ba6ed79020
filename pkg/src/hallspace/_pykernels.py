"""Pure-Python search kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same (deterministic) output.  Right vertices are encoded as
bits of Python ints, so this module has no size limit; the compiled twin is
restricted to 64 right vertices and 64 items.

Pair options
    ``options[i]`` lists the candidate right-vertex sets of item ``i`` as
    bitmasks (two bits for h = 2, one bit for h = 1), in the order they must be
    tried.

Chained mode (``chain=True``) is the (2,4) rule: chosen sets pairwise distinct,
and no chosen set meets two other chosen sets (equivalently no right vertex is
used three times and no chosen set has both endpoints shared).  Plain mode
(``chain=False``) demands pairwise disjoint sets, which is the (1,1) and (2,2)
rule.
"""

from itertools import combinations

NAME = "python"


def _low_bit_index(mask):
    return (mask & -mask).bit_length() - 1


def solve_cover(options, chain=True):
    """Return the lexicographically first choice vector, or ``None``.

    ``result[i]`` is the index into ``options[i]`` picked for item ``i``.
    """
    n = len(options)
    choice = [0] * n
    partner = {}

    def place(i, used1, used2):
        if i == n:
            return True
        for j, mask in enumerate(options[i]):
            if not chain:
                if (used1 | used2) & mask:
                    continue
                choice[i] = j
                if place(i + 1, used1 | mask, used2):
                    return True
                continue
            if used2 & mask:
                continue
            shared = used1 & mask
            if shared == 0:
                a = _low_bit_index(mask)
                b = _low_bit_index(mask & ~(1 << a))
                partner[a] = b
                partner[b] = a
                nu1, nu2 = used1 | mask, used2
            elif shared & (shared - 1):
                # both endpoints already used: equal pair or a chain through us
                continue
            else:
                a = _low_bit_index(shared)
                if used2 & (1 << partner[a]):
                    # the pair already touching a has its neighbour
                    continue
                rest = mask & ~shared
                b = _low_bit_index(rest)
                partner[b] = a
                nu1 = (used1 & ~shared) | rest
                nu2 = used2 | shared
            choice[i] = j
            if place(i + 1, nu1, nu2):
                return True
        return False

    if place(0, 0, 0):
        return choice
    return None


def first_uncoverable(options, max_size, chain=True):
    """First item subset (by size, then lexicographically) with no cover.

    Only subsets of size ``1..max_size`` are examined.  Coverability is
    inherited by subsets, so when every subset of the largest size is coverable
    nothing smaller needs to be looked at.
    """
    n = len(options)
    top = min(max_size, n)
    if top <= 0:
        return None
    if all(
        solve_cover([options[i] for i in sub], chain) is not None
        for sub in combinations(range(n), top)
    ):
        return None
    for size in range(1, top + 1):
        for sub in combinations(range(n), size):
            if solve_cover([options[i] for i in sub], chain) is None:
                return sub
    raise AssertionError("top level failed but no violator found")


def first_expansion_violation(neighbour_masks, max_size, num, den):
    """First left subset X with ``den * |N(X)| < num * |X|``.

    Subsets are visited by size and then lexicographically.
    """
    n = len(neighbour_masks)
    for size in range(1, min(max_size, n) + 1):
        bound = num * size
        for sub in combinations(range(n), size):
            union = 0
            for i in sub:
                union |= neighbour_masks[i]
            if den * union.bit_count() < bound:
                return sub
    return None

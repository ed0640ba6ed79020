# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels (64-bit masks).

Mirror of ``_pykernels``; see that module for the encoding.  Callers go through
``hallspace.kernels`` which falls back to the Python version for inputs wider
than 64 right vertices or 64 items.
"""

from libc.stdlib cimport malloc, free

NAME = "cython"

ctypedef unsigned long long u64


cdef extern from *:
    int __builtin_ctzll(unsigned long long x) nogil
    int __builtin_popcountll(unsigned long long x) nogil


cdef inline int low_bit(u64 m) nogil:
    return __builtin_ctzll(m)


cdef struct Problem:
    int n
    int *start      # options of item i live in masks[start[i]:start[i+1]]
    u64 *masks
    int *items      # item order for this call
    int *choice     # picked option offset, per position
    int partner[64]
    bint chain


cdef bint place(Problem *p, int pos, u64 used1, u64 used2) nogil:
    cdef int item, j, a, b
    cdef u64 mask, shared, rest, nu1, nu2
    if pos == p.n:
        return True
    item = p.items[pos]
    for j in range(p.start[item], p.start[item + 1]):
        mask = p.masks[j]
        if not p.chain:
            if (used1 | used2) & mask:
                continue
            p.choice[pos] = j - p.start[item]
            if place(p, pos + 1, used1 | mask, used2):
                return True
            continue
        if used2 & mask:
            continue
        shared = used1 & mask
        if shared == 0:
            a = low_bit(mask)
            b = low_bit(mask & ~((<u64>1) << a))
            p.partner[a] = b
            p.partner[b] = a
            nu1 = used1 | mask
            nu2 = used2
        elif shared & (shared - 1):
            continue
        else:
            a = low_bit(shared)
            if used2 & ((<u64>1) << p.partner[a]):
                continue
            rest = mask & ~shared
            b = low_bit(rest)
            p.partner[b] = a
            nu1 = (used1 & ~shared) | rest
            nu2 = used2 | shared
        p.choice[pos] = j - p.start[item]
        if place(p, pos + 1, nu1, nu2):
            return True
    return False


cdef class _Options:
    cdef int n
    cdef int *start
    cdef u64 *masks

    def __cinit__(self, options):
        cdef int i, k, total = 0
        self.n = len(options)
        for opts in options:
            total += len(opts)
        self.start = <int *> malloc((self.n + 1) * sizeof(int))
        self.masks = <u64 *> malloc((total + 1) * sizeof(u64))
        if self.start == NULL or self.masks == NULL:
            raise MemoryError()
        k = 0
        for i in range(self.n):
            self.start[i] = k
            for m in options[i]:
                self.masks[k] = <u64> m
                k += 1
        self.start[self.n] = k

    def __dealloc__(self):
        free(self.start)
        free(self.masks)


cdef bint run(_Options opts, int *items, int count, int *choice, bint chain):
    cdef Problem p
    p.n = count
    p.start = opts.start
    p.masks = opts.masks
    p.items = items
    p.choice = choice
    p.chain = chain
    with nogil:
        return place(&p, 0, 0, 0)


def solve_cover(options, chain=True):
    cdef _Options opts = _Options(options)
    cdef int n = opts.n
    cdef int *items = <int *> malloc((n + 1) * sizeof(int))
    cdef int *choice = <int *> malloc((n + 1) * sizeof(int))
    cdef int i
    try:
        for i in range(n):
            items[i] = i
        if run(opts, items, n, choice, chain):
            return [choice[i] for i in range(n)]
        return None
    finally:
        free(items)
        free(choice)


cdef bint next_combination(int *c, int k, int n) nogil:
    cdef int i = k - 1
    while i >= 0 and c[i] == n - k + i:
        i -= 1
    if i < 0:
        return False
    c[i] += 1
    i += 1
    while i < k:
        c[i] = c[i - 1] + 1
        i += 1
    return True


def first_uncoverable(options, int max_size, chain=True):
    cdef _Options opts = _Options(options)
    cdef int n = opts.n
    cdef int top = max_size if max_size < n else n
    cdef int size, i
    cdef bint ok
    if top <= 0:
        return None
    cdef int *comb = <int *> malloc((n + 1) * sizeof(int))
    cdef int *choice = <int *> malloc((n + 1) * sizeof(int))
    try:
        for i in range(top):
            comb[i] = i
        ok = True
        while True:
            if not run(opts, comb, top, choice, chain):
                ok = False
                break
            if not next_combination(comb, top, n):
                break
        if ok:
            return None
        for size in range(1, top + 1):
            for i in range(size):
                comb[i] = i
            while True:
                if not run(opts, comb, size, choice, chain):
                    return tuple(comb[i] for i in range(size))
                if not next_combination(comb, size, n):
                    break
        raise AssertionError("top level failed but no violator found")
    finally:
        free(comb)
        free(choice)


def first_expansion_violation(neighbour_masks, int max_size, long long num, long long den):
    cdef int n = len(neighbour_masks)
    cdef int top = max_size if max_size < n else n
    cdef int size, i
    cdef u64 union_
    cdef u64 *nb = <u64 *> malloc((n + 1) * sizeof(u64))
    cdef int *comb = <int *> malloc((n + 1) * sizeof(int))
    try:
        for i in range(n):
            nb[i] = <u64> neighbour_masks[i]
        for size in range(1, top + 1):
            for i in range(size):
                comb[i] = i
            while True:
                union_ = 0
                for i in range(size):
                    union_ |= nb[comb[i]]
                if den * __builtin_popcountll(union_) < num * size:
                    return tuple(comb[i] for i in range(size))
                if not next_combination(comb, size, n):
                    break
        return None
    finally:
        free(nb)
        free(comb)

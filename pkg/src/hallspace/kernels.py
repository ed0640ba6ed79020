"""Backend selection for the search kernels.

The compiled extension is used when it was built and the input fits in 64-bit
masks; otherwise the pure-Python twin runs.  Set ``HALLSPACE_PURE=1`` to force
the Python backend (the benchmark and the backend-agreement tests do this
per call through the ``backend`` argument instead).
"""

import os

from . import _pykernels

try:
    from . import _kernels as _ckernels
except ImportError:  # extension not built
    _ckernels = None

_LIMIT = 64
_INT_LIMIT = 1 << 62

if _ckernels is not None and not os.environ.get("HALLSPACE_PURE"):
    BACKEND = _ckernels.NAME
else:
    BACKEND = _pykernels.NAME


def available_backends():
    names = [_pykernels.NAME]
    if _ckernels is not None:
        names.append(_ckernels.NAME)
    return names


def _fits(options):
    if len(options) > _LIMIT:
        return False
    return all(m < (1 << _LIMIT) for opts in options for m in opts)


def _pick(backend, fits):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not built")
        return _ckernels if fits else _pykernels
    if backend == "python":
        return _pykernels
    raise ValueError(f"unknown backend {backend!r}")


def solve_cover(options, chain=True, backend=None):
    return _pick(backend, _fits(options)).solve_cover(options, chain)


def first_uncoverable(options, max_size, chain=True, backend=None):
    max_size = min(max_size, len(options))
    return _pick(backend, _fits(options)).first_uncoverable(options, max_size, chain)


def first_expansion_violation(neighbour_masks, max_size, num, den, backend=None):
    max_size = min(max_size, len(neighbour_masks))
    fits = (
        len(neighbour_masks) <= _LIMIT
        and all(m < (1 << _LIMIT) for m in neighbour_masks)
        and abs(num) * _LIMIT < _INT_LIMIT
        and abs(den) * _LIMIT < _INT_LIMIT
    )
    return _pick(backend, fits).first_expansion_violation(neighbour_masks, max_size, num, den)

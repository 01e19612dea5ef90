"""Hot kernel for the port search: metrics of every candidate for one coordinate.

The compiled extension is used when it was built; otherwise the numpy
implementation is selected at import. Both are importable by name for
comparison (``python_impl``, ``compiled_impl``).
"""

import numpy as np

from . import _python as python_impl

try:
    from . import _sweep as compiled_impl
except ImportError:  # extension not built
    compiled_impl = None

BACKEND = "cython" if compiled_impl is not None else "python"
_IMPLS = {"python": python_impl, "cython": compiled_impl}


def available_backends():
    return [name for name, impl in _IMPLS.items() if impl is not None]


def candidate_metrics(G_full, W, sel, pos, cands, psi, sigma2, backend=None):
    """Return ``(rates, gains)`` arrays for the candidate ports ``cands`` at position ``pos``."""
    name = backend or BACKEND
    impl = _IMPLS.get(name)
    if impl is None:
        raise ValueError(f"kernel backend {name!r} unavailable; have {available_backends()}")
    return impl.candidate_metrics(
        np.ascontiguousarray(G_full, dtype=np.complex128),
        np.ascontiguousarray(W, dtype=np.complex128),
        np.ascontiguousarray(sel, dtype=np.int64),
        int(pos),
        np.ascontiguousarray(cands, dtype=np.int64),
        float(psi),
        float(sigma2),
    )

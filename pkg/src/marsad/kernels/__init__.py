"""Hot-loop kernels with a compiled core and a NumPy fallback.

The compiled extension (`_ckernels`, built from Cython) is preferred when
present; setting ``MARSAD_PURE_PYTHON=1`` forces the NumPy backend.  Both
backends implement the same three functions with identical semantics:

- ``lloyd_iter``    one K-Means assignment/accumulation pass over CSR rows
- ``nmf_mu_iter``   one NMF multiplicative-update sweep (in place)
- ``pagerank_iter`` one PageRank power-iteration sweep

``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

from . import _pure


def _load_compiled():
    from . import _ckernels  # noqa: F401  (ImportError when not built)

    return _ckernels


if os.environ.get("MARSAD_PURE_PYTHON"):
    _impl = _pure
    BACKEND = "python"
else:
    try:
        _impl = _load_compiled()
        BACKEND = "c"
    except ImportError:
        _impl = _pure
        BACKEND = "python"

lloyd_iter = _impl.lloyd_iter
nmf_mu_iter = _impl.nmf_mu_iter
pagerank_iter = _impl.pagerank_iter


def backends() -> dict[str, object]:
    """All importable backends, keyed by name (for tests and benchmarks)."""
    found: dict[str, object] = {"python": _pure}
    try:
        found["c"] = _load_compiled()
    except ImportError:
        pass
    return found


__all__ = ["BACKEND", "backends", "lloyd_iter", "nmf_mu_iter", "pagerank_iter"]

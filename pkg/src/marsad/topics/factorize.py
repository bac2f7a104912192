"""Non-negative matrix factorization via Lee-Seung multiplicative updates.

Minimizes the Frobenius objective ``|V - WH|_F^2``; each sweep keeps both
factors nonnegative and never increases the objective (to floating-point
noise).  The update sweep itself runs through `marsad.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import AnalysisError

_EPS = 1e-12


@dataclass
class NMFResult:
    W: np.ndarray  # (m, rank) >= 0
    H: np.ndarray  # (rank, n) >= 0
    rank: int
    objective_trace: list[float] = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def nmf(V, rank: int = 2, seed: int = 0, max_iter: int = 200, tol: float = 1e-4) -> NMFResult:
    """Factor a nonnegative matrix into ``W @ H`` with the given rank.

    Factors are initialized from a seeded uniform draw scaled to the data
    magnitude, so a fixed seed reproduces the whole objective trace.  Stops
    early when the relative objective improvement drops below ``tol``.
    """
    V = np.ascontiguousarray(np.asarray(V, dtype=np.float64))
    if V.ndim != 2:
        raise AnalysisError("NEGATIVE_INPUT", "V must be a 2-D matrix")
    if V.size == 0 or (V < 0).any():
        raise AnalysisError("NEGATIVE_INPUT", "V must be nonnegative and non-empty")
    m, n = V.shape
    if rank < 1 or rank > min(m, n):
        raise AnalysisError("RANK_TOO_LARGE", f"rank={rank} for a {m}x{n} matrix")

    rng = np.random.default_rng(seed)
    scale = np.sqrt(max(V.mean(), _EPS) / rank)
    W = np.ascontiguousarray(rng.random((m, rank)) * scale + _EPS)
    H = np.ascontiguousarray(rng.random((rank, n)) * scale + _EPS)

    diff = V - W @ H
    trace = [float((diff * diff).sum())]
    for _ in range(max_iter):
        obj = kernels.nmf_mu_iter(V, W, H, _EPS)
        prev = trace[-1]
        trace.append(obj)
        if prev - obj <= tol * max(prev, _EPS):
            break
    return NMFResult(W=W, H=H, rank=rank, objective_trace=trace)

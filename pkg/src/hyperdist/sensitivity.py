"""Sensitivity scores via leverage scores, and sensitivity-sampling coresets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameter, NotFullRank
from .geometry import Hyperplane, PointSet, is_full_rank
from .metrics import residuals

_EPS = np.finfo(float).eps


def design_matrix(Q: PointSet) -> np.ndarray:
    """``A_Q``: ``n x (d+1)`` with row ``i`` equal to ``(q_i, 1)``."""
    return Q.design_matrix()


def _rank_basis(A: np.ndarray) -> np.ndarray:
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return U[:, :0]
    cutoff = max(A.shape) * _EPS * s[0]
    return U[:, : int(np.sum(s > cutoff))]


def leverage_scores(A) -> np.ndarray:
    """Row leverage scores ``a_i^T (A^T A)^+ a_i``.

    Computed as squared row norms of an orthonormal basis of the column
    space, so rank-deficient ``A`` is handled and ``sum(tau) == rank(A)``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a 2-D matrix")
    U = _rank_basis(A)
    return np.einsum("ij,ij->i", U, U)


def sensitivities(Q: PointSet) -> np.ndarray:
    """Sensitivity of each point for squared affine functions under measure ``Q.weights``.

    ``sigma_i * p_i`` is the leverage score of row ``i`` of ``diag(sqrt(p)) A_Q``.
    Weights are normalized to a probability measure first.
    """
    if not is_full_rank(Q):
        raise NotFullRank("sensitivities need a full-rank point set")
    p = Q.weights / Q.weights.sum()
    tau = leverage_scores(np.sqrt(p)[:, None] * Q.design_matrix())
    return tau / p


def sample_size(d: int, eps: float, delta: float, dim_offset: int = 1) -> int:
    """Coreset size ``ceil((d + dim_offset) / (delta eps^2))``.

    ``dim_offset=0`` gives the bound printed with ``d``; the default counts the
    ``d+1`` dimensions of the affine function space.
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise BadParameter("eps and delta must lie in (0, 1)")
    return math.ceil(round((d + dim_offset) / (delta * eps * eps), 9))


@dataclass(frozen=True, eq=False)
class Coreset:
    """Indices into ``Q`` drawn iid with probability ``sigma_i p_i / (d+1)``,
    each carrying weight ``(d+1) / (N sigma_i)``."""

    indices: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def points(self, Q: PointSet) -> np.ndarray:
        return Q.points[self.indices]


def sampling_distribution(Q: PointSet, sigma: np.ndarray | None = None) -> np.ndarray:
    if sigma is None:
        sigma = sensitivities(Q)
    p = Q.weights / Q.weights.sum()
    prob = sigma * p / (Q.d + 1)
    return prob / prob.sum()


def sensitivity_sample(Q: PointSet, N: int, seed) -> Coreset:
    if N < 1:
        raise BadParameter("coreset size must be at least 1")
    sigma = sensitivities(Q)
    prob = sampling_distribution(Q, sigma)
    rng = np.random.default_rng(seed)
    idx = rng.choice(Q.n, size=N, replace=True, p=prob)
    w = (Q.d + 1) / (N * sigma[idx])
    return Coreset(idx, w)


def estimate_dist(Q: PointSet, coreset: Coreset, h1: Hyperplane, h2: Hyperplane) -> float:
    """Coreset estimate of ``dist(Q, h1, h2)``.

    The sensitivities are taken relative to the measure on ``Q``, so
    ``sum_j w_j f(x_j)`` is already an unbiased estimate of the mean squared
    residual and no further ``1/n`` is applied.
    """
    r = residuals(Q, h1, h2)[coreset.indices]
    return float(np.sqrt(coreset.weights @ (r * r)))


def estimate_dist_many(Q: PointSet, coreset: Coreset, U: np.ndarray) -> np.ndarray:
    """Vectorized :func:`estimate_dist` over rows of coefficient differences ``U``."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    R = Q.design_matrix()[coreset.indices] @ U.T
    return np.sqrt(coreset.weights @ (R * R))

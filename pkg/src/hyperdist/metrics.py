"""Data-dependent distances between hyperplanes.

All distances compare two hyperplanes through the points of ``Q``. The signed
variant :func:`dist` is the one with metric and range-space guarantees on
full-rank ``Q``; :func:`dist_unsigned` and :func:`dist_frobenius` are the
alternatives built from unsigned distances and projection vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonpositiveWeight, NotFullRank, OrientationMismatch
from .geometry import Hyperplane, PointSet, has_full_column_rank, is_full_rank, signed_distances

BOUNDARY_TOL = 1e-9


def _coeff_diff(Q: PointSet, h1: Hyperplane, h2: Hyperplane) -> np.ndarray:
    if h1.oriented != h2.oriented:
        raise OrientationMismatch("cannot compare an oriented with an unoriented hyperplane")
    if h1.d != Q.d or h2.d != Q.d:
        raise DimensionMismatch(f"hyperplanes in R^{h1.d}/R^{h2.d}, points in R^{Q.d}")
    return h1.coeffs - h2.coeffs


def residuals(Q: PointSet, h1: Hyperplane, h2: Hyperplane) -> np.ndarray:
    """``v_Q(h1) - v_Q(h2)``, evaluated as ``A_Q (u1 - u2)``."""
    u = _coeff_diff(Q, h1, h2)
    return Q.points @ u[:-1] + u[-1]


def dist(Q: PointSet, h1: Hyperplane, h2: Hyperplane) -> float:
    """Root-mean-square difference of signed distances from ``Q`` to ``h1`` and ``h2``."""
    r = residuals(Q, h1, h2)
    return float(np.linalg.norm(r) / np.sqrt(Q.n))


def dist_weighted(Q: PointSet, h1: Hyperplane, h2: Hyperplane, weights=None) -> float:
    """``sqrt(sum_i w_i (v_i(h1) - v_i(h2))^2)`` with ``w`` from ``Q.weights`` unless given."""
    w = Q.weights if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != Q.n:
        raise DimensionMismatch(f"expected {Q.n} weights, got {w.shape[0]}")
    if np.any(~(w > 0)):
        raise NonpositiveWeight("all weights must be strictly positive")
    r = residuals(Q, h1, h2)
    return float(np.sqrt(w @ (r * r)))


def dist_unsigned(Q: PointSet, h1: Hyperplane, h2: Hyperplane) -> float:
    _coeff_diff(Q, h1, h2)
    r = np.abs(signed_distances(Q, h1)) - np.abs(signed_distances(Q, h2))
    return float(np.linalg.norm(r) / np.sqrt(Q.n))


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """Row ``i`` is the vector from ``q_i`` to its closest point on ``hyperplane``."""

    rows: np.ndarray
    hyperplane: Hyperplane

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        nrm = self.hyperplane.normal
        # every row must be a multiple of the normal
        along = rows @ nrm
        off = rows - np.outer(along, nrm)
        if rows.size and np.max(np.abs(off)) > 1e-9 * max(1.0, float(np.max(np.abs(rows)))):
            raise ValueError("projection rows must be parallel to the hyperplane normal")
        object.__setattr__(self, "rows", rows)


def projection_matrix(Q: PointSet, h: Hyperplane) -> ProjectionMatrix:
    v = signed_distances(Q, h)
    return ProjectionMatrix(-np.outer(v, h.normal), h)


def dist_frobenius(Q: PointSet, h1: Hyperplane, h2: Hyperplane) -> float:
    """Frobenius norm of the difference of projection matrices.

    No ``1/sqrt(n)`` factor: two parallel lines at offset 1 are ``sqrt(n)`` apart.
    """
    _coeff_diff(Q, h1, h2)
    diff = projection_matrix(Q, h1).rows - projection_matrix(Q, h2).rows
    return float(np.linalg.norm(diff))


def metric_status(Q: PointSet) -> str:
    """``"metric"`` if ``dist`` separates hyperplanes on ``Q``, else ``"pseudo-metric"``."""
    return "metric" if is_full_rank(Q) else "pseudo-metric"


@dataclass(frozen=True, eq=False)
class LiftedBall:
    """A closed ball ``{h : dist(Q, center, h) <= radius}`` written as a halfspace.

    With ``y = u`` and ``y_jj' = u_j u_j'`` (``j <= j'``), membership reads
    ``a0 + linear . y + sum_{j<=j'} quadratic[j, j'] y_jj' <= 0``.
    ``quadratic`` is upper triangular; only its ``j <= j'`` entries are used.
    """

    a0: float
    linear: np.ndarray
    quadratic: np.ndarray
    n: int
    radius: float

    @property
    def d(self) -> int:
        return self.linear.shape[0] - 1

    @property
    def lifted_dim(self) -> int:
        d = self.d
        return (d * d + 5 * d + 4) // 2

    def coefficients(self) -> np.ndarray:
        """``[a0, a_1..a_{d+1}, a_jj' for j <= j' in row-major order]``."""
        iu = np.triu_indices(self.d + 1)
        return np.concatenate([[self.a0], self.linear, self.quadratic[iu]])

    def value(self, h: Hyperplane) -> float:
        u = h.coeffs
        return float(self.a0 + self.linear @ u + u @ self.quadratic @ u)


def lift_ball(Q: PointSet, center: Hyperplane, radius: float) -> LiftedBall:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    A = Q.design_matrix()
    if not has_full_column_rank(A):
        raise NotFullRank("lifting requires a full-rank point set")
    v0 = signed_distances(Q, center)
    n = Q.n
    a0 = float(v0 @ v0 - n * radius * radius)
    linear = -2.0 * (v0 @ A)
    gram = A.T @ A
    # off-diagonal monomials u_j u_j' appear twice in u^T G u
    quad = np.triu(gram + gram)
    np.fill_diagonal(quad, np.diag(gram))
    return LiftedBall(a0, linear, quad, n, float(radius))


def lift_membership(ball: LiftedBall, h: Hyperplane) -> bool:
    """Evaluate the lifted halfspace at ``h``.

    The comparison allows a rounding slack proportional to the magnitude of
    the summed terms, so points on the sphere itself are reported inside.
    """
    u = h.coeffs
    if u.shape[0] != ball.linear.shape[0]:
        raise DimensionMismatch("hyperplane dimension does not match the ball")
    lin = ball.linear * u
    quad = ball.quadratic * np.outer(u, u)
    total = ball.a0 + lin.sum() + quad.sum()
    scale = abs(ball.a0) + ball.n * ball.radius ** 2 + np.abs(lin).sum() + np.abs(quad).sum()
    return bool(total <= 1e-12 * scale)

"""Point sets, hyperplanes and their signed-distance embeddings."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNormal, DimensionMismatch, NonpositiveWeight

SIGN_TOL = 1e-12
_EPS = np.finfo(float).eps


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointSet:
    """Base data ``Q``: an ``(n, d)`` matrix of points with positive weights.

    ``weights`` defaults to the uniform measure ``1/n``.
    """

    points: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DimensionMismatch(f"points must be a non-empty n x d matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        n = pts.shape[0]
        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if w.shape[0] != n:
                raise DimensionMismatch(f"expected {n} weights, got {w.shape[0]}")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise NonpositiveWeight("all weights must be strictly positive")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def design_matrix(self) -> np.ndarray:
        """Rows ``(q_i, 1)``."""
        return np.hstack([self.points, np.ones((self.n, 1))])

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Hyperplane ``{x : u[:d] . x + u[d] = 0}`` with unit normal ``u[:d]``.

    Build instances with :func:`canonicalize` (or :meth:`from_raw`); the
    constructor only validates.
    """

    coeffs: np.ndarray
    oriented: bool = False

    def __post_init__(self):
        u = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if u.shape[0] < 2:
            raise DimensionMismatch("a hyperplane needs at least 2 coefficients")
        if not np.all(np.isfinite(u)):
            raise ValueError("coefficients must be finite")
        if abs(float(u[:-1] @ u[:-1]) - 1.0) > 1e-12:
            raise DegenerateNormal("normal is not unit length; use canonicalize()")
        if not self.oriented:
            lead = _leading(u)
            if lead is not None and lead < 0:
                raise ValueError("unoriented hyperplane must have a positive first nonzero entry")
        object.__setattr__(self, "coeffs", _frozen(u))
        object.__setattr__(self, "oriented", bool(self.oriented))

    @classmethod
    def from_raw(cls, raw, oriented: bool = False) -> "Hyperplane":
        return canonicalize(raw, oriented)

    @property
    def d(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def normal(self) -> np.ndarray:
        return self.coeffs[:-1]

    @property
    def offset(self) -> float:
        return float(self.coeffs[-1])

    def __eq__(self, other):
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return self.oriented == other.oriented and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.oriented, self.coeffs.tobytes()))

    def __repr__(self):
        kind = "oriented " if self.oriented else ""
        return f"Hyperplane({kind}{np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """Signed distances of every point of ``Q`` to a hyperplane, scaled by ``1/sqrt(n)``."""

    values: np.ndarray
    source_n: int = field(default=0)

    def __post_init__(self):
        v = _frozen(np.asarray(self.values, dtype=float).reshape(-1))
        object.__setattr__(self, "values", v)
        if self.source_n == 0:
            object.__setattr__(self, "source_n", v.shape[0])
        elif self.source_n != v.shape[0]:
            raise DimensionMismatch("embedding length must equal source_n")

    def __len__(self) -> int:
        return self.values.shape[0]

    def distance(self, other: "EmbeddingVector") -> float:
        return float(np.linalg.norm(self.values - other.values))


def _leading(u: np.ndarray) -> float | None:
    for x in u.tolist():
        if abs(x) > SIGN_TOL:
            return x
    return None


def canonicalize(raw, oriented: bool = False) -> Hyperplane:
    """Scale ``raw`` to a unit normal; flip sign so the first nonzero entry is positive
    unless ``oriented``.

    A vector whose normal is already unit length (to a few ulps) is not
    rescaled, which makes the operation exactly idempotent.
    """
    u = np.array(raw, dtype=float).reshape(-1)
    if u.shape[0] < 2:
        raise DimensionMismatch("a hyperplane needs at least 2 coefficients")
    norm = math.hypot(*u[:-1].tolist())
    if not np.isfinite(norm) or norm <= SIGN_TOL:
        raise DegenerateNormal(f"normal part {u[:-1]} has norm {norm:g}")
    if abs(norm - 1.0) > 4 * _EPS:
        u = u / norm
    if not oriented:
        lead = _leading(u)
        if lead is not None and lead < 0:
            u = -u
    return Hyperplane(u, oriented)


def _check_dims(h: Hyperplane, d: int) -> None:
    if h.d != d:
        raise DimensionMismatch(f"hyperplane lives in R^{h.d}, points in R^{d}")


def signed_distance(h: Hyperplane, q) -> float:
    q = np.asarray(q, dtype=float).reshape(-1)
    _check_dims(h, q.shape[0])
    return float(h.normal @ q + h.offset)


def signed_distances(Q: PointSet, h: Hyperplane) -> np.ndarray:
    """Unscaled vector ``v_Q(h)``."""
    _check_dims(h, Q.d)
    return Q.points @ h.normal + h.offset


def embed(Q: PointSet, h: Hyperplane) -> EmbeddingVector:
    return EmbeddingVector(signed_distances(Q, h) / np.sqrt(Q.n), Q.n)


def has_full_column_rank(A: np.ndarray) -> bool:
    """Smallest singular value above ``max(A.shape) * eps * largest``."""
    n, m = A.shape
    if n < m:
        return False
    s = np.linalg.svd(A, compute_uv=False)
    return bool(s[-1] > max(n, m) * _EPS * s[0])


def is_full_rank(Q: PointSet) -> bool:
    """Whether the rows ``(q_i, 1)`` span ``R^(d+1)``."""
    return has_full_column_rank(Q.design_matrix())

"""Online row sampling of the design-matrix stream.

Each incoming row ``a`` is kept with probability
``p = min(c (1 + eps) a^T (S^T S + lam I)^{-1} a, 1)`` where ``S`` is the
sketch built so far, and stored rescaled as ``a / sqrt(p)``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import BadParameter, DimensionMismatch, EmptyInput, OrientationMismatch
from .geometry import Hyperplane


def default_c(row_dim: int, eps: float) -> float:
    """``8 ln(row_dim / eps^2)``, with ``row_dim`` the length of a sketched row."""
    return 8.0 * math.log(row_dim / (eps * eps))


class Sketch:
    """Single-writer online row sampler for rows of length ``d + 1``.

    Parameters
    ----------
    d : int
        Dimension of the points; stored rows have ``d + 1`` entries.
    eps : float
        Accuracy parameter in ``(0, 1)``.
    delta : float
        Additive spectral slack, ``> 0``. The ridge is ``lam = delta / eps``.
    seed : int, SeedSequence or Generator
        Source of the acceptance coins.
    c : float, optional
        Oversampling constant; defaults to :func:`default_c` of ``d + 1``.
    """

    def __init__(self, d: int, eps: float, delta: float, seed=None, c: float | None = None):
        if int(d) != d or d < 1:
            raise BadParameter("d must be a positive integer")
        if not (0 < eps < 1):
            raise BadParameter("eps must lie in (0, 1)")
        if not delta > 0:
            raise BadParameter("delta must be positive")
        self.d = int(d)
        self.eps = float(eps)
        self.delta = float(delta)
        self.lam = self.delta / self.eps
        self.c = default_c(self.d + 1, self.eps) if c is None else float(c)
        if not self.c > 0:
            raise BadParameter("c must be positive")
        self._rng = np.random.default_rng(seed)
        self._rows: list[np.ndarray] = []
        self.probabilities: list[float] = []
        self.gram = np.zeros((self.d + 1, self.d + 1))
        self.seen_count = 0
        self._stacked: np.ndarray | None = None
        self._refactor()

    @classmethod
    def from_rows(cls, d: int, eps: float, delta: float, rows, seen_count: int, c: float | None = None) -> "Sketch":
        """Rebuild a finished sketch from its stored (already rescaled) rows."""
        s = cls(d, eps, delta, None, c)
        rows = np.asarray(rows, dtype=float).reshape(-1, d + 1)
        s._rows = list(rows)
        s.gram = rows.T @ rows
        s.seen_count = int(seen_count)
        s._refactor()
        return s

    @property
    def params(self) -> dict:
        return {"d": self.d, "eps": self.eps, "delta": self.delta, "lam": self.lam, "c": self.c}

    @property
    def accepted_count(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> np.ndarray:
        if self._stacked is None:
            if self._rows:
                self._stacked = np.vstack(self._rows)
            else:
                self._stacked = np.zeros((0, self.d + 1))
        return self._stacked

    def _refactor(self) -> None:
        M = self.gram + self.lam * np.eye(self.d + 1)
        try:
            self._chol = cho_factor(M, lower=True)
            self._eig = None
        except np.linalg.LinAlgError:
            # ridge below rounding: directions outside the sketch's span get p = 1
            self._chol = None
            self._eig = np.linalg.eigh(M)

    def _quad(self, a: np.ndarray) -> float:
        if self._chol is not None:
            return float(a @ cho_solve(self._chol, a))
        w, V = self._eig
        proj = V.T @ a
        tol = max(self.d + 1, 1) * np.finfo(float).eps * max(float(w[-1]), 0.0)
        if np.any((w <= tol) & (np.abs(proj) > 0)):
            return math.inf
        keep = w > tol
        return float(np.sum(proj[keep] ** 2 / w[keep]))

    def probability(self, a) -> float:
        """Acceptance probability of ``a`` against the current sketch (no state change)."""
        a = self._as_row(a)
        q = self._quad(a)
        return min(self.c * (1.0 + self.eps) * max(q, 0.0), 1.0)

    def offer(self, a) -> bool:
        """Process one stream row; returns whether it was kept."""
        a = self._as_row(a)
        p = self.probability(a)
        self.seen_count += 1
        coin = self._rng.random()
        if p > 0.0 and coin < p:
            row = a / math.sqrt(p)
            self._rows.append(row)
            self.probabilities.append(p)
            self.gram += np.outer(row, row)
            self._stacked = None
            self._refactor()
            return True
        return False

    def extend(self, rows) -> "Sketch":
        for a in np.asarray(rows, dtype=float):
            self.offer(a)
        return self

    def _as_row(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape[0] != self.d + 1:
            raise DimensionMismatch(f"expected a row of length {self.d + 1}, got {a.shape[0]}")
        return a

    def squared_norm(self, u) -> float:
        """``||S u||^2`` summed row by row."""
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.shape[0] != self.d + 1:
            raise DimensionMismatch("coefficient vector has the wrong length")
        if not self._rows:
            return 0.0
        r = self.rows @ u
        return float(r @ r)

    def bounds(self, n: int, h1: Hyperplane, h2: Hyperplane, Delta: float | None = None):
        """Interval ``(lower, upper)`` that contains ``dist(Q, h1, h2)`` with high probability.

        ``n`` is the total stream length. With ``Delta`` given, the slack uses
        ``4 (1 + Delta^2)`` in place of ``||u1 - u2||^2`` (valid for hyperplanes
        passing within ``Delta`` of the origin); with ``Delta=None`` the exact
        ``||u1 - u2||^2`` is used.
        """
        return sketch_bounds(self, n, h1, h2, Delta)


def sketch_new(d: int, eps: float, delta: float, seed=None, c: float | None = None) -> Sketch:
    return Sketch(d, eps, delta, seed, c)


def sketch_offer(s: Sketch, a) -> Sketch:
    s.offer(a)
    return s


def _diff(s: Sketch, h1: Hyperplane, h2: Hyperplane) -> np.ndarray:
    if h1.oriented != h2.oriented:
        raise OrientationMismatch("cannot compare an oriented with an unoriented hyperplane")
    if h1.d != s.d or h2.d != s.d:
        raise DimensionMismatch("hyperplane dimension does not match the sketch")
    return h1.coeffs - h2.coeffs


def sketch_bounds(s: Sketch, n: int, h1: Hyperplane, h2: Hyperplane, Delta: float | None = None):
    if not (0 < s.eps < 1):
        raise BadParameter("eps must lie in (0, 1)")
    if n < 1:
        raise BadParameter("stream length must be positive")
    u = _diff(s, h1, h2)
    if Delta is None:
        slack = s.delta * float(u @ u)
    else:
        if Delta < 0:
            raise BadParameter("Delta must be nonnegative")
        slack = 4.0 * (1.0 + Delta * Delta) * s.delta
    sq = s.squared_norm(u)
    lower = math.sqrt(max(0.0, (sq - slack) / n)) / (1.0 + s.eps)
    upper = math.sqrt((sq + slack) / n) / (1.0 - s.eps)
    return lower, upper


def median_estimate(sketches, h1: Hyperplane, h2: Hyperplane) -> float:
    """Median over sketches of ``||S_k (u1 - u2)||^2``."""
    sketches = list(sketches)
    if not sketches:
        raise EmptyInput("need at least one sketch")
    d = sketches[0].d
    if any(s.d != d for s in sketches):
        raise DimensionMismatch("all sketches must share a dimension")
    vals = [s.squared_norm(_diff(s, h1, h2)) for s in sketches]
    return float(np.median(vals))


def median_dist_estimate(sketches, n: int, h1: Hyperplane, h2: Hyperplane) -> float:
    """``sqrt(median / n)``, the point estimate of ``dist(Q, h1, h2)``."""
    return math.sqrt(median_estimate(sketches, h1, h2) / n)


def row_count_bound(d: int, eps: float, delta: float, spectral_sq: float) -> float:
    """``(d+1) ln(d+1) ln(eps ||A||_2^2 / delta) / eps^2`` without its leading constant."""
    m = d + 1
    return m * math.log(m) * math.log(max(eps * spectral_sq / delta, math.e)) / (eps * eps)


def spectral_sandwich(A, sketch: Sketch, tol: float = 1e-9) -> bool:
    """Check ``(1-eps) A^T A - delta I <= S^T S <= (1+eps) A^T A + delta I``."""
    A = np.asarray(A, dtype=float)
    G = A.T @ A
    S = sketch.rows
    Gs = S.T @ S
    I = np.eye(G.shape[0])
    lo = Gs - ((1 - sketch.eps) * G - sketch.delta * I)
    hi = (1 + sketch.eps) * G + sketch.delta * I - Gs
    scale = tol * max(1.0, float(np.linalg.norm(G, 2)))
    return bool(np.linalg.eigvalsh(lo)[0] >= -scale and np.linalg.eigvalsh(hi)[0] >= -scale)

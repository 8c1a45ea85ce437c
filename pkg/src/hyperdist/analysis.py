"""Downstream analyses built on the distance: clustering, kernel density,
robust line fits on uncertain data."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BadK, DegenerateX, EmptyInput
from .geometry import Hyperplane, PointSet, canonicalize, signed_distances
from .metrics import dist


# -- clustering -------------------------------------------------------------

@dataclass
class KCenterResult:
    centers: list
    assignment: np.ndarray
    radii: list  # covering radius after each added center


def gonzalez_k_center(items, distance, k: int) -> KCenterResult:
    """Farthest-point traversal starting from ``items[0]``.

    ``distance(a, b)`` must be a metric; the returned radius is then at most
    twice the optimal k-center radius.
    """
    items = list(items)
    m = len(items)
    if not 1 <= k <= m:
        raise BadK(f"k must lie in [1, {m}], got {k}")
    centers = [0]
    nearest = np.array([distance(items[0], it) for it in items], dtype=float)
    assignment = np.zeros(m, dtype=int)
    radii = [float(nearest.max())]
    while len(centers) < k:
        c = int(np.argmax(nearest))
        centers.append(c)
        dc = np.array([distance(items[c], it) for it in items], dtype=float)
        closer = dc < nearest
        nearest = np.where(closer, dc, nearest)
        assignment[closer] = len(centers) - 1
        radii.append(float(nearest.max()))
    return KCenterResult(centers, assignment, radii)


def euclidean(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass
class KMeansResult:
    centers: np.ndarray
    assignment: np.ndarray
    wcss: float
    history: list = field(default_factory=list)
    n_iter: int = 0


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = X.shape[0]
    centers = [X[rng.integers(m)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(m))
        else:
            idx = int(rng.choice(m, p=d2 / total))
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return np.array(centers)


def _assign(X: np.ndarray, C: np.ndarray):
    D = np.sum(X * X, axis=1)[:, None] - 2 * X @ C.T + np.sum(C * C, axis=1)[None, :]
    labels = np.argmin(D, axis=1)
    wcss = float(np.sum((X - C[labels]) ** 2))
    return labels, wcss


def lloyds_k_means(vectors, k: int, seed=None, max_iter: int = 100) -> KMeansResult:
    """Lloyd's iterations from k-means++ seeding.

    ``history`` records the within-cluster sum of squares after every
    assignment step; it is nonincreasing.
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m = X.shape[0]
    if not 1 <= k <= m:
        raise BadK(f"k must lie in [1, {m}], got {k}")
    rng = np.random.default_rng(seed)
    C = _kmeanspp(X, k, rng)
    labels, wcss = _assign(X, C)
    history = [wcss]
    it = 0
    for it in range(1, max_iter + 1):
        newC = C.copy()
        for j in range(k):
            members = X[labels == j]
            if len(members):
                newC[j] = members.mean(axis=0)
        new_labels, new_wcss = _assign(X, newC)
        C = newC
        history.append(new_wcss)
        if np.array_equal(new_labels, labels):
            labels, wcss = new_labels, new_wcss
            break
        labels, wcss = new_labels, new_wcss
    return KMeansResult(C, labels, wcss, history, it)


# -- kernel density ---------------------------------------------------------

def _embedding_rows(Q: PointSet, H) -> np.ndarray:
    return np.array([signed_distances(Q, h) for h in H]) / np.sqrt(Q.n)


def kde(Q: PointSet, H, h: Hyperplane) -> float:
    """``mean_i exp(-dist(Q, h, H_i)^2)``; the kernel is unnormalized."""
    H = list(H)
    if not H:
        raise EmptyInput("kernel density needs at least one hyperplane")
    return float(kde_many(Q, H, [h])[0])


def kde_many(Q: PointSet, H, queries) -> np.ndarray:
    H = list(H)
    if not H:
        raise EmptyInput("kernel density needs at least one hyperplane")
    EH = _embedding_rows(Q, H)
    EQ = _embedding_rows(Q, list(queries))
    D2 = np.maximum(
        np.sum(EQ * EQ, axis=1)[:, None] - 2 * EQ @ EH.T + np.sum(EH * EH, axis=1)[None, :], 0.0
    )
    return np.exp(-D2).mean(axis=1)


def kde_sample_size(d: int, eps: float, delta: float) -> int:
    """``ceil((d^2 + ln(1/delta)) / eps^2)`` hyperplanes suffice for an eps-approximate kde."""
    return math.ceil(round((d * d + math.log(1.0 / delta)) / (eps * eps), 9))


# -- robust regression ------------------------------------------------------

def siegel_fit(P) -> tuple[float, float]:
    """Repeated-median slope and intercept of the points ``P``.

    Pairs with equal x are skipped; a point whose partners all share its x
    contributes no slope. Even-length medians average the middle values.
    """
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    if P.shape[0] < 2:
        raise DegenerateX("need at least two points")
    x, y = P[:, 0], P[:, 1]
    dx = x[None, :] - x[:, None]
    dy = y[None, :] - y[:, None]
    valid = dx != 0
    if not valid.any():
        raise DegenerateX("all points share the same x coordinate")
    slopes = np.full(dx.shape, np.nan)
    np.divide(dy, dx, out=slopes, where=valid)
    inner = [np.median(row[ok]) for row, ok in zip(slopes, valid) if ok.any()]
    a = float(np.median(inner))
    b = float(np.median(y - a * x))
    return a, b


def slope_intercept_line(a: float, b: float) -> Hyperplane:
    """Canonical line for ``y = a x + b``."""
    return canonicalize([a, -1.0, b])


def siegel_estimator(P) -> Hyperplane:
    return slope_intercept_line(*siegel_fit(P))


@dataclass(frozen=True, eq=False)
class UncertainPointSet:
    """``n`` uncertain points, each a nonempty list of candidate locations in the plane."""

    locations: tuple

    def __post_init__(self):
        locs = []
        for i, cand in enumerate(self.locations):
            arr = np.asarray(cand, dtype=float).reshape(-1, 2)
            if arr.shape[0] == 0:
                raise EmptyInput(f"uncertain point {i} has no locations")
            arr.setflags(write=False)
            locs.append(arr)
        if not locs:
            raise EmptyInput("need at least one uncertain point")
        object.__setattr__(self, "locations", tuple(locs))

    @property
    def n(self) -> int:
        return len(self.locations)

    def all_points(self) -> PointSet:
        return PointSet(np.vstack(self.locations))

    def traversal(self, choice) -> np.ndarray:
        return np.array([self.locations[i][c] for i, c in enumerate(choice)])

    def sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.locations])


@dataclass
class EstimatorSample:
    lines: list
    slopes: np.ndarray
    intercepts: np.ndarray

    def __len__(self) -> int:
        return len(self.lines)


MAX_RESAMPLE = 100


def _fit_traversal(P: UncertainPointSet, seed: int, j: int):
    rng = np.random.default_rng((seed, j))
    sizes = P.sizes()
    for _ in range(MAX_RESAMPLE):
        choice = rng.integers(0, sizes)
        try:
            return siegel_fit(P.traversal(choice))
        except DegenerateX:
            continue
    raise DegenerateX(f"traversal {j} stayed degenerate after {MAX_RESAMPLE} draws")


def uncertain_siegel_distribution(P: UncertainPointSet, N: int, seed: int = 0, workers: int | None = None) -> EstimatorSample:
    """Siegel fits of ``N`` uniformly random traversals of ``P``.

    Traversal ``j`` draws from its own generator seeded by ``(seed, j)``, so
    the result does not depend on ``workers``.
    """
    if N < 1:
        raise EmptyInput("N must be at least 1")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            fits = list(ex.map(lambda j: _fit_traversal(P, seed, j), range(N)))
    else:
        fits = [_fit_traversal(P, seed, j) for j in range(N)]
    a = np.array([f[0] for f in fits])
    b = np.array([f[1] for f in fits])
    return EstimatorSample([slope_intercept_line(ai, bi) for ai, bi in fits], a, b)


def siegel_sample_size(eps: float, delta: float) -> int:
    """Default ``ceil(4 / eps^2 * ln(2 / delta))`` traversals."""
    return math.ceil(round(4.0 / (eps * eps) * math.log(2.0 / delta), 9))


def empirical_ball_probability(T: EstimatorSample, Q: PointSet, z: Hyperplane, r: float) -> float:
    """Fraction of ``T`` in the closed ball of radius ``r`` around ``z``."""
    if len(T) == 0:
        return 0.0
    if math.isinf(r):
        return 1.0
    E = _embedding_rows(Q, T.lines)
    ez = signed_distances(Q, z) / np.sqrt(Q.n)
    d = np.linalg.norm(E - ez, axis=1)
    return float(np.mean(d <= r))


def coreset_quality(Q: PointSet, h_star: Hyperplane, h_hat: Hyperplane) -> float:
    return dist(Q, h_star, h_hat)

"""Random instance generators and independent reference computations."""
from __future__ import annotations

import itertools

import numpy as np

from hyperdist import CurveK, Hyperplane, PointSet, canonicalize, is_full_rank


def random_points(rng, n, d, scale=1.0) -> PointSet:
    return PointSet(rng.normal(scale=scale, size=(n, d)))


def random_full_rank(rng, n_max, d_max, n_min=None):
    while True:
        d = int(rng.integers(1, d_max + 1))
        lo = d + 1 if n_min is None else max(n_min, d + 1)
        n = int(rng.integers(lo, max(lo, n_max) + 1))
        Q = random_points(rng, n, d)
        if is_full_rank(Q):
            return Q


def random_hyperplane(rng, d, oriented=False, offset_scale=1.0) -> Hyperplane:
    raw = np.append(rng.normal(size=d), rng.normal(scale=offset_scale))
    return canonicalize(raw, oriented)


def random_curve(rng, k, min_len=0.2, min_sin=0.05) -> CurveK:
    """Random polyline whose turns are bounded away from straight."""
    while True:
        steps = rng.normal(size=(k, 2))
        lens = np.linalg.norm(steps, axis=1)
        if np.any(lens < min_len):
            continue
        t = steps / lens[:, None]
        cross = t[:-1, 0] * t[1:, 1] - t[:-1, 1] * t[1:, 0]
        if np.any(np.abs(cross) < min_sin):
            continue
        start = rng.normal(size=(1, 2))
        return CurveK(np.vstack([start, start + np.cumsum(steps, axis=0)]))


def closest_point_on_plane(raw, q):
    """Closest point of ``{x : raw[:d] . x + raw[d] = 0}`` to ``q`` via the KKT system."""
    raw = np.asarray(raw, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q.shape[0]
    K = np.zeros((d + 1, d + 1))
    K[:d, :d] = 2 * np.eye(d)
    K[:d, d] = raw[:d]
    K[d, :d] = raw[:d]
    rhs = np.append(2 * q, -raw[d])
    return np.linalg.solve(K, rhs)[:d]


def brute_sensitivity(A, rng, total=100_000, rounds=4):
    """Largest sampled ``f_a(x_i) / mean_j f_a(x_j)`` with ``f_a(x) = (a . (x, 1))^2``.

    The budget of ``total`` random directions is split over ``rounds``. The
    first round is isotropic; later ones perturb the best direction found so
    far for each point with shrinking Gaussian noise.
    """
    A = np.asarray(A, dtype=float)
    n, m = A.shape
    per = total // rounds
    a = rng.normal(size=(per, m))
    F = (A @ a.T) ** 2
    R = F / F.mean(axis=0)
    best = R.max(axis=1)
    dirs = a[R.argmax(axis=1)]
    for r in range(1, rounds):
        scale = 0.3 * 10.0 ** (-(r - 1))
        for i in range(n):
            base = dirs[i] / np.linalg.norm(dirs[i])
            a = base + scale * rng.normal(size=(per // n, m))
            F = (A @ a.T) ** 2
            Ri = F[i] / F.mean(axis=0)
            j = int(Ri.argmax())
            if Ri[j] > best[i]:
                best[i], dirs[i] = Ri[j], a[j]
    return best


def brute_k_center_radius(items, distance, k):
    m = len(items)
    D = np.array([[distance(a, b) for b in items] for a in items])
    best = np.inf
    for centers in itertools.combinations(range(m), k):
        best = min(best, D[:, list(centers)].min(axis=1).max())
    return best


def repeated_median(points):
    """Plain-Python repeated median, used as a reference."""
    pts = [tuple(map(float, p)) for p in points]

    def med(vals):
        vals = sorted(vals)
        h = len(vals) // 2
        return vals[h] if len(vals) % 2 else 0.5 * (vals[h - 1] + vals[h])

    inner = []
    for i, (xi, yi) in enumerate(pts):
        s = [(yj - yi) / (xj - xi) for j, (xj, yj) in enumerate(pts) if j != i and xj != xi]
        if s:
            inner.append(med(s))
    a = med(inner)
    b = med([y - a * x for x, y in pts])
    return a, b


def line_grid_objective(Q: PointSet, lines, n_angle=360, n_offset=400, pad=1.0):
    """Minimum of the summed squared distance over an angle x offset grid of oriented lines."""
    X = Q.points
    V = np.array([X @ h.normal + h.offset for h in lines])  # m x n
    # the optimal offset is a mean of (V - base), so it lies within this reach
    reach = max(abs(h.offset) for h in lines) + 2 * np.linalg.norm(X, axis=1).max() + pad
    theta = np.linspace(0, 2 * np.pi, n_angle, endpoint=False)
    c = np.linspace(-reach, reach, n_offset)
    best = np.inf
    for th in theta:
        nrm = np.array([np.cos(th), np.sin(th)])
        base = X @ nrm  # n
        # residual(c) = base + c - V_i ; objective = sum_i mean_j (.)^2
        R = base[None, :] - V  # m x n
        s1 = R.sum()
        s2 = (R * R).sum()
        m, n = V.shape
        obj = (s2 + 2 * c * s1 + m * n * c * c) / n
        best = min(best, float(obj.min()))
    return best


def hausdorff_to_polyline(P, vertices):
    """Largest distance from the points ``P`` to the polyline through ``vertices``."""
    P = np.asarray(P, dtype=float)
    best = np.full(len(P), np.inf)
    for a, b in zip(vertices[:-1], vertices[1:]):
        ab = b - a
        t = np.clip((P - a) @ ab / (ab @ ab), 0, 1)
        best = np.minimum(best, np.linalg.norm(P - (a + t[:, None] * ab), axis=1))
    return float(best.max())

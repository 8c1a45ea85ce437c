"""Piecewise-linear curves in the plane compared through their supporting lines.

A curve with ``k`` segments is represented by ``k + 2`` oriented lines: the
support line of every segment, plus two caps perpendicular to the first and
last segment through the curve's endpoints. Line normals are the direction of
travel rotated by +90 degrees; cap normals point along the direction of travel.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateTurn,
    DimensionMismatch,
    EmptyInput,
    MismatchedK,
    ParallelLines,
    TooFewPoints,
)
from .geometry import Hyperplane, PointSet, canonicalize, embed, signed_distances
from .metrics import dist

SEGMENT_TOL = 1e-12
PERP_TOL = 1e-9
PARALLEL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CurveK:
    """A polyline with ``k`` segments, stored as its ``k + 1`` vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise DimensionMismatch(f"curve vertices must be an (m, 2) array, got {v.shape}")
        if v.shape[0] < 2:
            raise TooFewPoints("a curve needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        lengths = np.linalg.norm(np.diff(v, axis=0), axis=1)
        if np.any(lengths <= SEGMENT_TOL):
            raise DegenerateTurn("consecutive vertices must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def k(self) -> int:
        return self.vertices.shape[0] - 1

    def directions(self) -> np.ndarray:
        seg = np.diff(self.vertices, axis=0)
        return seg / np.linalg.norm(seg, axis=1)[:, None]


@dataclass(frozen=True, eq=False)
class LineRepresentation:
    """Lines ``l_0 .. l_{k+1}`` of a curve; caps perpendicular to their neighbours."""

    lines: tuple

    def __post_init__(self):
        lines = tuple(self.lines)
        if len(lines) < 3:
            raise TooFewPoints("a line representation needs at least three lines")
        if any(h.d != 2 for h in lines):
            raise DimensionMismatch("curve lines must live in the plane")
        if abs(lines[0].normal @ lines[1].normal) > PERP_TOL:
            raise ValueError("first cap must be perpendicular to the first segment line")
        if abs(lines[-1].normal @ lines[-2].normal) > PERP_TOL:
            raise ValueError("last cap must be perpendicular to the last segment line")
        object.__setattr__(self, "lines", lines)

    @property
    def k(self) -> int:
        return len(self.lines) - 2

    def __iter__(self):
        return iter(self.lines)

    def __len__(self) -> int:
        return len(self.lines)


def _line_through(normal: np.ndarray, point: np.ndarray, oriented: bool) -> Hyperplane:
    return canonicalize(np.array([normal[0], normal[1], -(normal @ point)]), oriented)


def _left_normal(t: np.ndarray) -> np.ndarray:
    return np.array([-t[1], t[0]])


def curve_to_lines(curve: CurveK, oriented: bool = True) -> LineRepresentation:
    """Supporting lines of ``curve`` plus the two perpendicular caps.

    ``oriented=False`` returns the same lines in unoriented canonical form.
    """
    V = curve.vertices
    T = curve.directions()
    cross = T[:-1, 0] * T[1:, 1] - T[:-1, 1] * T[1:, 0]
    if np.any(np.abs(cross) <= PARALLEL_TOL):
        raise DegenerateTurn("consecutive segments share a support line")
    lines = [_line_through(T[0], V[0], oriented)]
    for j in range(curve.k):
        lines.append(_line_through(_left_normal(T[j]), V[j], oriented))
    lines.append(_line_through(T[-1], V[-1], oriented))
    return LineRepresentation(tuple(lines))


def intersect(h1: Hyperplane, h2: Hyperplane) -> np.ndarray:
    M = np.vstack([h1.normal, h2.normal])
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) <= PARALLEL_TOL:
        raise ParallelLines("lines do not intersect in a single point")
    return np.linalg.solve(M, -np.array([h1.offset, h2.offset]))


def lines_to_curve(rep: LineRepresentation) -> CurveK:
    lines = rep.lines
    return CurveK(np.array([intersect(lines[i], lines[i + 1]) for i in range(len(lines) - 1)]))


def _same_k(c1: CurveK, c2: CurveK) -> None:
    if c1.k != c2.k:
        raise MismatchedK(f"curves have {c1.k} and {c2.k} segments")


def dist_curves(Q: PointSet, c1: CurveK, c2: CurveK) -> float:
    """Root-sum-square of ``dist`` over corresponding lines of the two curves."""
    _same_k(c1, c2)
    r1, r2 = curve_to_lines(c1), curve_to_lines(c2)
    return float(np.sqrt(sum(dist(Q, a, b) ** 2 for a, b in zip(r1, r2))))


def curve_embed(Q: PointSet, curve: CurveK) -> np.ndarray:
    """Concatenated line embeddings, length ``(k + 2) * n``."""
    if Q.d != 2:
        raise DimensionMismatch("curve embeddings need planar points")
    return np.concatenate([embed(Q, h).values for h in curve_to_lines(curve)])


def curve_sample_size(k: int, eps: float, delta: float) -> int:
    """Default coreset size ``2 (k + 2) / (delta eps^2)`` for curve distances."""
    return int(np.ceil(round(2 * (k + 2) / (delta * eps * eps), 9)))


# -- simplification ---------------------------------------------------------

def _seg_dist(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = ab @ ab
    if denom == 0.0:
        return np.linalg.norm(P - a, axis=1)
    t = np.clip((P - a) @ ab / denom, 0.0, 1.0)
    return np.linalg.norm(P - (a + t[:, None] * ab), axis=1)


def _dedup(P: np.ndarray) -> np.ndarray:
    keep = np.ones(len(P), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(P, axis=0), axis=1) > SEGMENT_TOL
    return P[keep]


def simplify_to_k(polyline, k: int) -> CurveK:
    """Douglas-Peucker simplification stopped at exactly ``k`` segments.

    Vertices are inserted in order of decreasing deviation from the current
    simplification (best-first recursion), so the output keeps the ``k + 1``
    most important input points. Ties go to the lower index.
    """
    if k < 1:
        raise TooFewPoints("k must be at least 1")
    P = _dedup(np.asarray(polyline, dtype=float).reshape(-1, 2))
    m = len(P)
    if m < k + 1:
        raise TooFewPoints(f"need at least {k + 1} distinct points, got {m}")
    keep = {0, m - 1}
    heap: list = []

    def push(i: int, j: int) -> None:
        if j - i < 2:
            return
        dev = _seg_dist(P[i + 1 : j], P[i], P[j])
        idx = int(np.argmax(dev))
        heapq.heappush(heap, (-float(dev[idx]), i + 1 + idx, i, j))

    push(0, m - 1)
    while len(keep) < k + 1:
        _, idx, i, j = heapq.heappop(heap)
        keep.add(idx)
        push(i, idx)
        push(idx, j)
    return CurveK(P[sorted(keep)])


# -- means ------------------------------------------------------------------

@dataclass(frozen=True)
class LineMeanSolution:
    """Minimizer of the summed squared distance to a set of oriented lines.

    ``rotated`` is the unit normal in the eigenbasis ``P`` of the quadratic
    form (``normal = P @ rotated``), ``eig`` holds ``(e1, e2, e3, e4)`` and
    ``multiplier`` the Lagrange multiplier of the unit-circle constraint.
    """

    line: Hyperplane
    rotated: np.ndarray
    eig: tuple
    multiplier: float
    objective: float


def _mean_objective(Q: PointSet, lines, h: Hyperplane) -> float:
    return float(sum(dist(Q, h, g) ** 2 for g in lines))


def _quartic_roots(e1, e2, e3, e4) -> np.ndarray:
    # e3^2 (e2+t)^2 + e4^2 (e1+t)^2 - 4 (e1+t)^2 (e2+t)^2 = 0
    P1 = np.poly1d([1.0, e1])
    P2 = np.poly1d([1.0, e2])
    poly = e3 * e3 * P2 * P2 + e4 * e4 * P1 * P1 - 4.0 * P1 * P1 * P2 * P2
    coeffs = np.trim_zeros(poly.coeffs, "f")
    if coeffs.size < 2:
        return np.zeros(0)
    companion = np.diag(np.ones(coeffs.size - 2), -1)
    companion[0, :] = -coeffs[1:] / coeffs[0]
    roots = np.linalg.eigvals(companion)
    real = roots[np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots.real))].real
    return real


def _circle_candidates(e1, e2, e3, e4) -> list:
    cands = []
    for lam in _quartic_roots(e1, e2, e3, e4):
        if abs(e1 + lam) > 1e-300 and abs(e2 + lam) > 1e-300:
            cands.append((-e3 / (2 * (e1 + lam)), -e4 / (2 * (e2 + lam))))
    # multiplier equal to -e1 or -e2: one coordinate is free
    if e1 != e2:
        b = -e4 / (2 * (e2 - e1))
        if abs(b) <= 1.0:
            a = np.sqrt(1.0 - b * b)
            cands += [(a, b), (-a, b)]
        a = -e3 / (2 * (e1 - e2))
        if abs(a) <= 1.0:
            b = np.sqrt(1.0 - a * a)
            cands += [(a, b), (a, -b)]
    cands += [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
    out = []
    for a, b in cands:
        r = np.hypot(a, b)
        if r > 0 and abs(r - 1.0) <= 1e-6:
            out.append(np.array([a, b]) / r)
    return out


def _circle_value(e, ab) -> float:
    e1, e2, e3, e4 = e
    return e1 * ab[0] ** 2 + e2 * ab[1] ** 2 + e3 * ab[0] + e4 * ab[1]


def _polish(e, ab: np.ndarray) -> np.ndarray:
    # Newton on the angle; the quartic roots already sit in the right basin
    e1, e2, e3, e4 = e
    th = np.arctan2(ab[1], ab[0])
    for _ in range(20):
        c, s = np.cos(th), np.sin(th)
        g = 2 * (e2 - e1) * s * c - e3 * s + e4 * c
        H = 2 * (e2 - e1) * (c * c - s * s) - e3 * c - e4 * s
        if H <= 0:
            break
        step = g / H
        th -= step
        if abs(step) < 1e-16:
            break
    cand = np.array([np.cos(th), np.sin(th)])
    return cand if _circle_value(e, cand) <= _circle_value(e, ab) else ab


def _leading_sign(nrm: np.ndarray) -> int:
    for x in nrm:
        if abs(x) > 1e-9:
            return 1 if x > 0 else -1
    return 0


def lagrange_multiplier(e, ab) -> float:
    """Least-squares multiplier for the stationarity equations at ``ab``."""
    e1, e2, e3, e4 = e
    a, b = ab
    return float(-(a * (2 * e1 * a + e3) + b * (2 * e2 * b + e4)) / (2 * (a * a + b * b)))


def lagrangian_residual(e, ab, lam: float) -> float:
    e1, e2, e3, e4 = e
    a, b = ab
    g = np.array([2 * e1 * a + e3 + 2 * lam * a, 2 * e2 * b + e4 + 2 * lam * b, a * a + b * b - 1])
    return float(np.max(np.abs(g)))


def solve_mean_line(lines, Q: PointSet) -> LineMeanSolution:
    """Closed-form mean of oriented lines under the data-dependent distance.

    The offset is eliminated exactly, the remaining quadratic in the unit
    normal is diagonalized, and the stationarity conditions on the unit
    circle reduce to a quartic in the multiplier whose roots come from a
    companion matrix. Every real candidate is evaluated and the best kept.
    """
    lines = list(lines)
    if not lines:
        raise EmptyInput("need at least one line")
    if Q.d != 2 or any(h.d != 2 for h in lines):
        raise DimensionMismatch("line means are defined in the plane")
    m, n = len(lines), Q.n
    x, y = Q.points[:, 0], Q.points[:, 1]
    Dm = np.array([signed_distances(Q, h) for h in lines])  # m x n
    X, Y = x.sum(), y.sum()
    X2, Y2, XY = x @ x, y @ y, x @ y
    D = Dm.sum()
    XD = float(Dm.sum(axis=0) @ x)
    YD = float(Dm.sum(axis=0) @ y)
    al1 = m * X2 - m * X * X / n
    al2 = m * Y2 - m * Y * Y / n
    al3 = 2 * m * XY - 2 * m * X * Y / n
    al4 = 2 * D * X / n - 2 * XD
    al5 = 2 * D * Y / n - 2 * YD
    A = np.array([[al1, al3 / 2], [al3 / 2, al2]])
    evals, P = np.linalg.eigh(A)
    e1, e2 = evals
    e3, e4 = np.array([al4, al5]) @ P
    e = (float(e1), float(e2), float(e3), float(e4))

    cands = [_polish(e, ab) for ab in _circle_candidates(*e)]
    vals = np.array([_circle_value(e, ab) for ab in cands])
    scale = 1e-12 * (abs(e1) + abs(e2) + abs(e3) + abs(e4) + 1e-300)
    tied = [ab for ab, v in zip(cands, vals) if v <= vals.min() + scale]
    # exact ties (e.g. e3 = e4 = 0) go to the normal with a positive leading entry
    best = max(tied, key=lambda ab: (_leading_sign(P @ ab), -_circle_value(e, ab)))
    ab = P @ best
    a, b = ab / np.hypot(*ab)
    c = -(a * m * X + b * m * Y - D) / (m * n)
    line = Hyperplane(np.array([a, b, c]), oriented=True)
    lam = lagrange_multiplier(e, best)
    return LineMeanSolution(line, best, e, lam, _mean_objective(Q, lines, line))


def mean_oriented_lines(lines, Q: PointSet) -> Hyperplane:
    """Oriented line minimizing the summed squared ``dist`` to ``lines``."""
    lines = list(lines)
    if any(not h.oriented for h in lines):
        raise ValueError("mean_oriented_lines expects oriented lines")
    return solve_mean_line(lines, Q).line


def mean_curve(curves, Q: PointSet) -> CurveK:
    """Mean of curves with the same ``k``.

    Segment lines are averaged index by index. Each cap is the perpendicular
    to the mean first (last) segment line through the projection of the
    centroid of the curves' first (last) vertices onto that line.
    """
    curves = list(curves)
    if not curves:
        raise EmptyInput("need at least one curve")
    k = curves[0].k
    if any(c.k != k for c in curves):
        raise MismatchedK("all curves must have the same number of segments")
    reps = [curve_to_lines(c) for c in curves]
    seg_lines = [mean_oriented_lines([r.lines[i] for r in reps], Q) for i in range(1, k + 1)]

    def cap(seg: Hyperplane, pts: np.ndarray) -> Hyperplane:
        nrm = seg.normal
        t = np.array([nrm[1], -nrm[0]])  # direction of travel
        centroid = pts.mean(axis=0)
        foot = centroid - (nrm @ centroid + seg.offset) * nrm
        return _line_through(t, foot, True)

    first = cap(seg_lines[0], np.array([c.vertices[0] for c in curves]))
    last = cap(seg_lines[-1], np.array([c.vertices[-1] for c in curves]))
    return lines_to_curve(LineRepresentation((first, *seg_lines, last)))

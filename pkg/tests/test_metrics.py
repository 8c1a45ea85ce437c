import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperdist import (
    DimensionMismatch,
    NonpositiveWeight,
    NotFullRank,
    OrientationMismatch,
    PointSet,
    canonicalize,
    dist,
    dist_frobenius,
    dist_unsigned,
    dist_weighted,
    lift_ball,
    lift_membership,
    metric_status,
    projection_matrix,
    signed_distance,
)
from helpers import closest_point_on_plane, random_full_rank, random_hyperplane

TRI = PointSet([[0, 0], [1, 0], [0, 1]])
Y0 = canonicalize((0, 1, 0))
X0 = canonicalize((1, 0, 0))


def horiz(c):
    """The line y = c."""
    return canonicalize((0, 1, -c))


def ref_dist(Q, h1, h2):
    """Loop over the points, one signed distance at a time."""
    s = sum((signed_distance(h1, q) - signed_distance(h2, q)) ** 2 for q in Q.points)
    return np.sqrt(s / Q.n)


# -- dist -------------------------------------------------------------------

def test_dist_examples():
    assert dist(TRI, Y0, X0) == pytest.approx(np.sqrt(2 / 3), abs=1e-15)
    assert dist(TRI, Y0, Y0) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(5):
        Q = PointSet(rng.normal(size=(7, 2)))
        assert dist(Q, horiz(1), horiz(3)) == pytest.approx(2.0, abs=1e-12)


def test_dist_rejects_mixed_inputs():
    with pytest.raises(DimensionMismatch):
        dist(TRI, Y0, canonicalize((0, 0, 1, 0)))
    with pytest.raises(OrientationMismatch):
        dist(TRI, Y0, canonicalize((0, 1, 0), oriented=True))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dist_matches_design_matrix_identity(seed):
    rng = np.random.default_rng(seed)
    Q = random_full_rank(rng, 20, 4)
    h1, h2 = random_hyperplane(rng, Q.d), random_hyperplane(rng, Q.d)
    A = np.hstack([Q.points, np.ones((Q.n, 1))])
    expected = np.linalg.norm(A @ (h1.coeffs - h2.coeffs)) / np.sqrt(Q.n)
    assert dist(Q, h1, h2) == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert dist(Q, h1, h2) == pytest.approx(ref_dist(Q, h1, h2), rel=1e-12, abs=1e-15)
    assert dist(Q, h1, h2) == dist(Q, h2, h1)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dist_rigid_motion_invariance(seed):
    rng = np.random.default_rng(seed)
    Q = random_full_rank(rng, 15, 3)
    d = Q.d
    # oriented: the sign rule of unoriented hyperplanes is not rotation covariant
    h1, h2 = random_hyperplane(rng, d, oriented=True), random_hyperplane(rng, d, oriented=True)
    R, _ = np.linalg.qr(rng.normal(size=(d, d)))
    t = rng.normal(size=d)
    Q2 = PointSet(Q.points @ R.T + t)

    def move(h):
        nrm = R @ h.normal
        return canonicalize(np.append(nrm, h.offset - nrm @ t), oriented=True)

    assert dist(Q2, move(h1), move(h2)) == pytest.approx(dist(Q, h1, h2), abs=1e-9)


def test_unoriented_representative_can_flip_under_rotation():
    # a quarter turn sends y = 1 to x = -1, stored as (1, 0, 1), while x = 1 keeps its sign
    Q = PointSet([[0, 0], [1, 0], [0, 1]])
    h1, h2 = canonicalize((1, 0, -1)), canonicalize((0, 1, -1))
    R = np.array([[0.0, -1.0], [1.0, 0.0]])
    Q2 = PointSet(Q.points @ R.T)
    moved = [canonicalize(np.append(R @ h.normal, h.offset)) for h in (h1, h2)]
    assert np.allclose(moved[0].coeffs, (0, 1, -1)) and np.allclose(moved[1].coeffs, (1, 0, 1))
    assert dist(Q2, *moved) != pytest.approx(dist(Q, h1, h2))


def test_metric_status():
    assert metric_status(TRI) == "metric"
    assert metric_status(PointSet([[0, 0], [1, 1], [2, 2]])) == "pseudo-metric"


# -- weighted ---------------------------------------------------------------

def test_dist_weighted_examples():
    uniform = PointSet(TRI.points, np.full(3, 1 / 3))
    assert dist_weighted(uniform, Y0, X0) == pytest.approx(dist(TRI, Y0, X0), abs=1e-15)
    single = PointSet([[0, 0]], [4.0])
    assert dist_weighted(single, horiz(0), horiz(1)) == pytest.approx(2.0, abs=1e-15)
    rng = np.random.default_rng(1)
    W = PointSet(rng.normal(size=(6, 2)), rng.uniform(0.1, 3, size=6))
    assert dist_weighted(W, X0, X0) == 0.0


def test_dist_weighted_explicit_weights():
    with pytest.raises(NonpositiveWeight):
        dist_weighted(TRI, Y0, X0, weights=[1.0, -1.0, 1.0])
    w = np.array([0.5, 2.0, 1.0])
    r = np.array([0.0, 1.0, -1.0])  # (y=0) minus (x=0) on TRI
    assert dist_weighted(TRI, Y0, X0, weights=w) == pytest.approx(np.sqrt(w @ r**2), abs=1e-15)


# -- unsigned and Frobenius -------------------------------------------------

def test_dist_unsigned_examples():
    assert dist_unsigned(TRI, Y0, Y0) == 0.0
    on_axis = PointSet([[0, 0], [1, 0], [3, 0]])
    assert dist_unsigned(on_axis, horiz(1), horiz(-1)) == 0.0
    below = PointSet([[0, 0], [1, -2], [3, 0.5]])
    assert dist_unsigned(below, horiz(1), horiz(3)) == pytest.approx(2.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dist_unsigned_at_most_signed(seed):
    rng = np.random.default_rng(seed)
    Q = random_full_rank(rng, 20, 4)
    h1, h2 = random_hyperplane(rng, Q.d), random_hyperplane(rng, Q.d)
    assert dist_unsigned(Q, h1, h2) <= dist(Q, h1, h2) + 1e-12


def test_dist_frobenius_examples():
    assert dist_frobenius(TRI, Y0, Y0) == 0.0
    rng = np.random.default_rng(2)
    Q = PointSet(rng.normal(size=(9, 2)))
    assert dist_frobenius(Q, horiz(0), horiz(1)) == pytest.approx(3.0, abs=1e-12)
    pair = PointSet([[0, 0], [2, 0]])
    assert dist_frobenius(pair, X0, canonicalize((1, 0, -1))) == pytest.approx(np.sqrt(2), abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_projection_rows_match_closest_points(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    Q = PointSet(rng.normal(size=(6, d)))
    raw = rng.normal(size=d + 1)
    h = canonicalize(raw)
    P = projection_matrix(Q, h).rows
    expected = np.array([closest_point_on_plane(raw, q) - q for q in Q.points])
    assert np.allclose(P, expected, atol=1e-9)


def test_projection_matrix_rejects_non_normal_rows():
    from hyperdist.metrics import ProjectionMatrix

    with pytest.raises(ValueError):
        ProjectionMatrix(np.array([[1.0, 0.0]]), Y0)


# -- lifting ----------------------------------------------------------------

def test_lift_ball_dimension_count():
    ball = lift_ball(TRI, Y0, 0.5)
    assert ball.lifted_dim == 9
    assert ball.coefficients().shape == (10,)
    assert ball.quadratic[2, 2] == TRI.n


def test_lift_ball_zero_radius_constant():
    rng = np.random.default_rng(3)
    Q = random_full_rank(rng, 10, 3)
    h0 = random_hyperplane(rng, Q.d)
    v = Q.points @ h0.normal + h0.offset
    assert lift_ball(Q, h0, 0.0).a0 == pytest.approx(v @ v, rel=1e-12)


def test_lift_value_at_center():
    rng = np.random.default_rng(4)
    for _ in range(20):
        Q = random_full_rank(rng, 10, 3)
        h0 = random_hyperplane(rng, Q.d)
        r = float(rng.uniform(0, 2))
        ball = lift_ball(Q, h0, r)
        assert ball.value(h0) == pytest.approx(-Q.n * r * r, abs=1e-9)
        assert lift_membership(ball, h0)


def test_lift_ball_boundary_is_closed():
    ball = lift_ball(TRI, Y0, dist(TRI, Y0, X0))
    assert lift_membership(ball, X0)
    Q = PointSet([[0, 0], [1, 0], [0, 1], [2, 3]])
    assert lift_membership(lift_ball(Q, horiz(0), 1.0), horiz(1))
    assert not lift_membership(lift_ball(Q, horiz(0), 0.999), horiz(1))


def test_lift_ball_rejects_rank_deficient():
    with pytest.raises(NotFullRank):
        lift_ball(PointSet([[0, 0], [1, 1], [2, 2]]), Y0, 1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lift_membership_matches_direct(seed):
    rng = np.random.default_rng(seed)
    Q = random_full_rank(rng, 12, 3)
    h0, h = random_hyperplane(rng, Q.d), random_hyperplane(rng, Q.d)
    r = float(rng.uniform(0, 3))
    gap = dist(Q, h0, h) - r
    if abs(gap) > 1e-9:
        assert lift_membership(lift_ball(Q, h0, r), h) == (gap < 0)


def test_lifted_value_equals_scaled_squared_gap():
    rng = np.random.default_rng(5)
    Q = random_full_rank(rng, 10, 2)
    h0, h = random_hyperplane(rng, Q.d), random_hyperplane(rng, Q.d)
    r = 0.7
    ball = lift_ball(Q, h0, r)
    assert ball.value(h) == pytest.approx(Q.n * (dist(Q, h0, h) ** 2 - r * r), rel=1e-10)

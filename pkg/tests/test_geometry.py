import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gngstream import geometry as g
from gngstream.errors import DegenerateInput

import oracles

SQUARE = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)


def random_shape(rng, n=None):
    n = n or int(rng.integers(8, 60))
    pts = rng.normal(size=(n, 2)) * rng.uniform(0.5, 2.0, size=2) + rng.uniform(-1, 1, size=2)
    return g.alpha_shape(pts)


# -- triangulation -----------------------------------------------------------------

def test_unit_square_two_triangles():
    tri = g.delaunay_triangulate(SQUARE)
    assert len(tri.triangles) == 2
    assert tri.areas().sum() == pytest.approx(1.0, abs=1e-12)


def test_three_points_one_triangle():
    tri = g.delaunay_triangulate([[0, 0], [2, 0], [0, 1]])
    assert len(tri.triangles) == 1


@pytest.mark.parametrize("pts", [
    [[0, 0], [1, 1]],
    [[0, 0], [1, 1], [2, 2], [3, 3]],
    [[1, 1], [1, 1], [1, 1]],
    [[0, 0], [1, 0], [1, 0], [0, 0]],
])
def test_degenerate_inputs_raise(pts):
    with pytest.raises(DegenerateInput):
        g.delaunay_triangulate(pts)


def test_near_duplicates_are_merged():
    pts = np.vstack([SQUARE, SQUARE[0] + 1e-13])
    assert len(g.delaunay_triangulate(pts).points) == 4


@pytest.mark.parametrize("seed", range(10))
def test_triangulation_covers_hull(seed):
    pts = np.random.default_rng(seed).random((50, 2))
    hull = oracles.gift_wrap_hull(pts)
    tri = g.delaunay_triangulate(pts)
    assert tri.areas().sum() == pytest.approx(oracles.polygon_area(hull), abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_empty_circumcircle(seed):
    pts = np.random.default_rng(seed).random((60, 2))
    tri = g.delaunay_triangulate(pts)
    for a, b, c in tri.coords():
        worst = max(oracles.in_circumcircle(a, b, c, p) for p in tri.points)
        assert worst <= 1e-9
    assert np.all(g.triangle_areas(tri.coords(), signed=True) > 1e-12)


def test_circumradii_match_side_formula(rng):
    tri = g.delaunay_triangulate(rng.random((40, 2)))
    want = [oracles.circumradius(*t) for t in tri.coords()]
    np.testing.assert_allclose(tri.circumradii(), want, rtol=1e-9)


# -- alpha complex ------------------------------------------------------------------

def test_square_alpha_keeps_both():
    tri = g.delaunay_triangulate(SQUARE)
    np.testing.assert_allclose(tri.circumradii(), math.sqrt(2) / 2)
    shape = g.alpha_complex(tri, 0.8)
    assert len(shape) == 2
    assert g.shape_area(shape) == pytest.approx(1.0)


def test_alpha_zero_and_infinity(rng):
    tri = g.delaunay_triangulate(rng.random((30, 2)))
    assert g.alpha_complex(tri, 0.0).is_empty
    assert g.shape_area(g.alpha_complex(tri, 0.0)) == 0.0
    full = g.alpha_complex(tri, math.inf)
    assert len(full) == len(tri.triangles)


def test_negative_alpha_rejected():
    with pytest.raises(ValueError):
        g.alpha_complex(g.delaunay_triangulate(SQUARE), -1.0)


def test_select_alpha_square():
    want = 2.0 * (4 + math.sqrt(2)) / 5
    assert g.select_alpha(SQUARE) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(2.166, abs=1e-3)


@given(st.integers(0, 10_000), st.sampled_from([2.0, 0.5, 8.0]))
def test_select_alpha_scale_equivariant(seed, k):
    pts = np.random.default_rng(seed).normal(size=(25, 2))
    assert g.select_alpha(k * pts) == pytest.approx(k * g.select_alpha(pts), rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_auto_alpha_covers_gaussian(seed):
    pts = np.random.default_rng(seed).normal(size=(200, 2))
    tri = g.delaunay_triangulate(pts)
    shape = g.alpha_complex(tri, g.select_alpha(pts, tri))
    used = np.unique(tri.triangles[shape.indices])
    assert len(used) / len(tri.points) >= 0.95


@pytest.mark.parametrize("seed", range(100))
def test_alpha_complex_subset_of_delaunay(seed):
    r = np.random.default_rng(seed)
    pts = r.normal(size=(int(r.integers(5, 80)), 2))
    tri = g.delaunay_triangulate(pts)
    alpha = r.uniform(0, 2) * g.select_alpha(pts, tri)
    shape = g.alpha_complex(tri, alpha)
    delaunay = {tuple(sorted(t)) for t in tri.triangles.tolist()}
    kept = {tuple(sorted(t)) for t in tri.triangles[shape.indices].tolist()}
    assert kept <= delaunay
    np.testing.assert_array_equal(shape.triangles, tri.points[tri.triangles[shape.indices]])
    assert np.all(g.circumradii(shape.triangles) <= alpha + 1e-9 * tri.scale)


@given(st.integers(0, 10_000))
def test_area_monotone_in_alpha(seed):
    r = np.random.default_rng(seed)
    tri = g.delaunay_triangulate(r.normal(size=(40, 2)))
    alphas = np.sort(r.uniform(0, 3, size=6))
    areas = [g.shape_area(g.alpha_complex(tri, a)) for a in alphas]
    assert all(x <= y + 1e-12 for x, y in zip(areas, areas[1:]))


# -- area and IoU ---------------------------------------------------------------------

def test_shifted_square_iou_is_one_third():
    a = g.alpha_shape(SQUARE, alpha=0.8)
    b = g.alpha_shape(SQUARE + [0.5, 0.0], alpha=0.8)
    assert g.iou(a, b) == pytest.approx(1 / 3, abs=1e-9)
    assert g.intersection_area(a, b) == pytest.approx(0.5, abs=1e-12)


def test_iou_identity_disjoint_empty(rng):
    a = random_shape(rng)
    assert g.iou(a, a) == pytest.approx(1.0, abs=1e-9)
    far = g.AlphaShape(a.triangles + 100.0, a.alpha)
    assert g.iou(a, far) == 0.0
    empty = g.AlphaShape(np.zeros((0, 3, 2)), 0.0)
    assert g.iou(empty, empty) == 0.0
    assert g.iou(a, empty) == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_area_matches_monte_carlo(seed):
    # unit-box points: the sampling error is then well under the tolerance
    shape = g.alpha_shape(np.random.default_rng(seed).random((40, 2)))
    est, _, _ = oracles.monte_carlo(shape.triangles, shape.triangles, seed=seed)
    assert g.shape_area(shape) == pytest.approx(est, abs=0.01)


def test_iou_matches_monte_carlo_100_pairs():
    r = np.random.default_rng(2024)
    worst = 0.0
    for k in range(100):
        a = random_shape(r, n=30)
        shift = r.uniform(-1.5, 1.5, size=2)
        b = g.AlphaShape(random_shape(r, n=30).triangles + shift, 1.0)
        _, _, mc = oracles.monte_carlo(a.triangles, b.triangles, seed=k)
        worst = max(worst, abs(g.iou(a, b) - mc))
    assert worst <= 0.01


@given(st.integers(0, 10_000))
def test_iou_symmetric_and_bounded(seed):
    r = np.random.default_rng(seed)
    a, b = random_shape(r), random_shape(r)
    ab, ba = g.iou(a, b), g.iou(b, a)
    assert ab == pytest.approx(ba, abs=1e-12)
    assert 0.0 <= ab <= 1.0


@pytest.mark.parametrize("seed", range(10))
def test_numba_and_numpy_kernels_agree(seed):
    r = np.random.default_rng(seed)
    a, b = random_shape(r), random_shape(r)
    x = g.intersection_area(a, b, use_numba=True)
    y = g.intersection_area(a, b, use_numba=False)
    assert x == pytest.approx(y, rel=1e-12, abs=1e-14)


def test_clockwise_triangles_are_handled():
    a = g.alpha_shape(SQUARE, alpha=0.8)
    cw = g.AlphaShape(a.triangles[:, ::-1], a.alpha)
    assert g.iou(a, cw) == pytest.approx(1.0)


def test_contains():
    shape = g.alpha_shape(SQUARE, alpha=0.8)
    mask = shape.contains([[0.5, 0.5], [1.5, 0.5], [1.0, 1.0]])
    assert mask.tolist() == [True, False, True]

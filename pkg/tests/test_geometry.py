"""Scalar geometry kernels: worked examples, edge cases, randomized properties."""
import math

import numpy as np
import pytest

from gridjoin import geometry
from gridjoin.errors import UsageError
from gridjoin.geometry import Mbb, Point2D

from helpers import (
    convex_polygon,
    halfplane_classify,
    projection_distance_sq,
    sampled_min_distance_sq,
    unit_square,
)


def test_point2d_rejects_non_finite():
    with pytest.raises(UsageError):
        Point2D(float("nan"), 0.0)
    with pytest.raises(UsageError):
        Point2D(0.0, float("inf"))


def test_mbb_rejects_inverted_and_non_finite():
    with pytest.raises(UsageError):
        Mbb(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(UsageError):
        Mbb(0.0, float("nan"), 1.0, 1.0)
    m = Mbb(2.0, 2.0, 2.0, 2.0)  # degenerate box is fine
    assert (m.x1, m.y1, m.x2, m.y2) == (2.0, 2.0, 2.0, 2.0)


def test_segment_distance_interior_projection():
    assert geometry.point_segment_distance_sq((0.0, 0.5), (1.0, 0.0), (1.0, 1.0)) == 1.0


def test_segment_distance_endpoint_clamp():
    assert geometry.point_segment_distance_sq((2.0, 2.0), (0.0, 0.0), (1.0, 0.0)) == 5.0


def test_segment_distance_point_on_segment():
    assert geometry.point_segment_distance_sq((0.3, 0.0), (0.0, 0.0), (1.0, 0.0)) == 0.0


def test_segment_distance_degenerate_segment():
    assert geometry.point_segment_distance_sq((1.0, 1.0), (0.0, 0.0), (0.0, 0.0)) == 2.0


def test_segment_distance_accepts_point2d():
    d = geometry.point_segment_distance_sq(Point2D(0.0, 0.5), Point2D(1.0, 0.0), Point2D(1.0, 1.0))
    assert d == 1.0


def test_polyline_distance_single_vertex():
    assert geometry.point_polyline_distance_sq((0.0, 0.0), [(1.0, 0.0)]) == 1.0


def test_polyline_distance_takes_min_over_segments():
    # segment (1,0)-(1,2) gives 0.25, segment (0,0)-(1,0) gives 1.0
    d = geometry.point_polyline_distance_sq((0.5, 1.0), [(0.0, 0.0), (1.0, 0.0), (1.0, 2.0)])
    assert d == 0.25


def test_polyline_distance_endpoint_case():
    assert geometry.point_polyline_distance_sq((5.0, 5.0), [(0.0, 0.0), (1.0, 0.0)]) == 41.0


def test_polyline_distance_empty_is_error():
    with pytest.raises(UsageError):
        geometry.point_polyline_distance_sq((0.0, 0.0), [])


def test_ray_crossing_unit_square():
    assert geometry.ray_crossing_ring((0.5, 0.5), unit_square()) is True
    assert geometry.ray_crossing_ring((2.0, 2.0), unit_square()) is False


def test_ray_crossing_orientation_independent():
    assert geometry.ray_crossing_ring((0.5, 0.5), list(reversed(unit_square()))) is True


def test_ray_crossing_short_ring_is_error():
    with pytest.raises(UsageError):
        geometry.ray_crossing_ring((0.0, 0.0), [(0.0, 0.0), (1.0, 0.0)])


def test_point_in_polygon_simple():
    assert geometry.point_in_polygon((0.5, 0.5), [unit_square()]) is True


def test_point_in_polygon_hole_flips_parity():
    hole = [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]
    assert geometry.point_in_polygon((0.5, 0.5), [unit_square(), hole]) is False
    assert geometry.point_in_polygon((0.1, 0.1), [unit_square(), hole]) is True


def test_mbb_of_examples():
    assert geometry.mbb_of([(1.0, 2.0)]) == Mbb(1.0, 2.0, 1.0, 2.0)
    assert geometry.mbb_of([(0.0, 0.0), (3.0, 1.0), (1.0, 4.0)]) == Mbb(0.0, 0.0, 3.0, 4.0)
    assert geometry.mbb_of([(-1.0, -1.0), (-2.0, -3.0)]) == Mbb(-2.0, -3.0, -1.0, -1.0)


def test_mbb_of_empty_is_error():
    with pytest.raises(UsageError):
        geometry.mbb_of([])


def test_mbb_expand_examples():
    assert geometry.mbb_expand(Mbb(0.0, 0.0, 1.0, 1.0), 0.0) == Mbb(0.0, 0.0, 1.0, 1.0)
    assert geometry.mbb_expand(Mbb(0.0, 0.0, 1.0, 1.0), 0.5) == Mbb(-0.5, -0.5, 1.5, 1.5)
    assert geometry.mbb_expand(Mbb(2.0, 2.0, 2.0, 2.0), 1.0) == Mbb(1.0, 1.0, 3.0, 3.0)


def test_mbb_expand_negative_is_error():
    with pytest.raises(UsageError):
        geometry.mbb_expand(Mbb(0.0, 0.0, 1.0, 1.0), -0.1)


def test_segment_distance_endpoint_swap_symmetry():
    rng = np.random.default_rng(7)
    vals = rng.uniform(-100.0, 100.0, (10_000, 6))
    for px, py, ax, ay, bx, by in vals:
        d1 = geometry.segment_distance_sq(px, py, ax, ay, bx, by)
        d2 = geometry.segment_distance_sq(px, py, bx, by, ax, ay)
        assert d1 == d2  # bitwise, not approximately


def test_segment_distance_bounded_by_endpoints():
    rng = np.random.default_rng(11)
    vals = rng.uniform(-100.0, 100.0, (10_000, 6))
    for px, py, ax, ay, bx, by in vals:
        d = geometry.segment_distance_sq(px, py, ax, ay, bx, by)
        da2 = (px - ax) ** 2 + (py - ay) ** 2
        db2 = (px - bx) ** 2 + (py - by) ** 2
        cap = min(da2, db2)
        assert d <= cap + 1e-9 * max(cap, 1.0)


def test_segment_distance_vs_dense_sampling():
    rng = np.random.default_rng(13)
    pts = rng.uniform(-100.0, 100.0, (10_000, 2))
    segs = rng.uniform(-100.0, 100.0, (10_000, 4))
    oracle = sampled_min_distance_sq(pts, segs, 10_000)
    for i in range(pts.shape[0]):
        d = geometry.segment_distance_sq(pts[i, 0], pts[i, 1],
                                         segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3])
        len2 = (segs[i, 2] - segs[i, 0]) ** 2 + (segs[i, 3] - segs[i, 1]) ** 2
        gap = len2 / (4.0 * 10_000.0 ** 2)
        # true min is below every sample but within sampling resolution of one
        assert d <= oracle[i] * (1.0 + 1e-7) + 1e-12
        assert oracle[i] <= d + gap + 1e-7 * max(d, 1.0)


def test_segment_distance_vs_projection_formula():
    rng = np.random.default_rng(17)
    pts = rng.uniform(-50.0, 50.0, (10_000, 2))
    a = rng.uniform(-50.0, 50.0, (10_000, 2))
    b = rng.uniform(-50.0, 50.0, (10_000, 2))
    expected = projection_distance_sq(pts, a, b)
    for i in range(pts.shape[0]):
        d = geometry.segment_distance_sq(pts[i, 0], pts[i, 1], a[i, 0], a[i, 1], b[i, 0], b[i, 1])
        assert d == pytest.approx(expected[i], rel=1e-9, abs=1e-9)


def test_ray_crossing_rotation_and_reversal_invariance():
    rng = np.random.default_rng(19)
    for _ in range(2_000):
        n = int(rng.integers(3, 11))
        ring = [(float(x), float(y)) for x, y in rng.uniform(-10.0, 10.0, (n, 2))]
        px, py = rng.uniform(-12.0, 12.0, 2)
        closed = ring + [ring[0]]
        edge_d2 = geometry.point_polyline_distance_sq((px, py), closed)
        if edge_d2 < 1e-12:
            continue  # on-edge points may classify either way
        base = geometry.ray_crossing_ring((px, py), ring)
        shift = int(rng.integers(0, n))
        rotated = ring[shift:] + ring[:shift]
        assert geometry.ray_crossing_ring((px, py), rotated) is base
        assert geometry.ray_crossing_ring((px, py), list(reversed(ring))) is base


def test_point_in_polygon_convex_agrees_with_halfplanes():
    rng = np.random.default_rng(23)
    for _ in range(50):
        ring = convex_polygon(rng, int(rng.integers(3, 12)), radius=float(rng.uniform(0.5, 5.0)))
        pxs = rng.uniform(-6.0, 6.0, 200)
        pys = rng.uniform(-6.0, 6.0, 200)
        inside, boundary = halfplane_classify(ring, pxs, pys)
        for j in range(pxs.size):
            if boundary[j]:
                continue
            assert geometry.point_in_polygon((pxs[j], pys[j]), [ring]) is bool(inside[j])


def test_mbb_expand_composes_exactly():
    rng = np.random.default_rng(29)
    for _ in range(2_000):
        # eighths are exactly representable, so composition has no rounding
        x1, y1 = rng.integers(-800, 800, 2) / 8.0
        w, h = rng.integers(0, 400, 2) / 8.0
        a, b = rng.integers(0, 200, 2) / 8.0
        m = Mbb(x1, y1, x1 + w, y1 + h)
        assert geometry.mbb_expand(geometry.mbb_expand(m, a), b) == geometry.mbb_expand(m, a + b)


def test_distances_use_wide_arithmetic():
    # a 1e-3 gap at coordinate magnitude 1e4 vanishes entirely in 32-bit
    # arithmetic; 64-bit keeps it to within cancellation noise
    d = geometry.point_segment_distance_sq((1e4, 1e-3), (0.0, 0.0), (2e4, 0.0))
    assert d == pytest.approx(1e-6, rel=1e-2)


def test_horizontal_edge_never_crosses():
    assert geometry.edge_crosses_ray(0.0, 0.0, 1.0, 0.0, 2.0, 0.0) is False


def test_edge_crossing_half_open_rule():
    # edge from (1,-1) to (1,1): exactly one endpoint strictly above y=0
    assert geometry.edge_crosses_ray(0.0, 0.0, 1.0, -1.0, 1.0, 1.0) is True
    assert geometry.edge_crosses_ray(2.0, 0.0, 1.0, -1.0, 1.0, 1.0) is False

"""Cell-matching filter: candidate groups, superset guarantee, dedup guard."""
import numpy as np
import pytest

from gridjoin.columnar import INDEX_DTYPE, POLYLINE, PointColumns, build_feature_columns
from gridjoin.datagen import CLUSTERED, GenSpec, generate
from gridjoin.filtering import CandidatePairs, match_cells
from gridjoin.grid import (
    GridSpec,
    CellFeaturePairs,
    bucket_points,
    build_cell_feature_pairs,
    cells_of,
    derive_grid,
)

from helpers import projection_distance_sq

UNIT4 = GridSpec(0.0, 0.0, 1.0, 4, 4)


def _pairs(cells, pos) -> CellFeaturePairs:
    return CellFeaturePairs(np.asarray(cells, dtype=INDEX_DTYPE),
                            np.asarray(pos, dtype=INDEX_DTYPE))


def test_empty_feature_side():
    pts = bucket_points(PointColumns.from_xy([1.5], [0.5]), UNIT4)
    cands = match_cells(pts, _pairs([], []))
    assert cands.group_count == 0
    assert cands.candidate_count == 0
    assert cands.group_starts.tolist() == [0]


def test_empty_point_side():
    pts = bucket_points(PointColumns.from_xy([], []), UNIT4)
    cands = match_cells(pts, _pairs([0, 1], [0, 0]))
    assert cands.group_count == 0


def test_no_overlap_yields_empty():
    pts = bucket_points(PointColumns.from_xy([3.5], [3.5]), UNIT4)  # cell 15
    cands = match_cells(pts, _pairs([0, 1], [0, 1]))
    assert cands.group_count == 0


def test_groups_follow_occupied_cells():
    # points in cells 0 and 6; features rasterized to cells 0 (two) and 6 (one)
    pts = bucket_points(PointColumns.from_xy([0.5, 2.5], [0.5, 1.5]), UNIT4)
    cands = match_cells(pts, _pairs([0, 0, 5, 6], [0, 2, 1, 1]))
    assert cands.cell_ids.tolist() == [0, 6]
    assert cands.group_starts.tolist() == [0, 2, 3]
    assert cands.group(0).tolist() == [0, 2]
    assert cands.group(1).tolist() == [1]
    assert cands.candidate_count == 3


def test_matches_nested_loop_reference():
    rng = np.random.default_rng(47)
    pts = PointColumns.from_xy(rng.uniform(0.0, 4.0, 300), rng.uniform(0.0, 4.0, 300))
    bucketed = bucket_points(pts, UNIT4)
    cells = rng.integers(0, 16, 200)
    pos = rng.integers(0, 30, 200)
    flat = sorted(set(zip(cells.tolist(), pos.tolist())))
    feats = _pairs([c for c, _ in flat], [p for _, p in flat])
    cands = match_cells(bucketed, feats)
    expected = {}
    for c, p in flat:
        expected.setdefault(c, []).append(p)
    want_cells = [c for c in bucketed.cell_ids.tolist() if c in expected]
    assert cands.cell_ids.tolist() == want_cells
    for i, c in enumerate(want_cells):
        assert cands.group(i).tolist() == sorted(expected[c])


def test_superset_of_true_matches():
    spec = GenSpec(CLUSTERED, 2_000, 200, POLYLINE, seed=53)
    points, feats = generate(spec)
    r = 40.0
    g = derive_grid(points, feats, r)
    bucketed = bucket_points(points, g)
    cands = match_cells(bucketed, build_cell_feature_pairs(feats, g, r))
    by_cell = {int(c): set(cands.group(i).tolist()) for i, c in enumerate(cands.cell_ids)}
    ids = cells_of(points, g)
    pxy = np.column_stack((points.xs.astype(np.float64), points.ys.astype(np.float64)))
    missed = 0
    for f in range(feats.feature_count):
        v0, v1 = feats.vertex_span(f)
        vx = feats.vxs[v0:v1].astype(np.float64)
        vy = feats.vys[v0:v1].astype(np.float64)
        best = np.full(points.count, np.inf)
        for s in range(vx.size - 1):
            a = np.tile([vx[s], vy[s]], (points.count, 1))
            b = np.tile([vx[s + 1], vy[s + 1]], (points.count, 1))
            best = np.minimum(best, projection_distance_sq(pxy, a, b))
        for i in np.flatnonzero(best <= r * r):
            if f not in by_cell.get(int(ids[i]), ()):
                missed += 1
    assert missed == 0


def test_groups_strictly_increasing():
    spec = GenSpec(CLUSTERED, 1_000, 60, POLYLINE, seed=59)
    points, feats = generate(spec)
    g = derive_grid(points, feats, 25.0)
    cands = match_cells(bucket_points(points, g), build_cell_feature_pairs(feats, g, 25.0))
    assert cands.group_count > 0
    assert np.all(np.diff(cands.cell_ids) > 0)
    for i in range(cands.group_count):
        grp = cands.group(i)
        assert grp.size > 0
        assert np.all(np.diff(grp) > 0)


def test_duplicate_pairs_are_deduplicated():
    pts = bucket_points(PointColumns.from_xy([0.5, 1.5], [0.5, 0.5]), UNIT4)
    cands = match_cells(pts, _pairs([0, 0, 0, 1], [2, 2, 0, 1]))
    assert cands.cell_ids.tolist() == [0, 1]
    assert cands.group(0).tolist() == [0, 2]
    assert cands.group(1).tolist() == [1]


def test_candidate_pairs_accessors():
    cands = CandidatePairs(
        np.array([3, 9], dtype=INDEX_DTYPE),
        np.array([0, 2, 3], dtype=INDEX_DTYPE),
        np.array([1, 4, 0], dtype=INDEX_DTYPE))
    assert cands.group_count == 2
    assert cands.candidate_count == 3
    assert cands.group(0).tolist() == [1, 4]
    assert cands.group(1).tolist() == [0]


def test_pipeline_filter_is_cheap_on_point_only_cells():
    # occupied cells with no feature coverage must not produce empty groups
    feats = build_feature_columns([(0, [[(0.2, 0.2), (0.4, 0.4)]])], POLYLINE)
    pts = PointColumns.from_xy([0.3, 3.7], [0.3, 3.7])
    bucketed = bucket_points(pts, UNIT4)
    cands = match_cells(bucketed, build_cell_feature_pairs(feats, UNIT4, 0.0))
    assert cands.cell_ids.tolist() == [0]
    assert cands.group(0).tolist() == [0]

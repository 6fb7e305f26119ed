"""Refinement operators: nearest polyline within range, containing polygon.

Results use one slot per original point index. Points whose cell produced no
candidates keep the no-match marker. Work is partitioned into consecutive
batches of candidate groups; each point belongs to exactly one group, so
concurrent workers write disjoint output slots and need no locks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import _kernels
from .columnar import (
    INDEX_DTYPE,
    POLYGON,
    POLYLINE,
    CellGroupedPoints,
    FeatureColumns,
    PointColumns,
    bounds_from_counts,
)
from .errors import UsageError
from .filtering import CandidatePairs

NO_MATCH = _kernels.NO_MATCH
DEFAULT_BATCH_SIZE = 64


@dataclass(frozen=True)
class P2PResult:
    """Per-point nearest polyline id (NO_MATCH when none within range) and
    its distance (NaN when unmatched)."""

    nearest_feature_id: np.ndarray
    distance: np.ndarray

    @property
    def point_count(self) -> int:
        return int(self.nearest_feature_id.size)


@dataclass(frozen=True)
class PipResult:
    """Per-point containing polygon id, NO_MATCH where uncontained."""

    containing_feature_id: np.ndarray

    @property
    def point_count(self) -> int:
        return int(self.containing_feature_id.size)


def _ro(arr: np.ndarray) -> np.ndarray:
    """Read-only view: keeps every kernel call on one compiled signature."""
    view = arr[:]
    view.flags.writeable = False
    return view


def batch_ranges(group_count: int, batch_size: int) -> list[tuple[int, int]]:
    """Split [0, group_count) into consecutive spans of at most batch_size."""
    if batch_size < 1:
        raise UsageError(f"batch size must be >= 1, got {batch_size}")
    if group_count < 0:
        raise UsageError(f"group count must be >= 0, got {group_count}")
    return [(g, min(g + batch_size, group_count)) for g in range(0, group_count, batch_size)]


def refine_partitioned(cands: CandidatePairs, kernel, batch_size: int = DEFAULT_BATCH_SIZE,
                       workers: int = 1, result=None):
    """Run kernel(g0, g1) over batches of candidate groups on a worker pool.

    The kernel must write only to per-point slots owned by its groups, which
    makes any batch/worker interleaving produce identical output.
    """
    if workers < 1:
        raise UsageError(f"worker count must be >= 1, got {workers}")
    ranges = batch_ranges(cands.group_count, batch_size)
    if workers == 1 or len(ranges) <= 1:
        for g0, g1 in ranges:
            kernel(g0, g1)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(kernel, g0, g1) for g0, g1 in ranges]
            for fut in futures:
                fut.result()
    return result


def _group_point_spans(bucketed: CellGroupedPoints, cands: CandidatePairs):
    """Point span (start, count) per candidate group, by cell-id alignment."""
    if cands.group_count == 0:
        empty = np.empty(0, dtype=INDEX_DTYPE)
        return empty, empty.copy()
    if bucketed.cell_count == 0:
        raise UsageError("candidate cell ids do not all occur in the bucketed points")
    pos = np.searchsorted(bucketed.cell_ids, cands.cell_ids)
    clipped = np.minimum(pos, bucketed.cell_count - 1)
    if (pos >= bucketed.cell_count).any() or (bucketed.cell_ids[clipped] != cands.cell_ids).any():
        raise UsageError("candidate cell ids do not all occur in the bucketed points")
    return bucketed.starts[pos], bucketed.counts[pos]


def _check_candidates(cands: CandidatePairs, feats: FeatureColumns):
    if cands.candidate_count == 0:
        return
    fpos = cands.candidate_feature_pos
    if int(fpos.min()) < 0 or int(fpos.max()) >= feats.feature_count:
        raise UsageError("candidate feature positions fall outside the feature table")


def _polyline_spans(feats: FeatureColumns):
    if feats.kind != POLYLINE:
        raise UsageError(f"distance refinement needs polylines, got {feats.kind}")
    ring = feats.ring_offsets
    vstart = feats.ring_starts[ring] if feats.feature_count else np.empty(0, INDEX_DTYPE)
    vstop = vstart + (feats.ring_vertex_counts[ring] if feats.feature_count else 0)
    return np.ascontiguousarray(vstart), np.ascontiguousarray(vstop)


def _polygon_rings(feats: FeatureColumns):
    if feats.kind != POLYGON:
        raise UsageError(f"containment refinement needs polygons, got {feats.kind}")
    ring_lo = np.ascontiguousarray(feats.ring_offsets)
    ring_hi = np.ascontiguousarray(feats.ring_offsets + feats.ring_counts)
    ring_bounds = bounds_from_counts(feats.ring_vertex_counts)
    return ring_lo, ring_hi, ring_bounds


def _check_range(r: float) -> float:
    if not (isinstance(r, (int, float)) and math.isfinite(r) and r > 0):
        raise UsageError(f"range must be a positive finite number, got {r}")
    return float(r)


def p2p(points: PointColumns, bucketed: CellGroupedPoints, feats: FeatureColumns,
        cands: CandidatePairs, r: float, lane_width: int = 1,
        batch_size: int = DEFAULT_BATCH_SIZE, workers: int = 1) -> P2PResult:
    """Nearest polyline within range r per point.

    lane_width 1 runs the scalar kernel; larger widths run the lane-batched
    kernel. Outputs are bit-identical across lane widths, batch sizes, and
    worker counts.
    """
    r = _check_range(r)
    if lane_width < 1:
        raise UsageError(f"lane width must be >= 1, got {lane_width}")
    _check_candidates(cands, feats)
    vstart, vstop = _polyline_spans(feats)
    pt_starts, pt_counts = _group_point_spans(bucketed, cands)
    out_id = np.full(points.count, NO_MATCH, dtype=INDEX_DTYPE)
    out_dist = np.full(points.count, np.nan, dtype=np.float64)
    args = dict(
        cand_bounds=_ro(cands.group_starts), cand_fpos=_ro(cands.candidate_feature_pos),
        pt_starts=_ro(pt_starts), pt_counts=_ro(pt_counts), perm=_ro(bucketed.perm),
        xs=_ro(points.xs), ys=_ro(points.ys),
        vstart=_ro(vstart), vstop=_ro(vstop), vxs=_ro(feats.vxs), vys=_ro(feats.vys),
        feature_ids=_ro(feats.feature_ids), r2=r * r,
        out_id=out_id, out_dist=out_dist)
    if lane_width == 1:
        kernel = partial(_kernels.p2p_scalar_groups, **args)
    else:
        kernel = partial(_kernels.p2p_lanes_groups, lane_width=lane_width, **args)
    return refine_partitioned(cands, kernel, batch_size, workers,
                              result=P2PResult(out_id, out_dist))


def pip(points: PointColumns, bucketed: CellGroupedPoints, feats: FeatureColumns,
        cands: CandidatePairs, lane_width: int = 1,
        batch_size: int = DEFAULT_BATCH_SIZE, workers: int = 1) -> PipResult:
    """Containing polygon (minimum id among containers) per point."""
    if lane_width < 1:
        raise UsageError(f"lane width must be >= 1, got {lane_width}")
    _check_candidates(cands, feats)
    ring_lo, ring_hi, ring_bounds = _polygon_rings(feats)
    pt_starts, pt_counts = _group_point_spans(bucketed, cands)
    out_id = np.full(points.count, NO_MATCH, dtype=INDEX_DTYPE)
    args = dict(
        cand_bounds=_ro(cands.group_starts), cand_fpos=_ro(cands.candidate_feature_pos),
        pt_starts=_ro(pt_starts), pt_counts=_ro(pt_counts), perm=_ro(bucketed.perm),
        xs=_ro(points.xs), ys=_ro(points.ys),
        ring_lo=_ro(ring_lo), ring_hi=_ro(ring_hi), ring_bounds=_ro(ring_bounds),
        vxs=_ro(feats.vxs), vys=_ro(feats.vys), feature_ids=_ro(feats.feature_ids),
        out_id=out_id)
    if lane_width == 1:
        kernel = partial(_kernels.pip_scalar_groups, **args)
    else:
        kernel = partial(_kernels.pip_lanes_groups, lane_width=lane_width, **args)
    return refine_partitioned(cands, kernel, batch_size, workers,
                              result=PipResult(out_id))


def p2p_reference(points: PointColumns, feats: FeatureColumns, r: float) -> P2PResult:
    """Brute-force all-pairs nearest polyline within r.

    No grid, no filter: every (point, feature) pair is evaluated with the
    same per-pair arithmetic as the pipeline kernels, so agreement is exact.
    """
    r = _check_range(r)
    vstart, vstop = _polyline_spans(feats)
    out_id = np.full(points.count, NO_MATCH, dtype=INDEX_DTYPE)
    out_dist = np.full(points.count, np.nan, dtype=np.float64)
    _kernels.p2p_bruteforce(_ro(points.xs), _ro(points.ys), _ro(vstart), _ro(vstop),
                            _ro(feats.vxs), _ro(feats.vys), _ro(feats.feature_ids),
                            r * r, out_id, out_dist)
    return P2PResult(out_id, out_dist)


def pip_reference(points: PointColumns, feats: FeatureColumns) -> tuple[PipResult, np.ndarray]:
    """Brute-force all-polygons containment.

    Returns the result plus each point's squared distance to the nearest
    polygon edge, letting callers exclude boundary-ambiguous points.
    """
    ring_lo, ring_hi, ring_bounds = _polygon_rings(feats)
    out_id = np.full(points.count, NO_MATCH, dtype=INDEX_DTYPE)
    edge_d2 = np.full(points.count, np.inf, dtype=np.float64)
    _kernels.pip_bruteforce(_ro(points.xs), _ro(points.ys), _ro(ring_lo), _ro(ring_hi),
                            _ro(ring_bounds), _ro(feats.vxs), _ro(feats.vys),
                            _ro(feats.feature_ids), out_id, edge_d2)
    return PipResult(out_id), edge_d2


def p2p_scalar(points, bucketed, feats, cands, r, batch_size: int = DEFAULT_BATCH_SIZE,
               workers: int = 1) -> P2PResult:
    """Scalar (one point at a time) nearest-polyline refinement."""
    return p2p(points, bucketed, feats, cands, r, 1, batch_size, workers)


def p2p_lanes(points, bucketed, feats, cands, r, lane_width: int,
              batch_size: int = DEFAULT_BATCH_SIZE, workers: int = 1) -> P2PResult:
    """Lane-batched nearest-polyline refinement (W=1 degenerates to scalar)."""
    return p2p(points, bucketed, feats, cands, r, lane_width, batch_size, workers)


def pip_scalar(points, bucketed, feats, cands, batch_size: int = DEFAULT_BATCH_SIZE,
               workers: int = 1) -> PipResult:
    """Scalar containing-polygon refinement."""
    return pip(points, bucketed, feats, cands, 1, batch_size, workers)


def pip_lanes(points, bucketed, feats, cands, lane_width: int,
              batch_size: int = DEFAULT_BATCH_SIZE, workers: int = 1) -> PipResult:
    """Lane-batched containing-polygon refinement (W=1 degenerates to scalar)."""
    return pip(points, bucketed, feats, cands, lane_width, batch_size, workers)

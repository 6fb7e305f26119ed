"""Spatial-filter join: point-occupied cells vs rasterized feature MBBs.

Both inputs arrive sorted by cell id, so the join is a pair of binary
searches per occupied cell. The output candidate lists are a conservative
superset of the true matches; refinement does the exact geometry.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .columnar import INDEX_DTYPE, CellGroupedPoints, bounds_from_counts
from .grid import CellFeaturePairs


@dataclass(frozen=True)
class CandidatePairs:
    """Grouped (cell id, candidate feature positions) lists.

    group_starts is an exclusive prefix sum over group sizes, one entry per
    cell plus a trailing total. Within a group the feature positions are
    strictly increasing. Cells with no candidates are omitted entirely.
    """

    cell_ids: np.ndarray
    group_starts: np.ndarray
    candidate_feature_pos: np.ndarray

    @property
    def group_count(self) -> int:
        return int(self.cell_ids.size)

    @property
    def candidate_count(self) -> int:
        return int(self.candidate_feature_pos.size)

    def group(self, i: int) -> np.ndarray:
        """Candidate feature positions of the i-th cell group."""
        return self.candidate_feature_pos[self.group_starts[i]:self.group_starts[i + 1]]


def _empty_candidates() -> CandidatePairs:
    return CandidatePairs(
        np.empty(0, dtype=INDEX_DTYPE),
        np.zeros(1, dtype=INDEX_DTYPE),
        np.empty(0, dtype=INDEX_DTYPE),
    )


def match_cells(points: CellGroupedPoints, feats: CellFeaturePairs) -> CandidatePairs:
    """Join occupied point cells against the feature pair list by binary search."""
    if points.cell_ids.size == 0 or feats.pair_count == 0:
        return _empty_candidates()
    lo = np.searchsorted(feats.cells, points.cell_ids, side="left")
    hi = np.searchsorted(feats.cells, points.cell_ids, side="right")
    sizes = (hi - lo).astype(INDEX_DTYPE)
    nonempty = sizes > 0
    if not nonempty.any():
        return _empty_candidates()
    cell_ids = points.cell_ids[nonempty]
    lo = lo[nonempty].astype(INDEX_DTYPE)
    sizes = sizes[nonempty]
    starts = bounds_from_counts(sizes)
    total = int(starts[-1])
    # Gather each group's span in one shot: position j of group i reads
    # feats.feature_pos[lo[i] + j].
    offsets = np.arange(total, dtype=INDEX_DTYPE) - np.repeat(starts[:-1], sizes)
    flat = feats.feature_pos[np.repeat(lo, sizes) + offsets]
    if not _strictly_increasing_within_groups(flat, starts):
        # Rasterization emits each (cell, feature) at most once, so this is a
        # guard against malformed pair lists rather than a hot path.
        groups = [np.unique(flat[starts[i]:starts[i + 1]]) for i in range(cell_ids.size)]
        sizes = np.array([g.size for g in groups], dtype=INDEX_DTYPE)
        starts = bounds_from_counts(sizes)
        flat = np.concatenate(groups)
    return CandidatePairs(cell_ids, starts, flat)


def _strictly_increasing_within_groups(flat: np.ndarray, starts: np.ndarray) -> bool:
    if flat.size < 2:
        return True
    diffs = np.diff(flat)
    ok = np.ones(flat.size - 1, dtype=bool)
    # Mask the positions where consecutive elements straddle a group border.
    borders = starts[1:-1]
    ok[borders[(borders > 0) & (borders < flat.size)] - 1] = False
    return bool((diffs[ok] > 0).all())

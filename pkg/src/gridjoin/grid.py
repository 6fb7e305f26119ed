"""Uniform grid tessellation: point bucketing and MBB rasterization.

Cell identifiers are row-major int64: ``id = row * ncols + col``. The grid
side of the filter is conservative by construction: rasterization uses
closed-region intersection (a box touching a cell border covers both cells),
so candidate sets are always supersets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .columnar import (
    INDEX_DTYPE,
    CellGroupedPoints,
    FeatureColumns,
    PointColumns,
    group_by_key,
)
from .errors import UsageError
from .geometry import Mbb, mbb_expand

OUT_OF_GRID = -1


@dataclass(frozen=True)
class GridSpec:
    """Uniform square tessellation anchored at its lower-left corner."""

    origin_x: float
    origin_y: float
    cell_size: float
    ncols: int
    nrows: int

    def __post_init__(self):
        if not (math.isfinite(self.origin_x) and math.isfinite(self.origin_y)):
            raise UsageError("grid origin must be finite")
        if not (math.isfinite(self.cell_size) and self.cell_size > 0):
            raise UsageError(f"cell size must be positive, got {self.cell_size}")
        if self.ncols < 1 or self.nrows < 1:
            raise UsageError("grid needs at least one column and one row")
        if self.ncols * self.nrows > np.iinfo(INDEX_DTYPE).max:
            raise UsageError("grid cell count exceeds the cell-id integer range")

    @property
    def cell_count(self) -> int:
        return self.ncols * self.nrows


@dataclass(frozen=True)
class CellRange:
    """Contiguous block of grid cells, inclusive on both axes.

    Empty ranges are encoded as col_lo > col_hi (or row_lo > row_hi).
    """

    col_lo: int
    col_hi: int
    row_lo: int
    row_hi: int

    @property
    def is_empty(self) -> bool:
        return self.col_lo > self.col_hi or self.row_lo > self.row_hi

    def __len__(self) -> int:
        if self.is_empty:
            return 0
        return (self.col_hi - self.col_lo + 1) * (self.row_hi - self.row_lo + 1)

    def cell_ids(self, g: GridSpec) -> np.ndarray:
        """Row-major ids of every covered cell, ascending."""
        if self.is_empty:
            return np.empty(0, dtype=INDEX_DTYPE)
        cols = np.arange(self.col_lo, self.col_hi + 1, dtype=INDEX_DTYPE)
        rows = np.arange(self.row_lo, self.row_hi + 1, dtype=INDEX_DTYPE)
        return (rows[:, None] * g.ncols + cols[None, :]).ravel()


@dataclass(frozen=True)
class CellFeaturePairs:
    """Flat (cell, feature position) pairs sorted by (cell, feature_pos)."""

    cells: np.ndarray
    feature_pos: np.ndarray

    @property
    def pair_count(self) -> int:
        return int(self.cells.size)


def cell_of(p, g: GridSpec) -> int:
    """Row-major cell id of a point, or OUT_OF_GRID.

    A floor landing exactly on ncols (resp. nrows) is clamped into the last
    column/row so the maximal grid boundary belongs to the grid.
    """
    px, py = (p.x, p.y) if hasattr(p, "x") else (float(p[0]), float(p[1]))
    col = math.floor((px - g.origin_x) / g.cell_size)
    row = math.floor((py - g.origin_y) / g.cell_size)
    if col == g.ncols:
        col -= 1
    if row == g.nrows:
        row -= 1
    if col < 0 or col >= g.ncols or row < 0 or row >= g.nrows:
        return OUT_OF_GRID
    return row * g.ncols + col


def cells_of(points: PointColumns, g: GridSpec) -> np.ndarray:
    """Vectorized cell_of: int64 cell id per point, OUT_OF_GRID where outside."""
    cols = np.floor((points.xs.astype(np.float64) - g.origin_x) / g.cell_size)
    rows = np.floor((points.ys.astype(np.float64) - g.origin_y) / g.cell_size)
    cols[cols == g.ncols] -= 1
    rows[rows == g.nrows] -= 1
    inside = (cols >= 0) & (cols < g.ncols) & (rows >= 0) & (rows < g.nrows)
    ids = np.full(points.count, OUT_OF_GRID, dtype=INDEX_DTYPE)
    ids[inside] = rows[inside].astype(INDEX_DTYPE) * g.ncols + cols[inside].astype(INDEX_DTYPE)
    return ids


def bucket_points(points: PointColumns, g: GridSpec) -> CellGroupedPoints:
    """Group point indices by their cell id, dropping out-of-grid points."""
    ids = cells_of(points, g)
    keep = ids != OUT_OF_GRID
    grouped = group_by_key(ids[keep], np.flatnonzero(keep))
    return CellGroupedPoints.from_grouped(grouped)


def _axis_range(lo: float, hi: float, origin: float, cell_size: float, n: int) -> tuple[int, int]:
    # Smallest c with origin + (c+1)*cs >= lo, under closed-interval overlap.
    c0 = math.floor((lo - origin) / cell_size) - 1
    while origin + (c0 + 1) * cell_size < lo:
        c0 += 1
    # Largest c with origin + c*cs <= hi.
    c1 = math.floor((hi - origin) / cell_size) + 1
    while origin + c1 * cell_size > hi:
        c1 -= 1
    return max(c0, 0), min(c1, n - 1)


def rasterize_mbb(m: Mbb, g: GridSpec) -> CellRange:
    """Cells whose closed squares intersect the closed box m, clipped to the grid.

    A box edge lying exactly on a cell border covers the cells on both sides;
    a degenerate box on a shared corner covers all four neighbors.
    """
    col_lo, col_hi = _axis_range(m.x1, m.x2, g.origin_x, g.cell_size, g.ncols)
    row_lo, row_hi = _axis_range(m.y1, m.y2, g.origin_y, g.cell_size, g.nrows)
    return CellRange(col_lo, col_hi, row_lo, row_hi)


def feature_mbbs(features: FeatureColumns) -> np.ndarray:
    """Per-feature bounding boxes over all rings, as an (F, 4) float64 array."""
    nf = features.feature_count
    out = np.empty((nf, 4), dtype=np.float64)
    if nf == 0:
        return out
    starts = features.ring_starts[features.ring_offsets]
    xs = features.vxs.astype(np.float64)
    ys = features.vys.astype(np.float64)
    out[:, 0] = np.minimum.reduceat(xs, starts)
    out[:, 1] = np.minimum.reduceat(ys, starts)
    out[:, 2] = np.maximum.reduceat(xs, starts)
    out[:, 3] = np.maximum.reduceat(ys, starts)
    return out


def build_cell_feature_pairs(features: FeatureColumns, g: GridSpec, expand_r: float) -> CellFeaturePairs:
    """Rasterize every feature's (expanded) MBB onto the grid.

    Emits one (cell, feature position) pair per covered cell, sorted by
    (cell, feature_pos). expand_r is the query range for distance joins and
    0 for containment joins.
    """
    if expand_r < 0:
        raise UsageError(f"expansion range must be non-negative, got {expand_r}")
    boxes = feature_mbbs(features)
    cells_acc = []
    pos_acc = []
    for f in range(features.feature_count):
        x1, y1, x2, y2 = boxes[f]
        rng = rasterize_mbb(mbb_expand(Mbb(x1, y1, x2, y2), expand_r), g)
        if rng.is_empty:
            continue
        ids = rng.cell_ids(g)
        cells_acc.append(ids)
        pos_acc.append(np.full(ids.size, f, dtype=INDEX_DTYPE))
    if not cells_acc:
        empty = np.empty(0, dtype=INDEX_DTYPE)
        return CellFeaturePairs(empty, empty.copy())
    cells = np.concatenate(cells_acc)
    pos = np.concatenate(pos_acc)
    order = np.lexsort((pos, cells))
    return CellFeaturePairs(cells[order], pos[order])


def default_cell_size(extent: Mbb, point_count: int) -> float:
    """Heuristic cell size targeting on the order of 16 points per cell."""
    area = (extent.x2 - extent.x1) * (extent.y2 - extent.y1)
    size = math.sqrt(area / max(point_count, 1)) * 4.0
    if size <= 0 or not math.isfinite(size):
        size = 1.0
    return size


def derive_grid(points: PointColumns, features: FeatureColumns, expand_r: float,
                cell_size: float | None = None) -> GridSpec:
    """Grid covering all points and all (expanded) feature MBBs, padded by one cell.

    The padding guarantees rasterized candidate cells are never clipped away,
    which preserves the filter's superset property.
    """
    boxes = feature_mbbs(features)
    xs_min = []
    xs_max = []
    ys_min = []
    ys_max = []
    if points.count:
        xs_min.append(float(points.xs.min()))
        xs_max.append(float(points.xs.max()))
        ys_min.append(float(points.ys.min()))
        ys_max.append(float(points.ys.max()))
    if boxes.shape[0]:
        xs_min.append(float(boxes[:, 0].min()) - expand_r)
        ys_min.append(float(boxes[:, 1].min()) - expand_r)
        xs_max.append(float(boxes[:, 2].max()) + expand_r)
        ys_max.append(float(boxes[:, 3].max()) + expand_r)
    if not xs_min:
        extent = Mbb(0.0, 0.0, 1.0, 1.0)
    else:
        extent = Mbb(min(xs_min), min(ys_min), max(xs_max), max(ys_max))
    size = cell_size if cell_size is not None else default_cell_size(extent, points.count)
    if size <= 0 or not math.isfinite(size):
        raise UsageError(f"cell size must be positive and finite, got {size}")
    origin_x = extent.x1 - size
    origin_y = extent.y1 - size
    ncols = max(1, math.ceil((extent.x2 + size - origin_x) / size))
    nrows = max(1, math.ceil((extent.y2 + size - origin_y) / size))
    return GridSpec(origin_x, origin_y, size, ncols, nrows)

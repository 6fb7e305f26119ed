"""Structure-of-arrays containers and the array primitives that build them.

Points and features live in flat parallel arrays: coordinates are stored as
32-bit floats (kernels widen to 64-bit), identifiers and offsets as 64-bit
integers. Containers are frozen after construction and safe to share across
worker threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import UsageError, ValidationError

COORD_DTYPE = np.float32
INDEX_DTYPE = np.int64

POLYLINE = "polyline"
POLYGON = "polygon"
FEATURE_KINDS = (POLYLINE, POLYGON)


def _freeze(arr):
    arr.flags.writeable = False
    return arr


def _as_index_array(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=INDEX_DTYPE)


def exclusive_prefix_sum(counts) -> np.ndarray:
    """Start offsets from per-group counts: out[i] == sum(counts[:i]).

    Raises OverflowError if the running sum leaves int64 range.
    """
    counts = _as_index_array(counts)
    if counts.size == 0:
        return counts.copy()
    if counts.min() < 0:
        raise UsageError("counts must be non-negative")
    totals = np.cumsum(counts)
    # counts are non-negative and < 2**63, so the first wrap lands negative
    if totals[-1] < 0 or np.any(totals < 0):
        raise OverflowError("prefix sum exceeds int64 range")
    out = np.empty_like(counts)
    out[0] = 0
    out[1:] = totals[:-1]
    return out


def bounds_from_counts(counts) -> np.ndarray:
    """Group bounds from per-group counts: out has len(counts)+1 entries and
    group i spans out[i]:out[i+1]. out[-1] is the total."""
    counts = _as_index_array(counts)
    out = np.zeros(counts.size + 1, dtype=INDEX_DTYPE)
    if counts.size:
        if counts.min() < 0:
            raise UsageError("counts must be non-negative")
        np.cumsum(counts, out=out[1:])
        if out[-1] < 0 or np.any(out < 0):
            raise OverflowError("prefix sum exceeds int64 range")
    return out


class Grouped(NamedTuple):
    """Stable grouping of (key, value) pairs by key."""

    keys: np.ndarray    # distinct keys, ascending
    starts: np.ndarray  # exclusive prefix sum of counts
    counts: np.ndarray
    values: np.ndarray  # input values permuted into key-grouped order


def group_by_key(keys, values) -> Grouped:
    """Group values by key with a stable sort.

    Within each key group the values keep their input order, so every
    execution mode sees identical deterministic point order.
    """
    keys = _as_index_array(keys)
    values = _as_index_array(values)
    if keys.shape != values.shape:
        raise UsageError(f"keys and values differ in length: {keys.size} vs {values.size}")
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.flatnonzero(np.diff(sorted_keys) != 0) + 1
    starts = np.concatenate(([0], boundaries)).astype(INDEX_DTYPE) if keys.size else np.empty(0, INDEX_DTYPE)
    distinct = sorted_keys[starts] if keys.size else np.empty(0, INDEX_DTYPE)
    counts = np.diff(np.concatenate((starts, [keys.size]))).astype(INDEX_DTYPE)
    return Grouped(distinct, starts, counts, values[order])


@dataclass(frozen=True)
class PointColumns:
    """Point coordinates in storage order."""

    xs: np.ndarray
    ys: np.ndarray

    @property
    def count(self) -> int:
        return int(self.xs.size)

    @classmethod
    def from_xy(cls, xs, ys) -> "PointColumns":
        xs = np.ascontiguousarray(xs, dtype=COORD_DTYPE)
        ys = np.ascontiguousarray(ys, dtype=COORD_DTYPE)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise UsageError("xs and ys must be 1-d arrays of equal length")
        if xs.size and not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise UsageError("point coordinates must be finite")
        return cls(_freeze(xs), _freeze(ys))


@dataclass(frozen=True)
class CellGroupedPoints:
    """Points bucketed by grid cell.

    ``perm[starts[i] : starts[i] + counts[i]]`` lists the original indices of
    the points in cell ``cell_ids[i]``; cell ids are distinct and ascending.
    Points outside the grid are absent.
    """

    cell_ids: np.ndarray
    starts: np.ndarray
    counts: np.ndarray
    perm: np.ndarray

    @property
    def cell_count(self) -> int:
        return int(self.cell_ids.size)

    @classmethod
    def from_grouped(cls, grouped: Grouped) -> "CellGroupedPoints":
        return cls(
            _freeze(grouped.keys.copy()),
            _freeze(grouped.starts.copy()),
            _freeze(grouped.counts.copy()),
            _freeze(grouped.values.copy()),
        )


@dataclass(frozen=True)
class FeatureColumns:
    """Columnar polylines or polygons.

    Rings are flattened feature-by-feature: feature ``f`` owns rings
    ``ring_offsets[f] : ring_offsets[f] + ring_counts[f]`` and ring ``r``
    owns vertices ``ring_starts[r] : ring_starts[r] + ring_vertex_counts[r]``
    in the flat ``vxs``/``vys`` arrays.
    """

    kind: str
    feature_ids: np.ndarray
    ring_counts: np.ndarray
    ring_vertex_counts: np.ndarray
    ring_starts: np.ndarray
    vxs: np.ndarray
    vys: np.ndarray
    ring_offsets: np.ndarray  # per-feature exclusive prefix sum of ring_counts

    @property
    def feature_count(self) -> int:
        return int(self.feature_ids.size)

    @property
    def vertex_count(self) -> int:
        return int(self.vxs.size)

    def vertex_span(self, pos: int) -> tuple[int, int]:
        """Flat [start, stop) vertex range covering every ring of feature pos."""
        r0 = int(self.ring_offsets[pos])
        r1 = r0 + int(self.ring_counts[pos])
        start = int(self.ring_starts[r0])
        stop = int(self.ring_starts[r1 - 1] + self.ring_vertex_counts[r1 - 1])
        return start, stop

    def feature_rings(self, pos: int) -> list[list[tuple[float, float]]]:
        """Reconstruct feature pos as a list of vertex-tuple rings."""
        r0 = int(self.ring_offsets[pos])
        rings = []
        for r in range(r0, r0 + int(self.ring_counts[pos])):
            v0 = int(self.ring_starts[r])
            v1 = v0 + int(self.ring_vertex_counts[r])
            rings.append([(float(self.vxs[i]), float(self.vys[i])) for i in range(v0, v1)])
        return rings


def build_feature_columns(features: Sequence, kind: str) -> FeatureColumns:
    """Flatten (id, rings) features into FeatureColumns.

    ``features`` is a sequence of ``(feature_id, rings)`` where each ring is a
    sequence of (x, y) pairs. Polylines must have exactly one ring of >= 1
    vertex; polygon rings need >= 3 vertices. Duplicate ids and empty rings
    are rejected.
    """
    if kind not in FEATURE_KINDS:
        raise UsageError(f"unknown feature kind {kind!r}")
    ids = []
    ring_counts = []
    ring_vertex_counts = []
    flat_x = []
    flat_y = []
    seen = set()
    for fid, rings in features:
        fid = int(fid)
        if fid < 0:
            raise ValidationError(f"feature id must be non-negative, got {fid}")
        if fid in seen:
            raise ValidationError(f"duplicate feature id {fid}")
        seen.add(fid)
        if len(rings) == 0:
            raise ValidationError(f"feature {fid} has no rings")
        if kind == POLYLINE and len(rings) != 1:
            raise ValidationError(f"polyline {fid} must have exactly one ring, got {len(rings)}")
        ids.append(fid)
        ring_counts.append(len(rings))
        for ring in rings:
            nv = len(ring)
            if nv == 0:
                raise ValidationError(f"feature {fid} has an empty ring")
            if kind == POLYGON and nv < 3:
                raise ValidationError(f"polygon {fid} has a ring with {nv} vertices (need >= 3)")
            ring_vertex_counts.append(nv)
            for x, y in ring:
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise ValidationError(f"feature {fid} has a non-finite vertex ({x}, {y})")
                flat_x.append(x)
                flat_y.append(y)
    rvc = _as_index_array(ring_vertex_counts)
    return FeatureColumns(
        kind=kind,
        feature_ids=_freeze(_as_index_array(ids)),
        ring_counts=_freeze(_as_index_array(ring_counts)),
        ring_vertex_counts=_freeze(rvc),
        ring_starts=_freeze(exclusive_prefix_sum(rvc)),
        vxs=_freeze(np.asarray(flat_x, dtype=COORD_DTYPE)),
        vys=_freeze(np.asarray(flat_y, dtype=COORD_DTYPE)),
        ring_offsets=_freeze(exclusive_prefix_sum(_as_index_array(ring_counts))),
    )

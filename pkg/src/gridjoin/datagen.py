"""Synthetic dataset generation.

Two point regimes over a fixed square extent: clustered points are Gaussian
spray around randomly chosen feature vertices (pickup hotspots at street
intersections), scattered points are uniform over the extent (world-wide
occurrence records). Polylines are short random walks; polygons are
radius-perturbed circles, optionally with one concentric hole. Everything is
drawn from a single seeded generator, so a spec reproduces its dataset
exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .columnar import (
    FEATURE_KINDS,
    POLYGON,
    POLYLINE,
    FeatureColumns,
    PointColumns,
    build_feature_columns,
)
from .errors import UsageError

CLUSTERED = "clustered"
SCATTERED = "scattered"
KINDS = (CLUSTERED, SCATTERED)

GEN_EXTENT = 10_000.0
CLUSTER_SIGMA = GEN_EXTENT / 400.0
WALK_STEP = GEN_EXTENT / 200.0

DEFAULT_MEAN_VERTICES = {POLYLINE: 2.4, POLYGON: 280.0}


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one synthetic dataset."""

    kind: str
    point_count: int
    feature_count: int
    geometry: str = POLYLINE
    mean_vertices: float | None = None
    holes_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown dataset kind {self.kind!r}, expected one of {KINDS}")
        if self.geometry not in FEATURE_KINDS:
            raise UsageError(f"unknown geometry {self.geometry!r}, expected one of {FEATURE_KINDS}")
        if self.point_count < 0 or self.feature_count < 0:
            raise UsageError("point and feature counts must be non-negative")
        if not (0.0 <= self.holes_fraction <= 1.0):
            raise UsageError(f"holes fraction must lie in [0, 1], got {self.holes_fraction}")
        if self.holes_fraction > 0 and self.geometry != POLYGON:
            raise UsageError("holes only apply to polygon features")
        if self.mean_vertices is not None and self.mean_vertices <= 0:
            raise UsageError(f"mean vertices must be positive, got {self.mean_vertices}")

    @property
    def effective_mean_vertices(self) -> float:
        if self.mean_vertices is not None:
            return float(self.mean_vertices)
        return DEFAULT_MEAN_VERTICES[self.geometry]


def _gen_polylines(rng: np.random.Generator, spec: GenSpec) -> list:
    # 2 + Poisson keeps every walk a real segment chain with the right mean
    lam = max(spec.effective_mean_vertices - 2.0, 0.0)
    counts = 2 + rng.poisson(lam, spec.feature_count)
    features = []
    for fid in range(spec.feature_count):
        n = int(counts[fid])
        start = rng.uniform(0.0, GEN_EXTENT, 2)
        steps = rng.normal(0.0, WALK_STEP, (n - 1, 2))
        verts = np.vstack((start[None, :], start[None, :] + np.cumsum(steps, axis=0)))
        features.append((fid, [[(float(x), float(y)) for x, y in verts]]))
    return features


def _ring(rng: np.random.Generator, cx: float, cy: float, radius: float,
          n: int, wobble: float) -> list:
    angles = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    radii = radius * (1.0 + rng.uniform(-wobble, wobble, n))
    xs = cx + radii * np.cos(angles)
    ys = cy + radii * np.sin(angles)
    return list(zip(xs.tolist(), ys.tolist()))


def _gen_polygons(rng: np.random.Generator, spec: GenSpec) -> list:
    lam = max(spec.effective_mean_vertices - 3.0, 0.0)
    totals = 3 + rng.poisson(lam, spec.feature_count)
    with_hole = rng.random(spec.feature_count) < spec.holes_fraction
    features = []
    for fid in range(spec.feature_count):
        total = int(totals[fid])
        cx, cy = rng.uniform(0.0, GEN_EXTENT, 2)
        radius = rng.uniform(GEN_EXTENT / 200.0, GEN_EXTENT / 50.0)
        rings = []
        if with_hole[fid] and total >= 6:
            n_outer = max(3, int(round(total * 0.6)))
            n_hole = max(3, total - n_outer)
            rings.append(_ring(rng, cx, cy, radius, n_outer, 0.3))
            # hole radius stays below the outer ring's minimum possible radius
            rings.append(_ring(rng, cx, cy, radius * 0.4, n_hole, 0.2))
        else:
            rings.append(_ring(rng, cx, cy, radius, max(3, total), 0.3))
        features.append((fid, rings))
    return features


def _gen_points(rng: np.random.Generator, spec: GenSpec, feats: FeatureColumns) -> PointColumns:
    n = spec.point_count
    if n == 0:
        return PointColumns.from_xy(np.empty(0, np.float64), np.empty(0, np.float64))
    if spec.kind == CLUSTERED and feats.vertex_count > 0:
        centers = rng.integers(0, feats.vertex_count, n)
        xs = feats.vxs[centers].astype(np.float64) + rng.normal(0.0, CLUSTER_SIGMA, n)
        ys = feats.vys[centers].astype(np.float64) + rng.normal(0.0, CLUSTER_SIGMA, n)
    else:
        xs = rng.uniform(0.0, GEN_EXTENT, n)
        ys = rng.uniform(0.0, GEN_EXTENT, n)
    return PointColumns.from_xy(xs, ys)


def generate(spec: GenSpec) -> tuple[PointColumns, FeatureColumns]:
    """Build the dataset described by spec. Same spec, same bytes."""
    rng = np.random.default_rng(spec.seed)
    if spec.geometry == POLYLINE:
        raw = _gen_polylines(rng, spec)
    else:
        raw = _gen_polygons(rng, spec)
    feats = build_feature_columns(raw, spec.geometry)
    points = _gen_points(rng, spec, feats)
    return points, feats

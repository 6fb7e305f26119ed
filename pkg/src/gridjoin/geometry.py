"""Scalar 2D geometry kernels.

Pure functions over immutable inputs: point-to-segment and point-to-polyline
shortest distance, even-odd (ray-crossing) containment for rings and
multi-ring polygons, and axis-aligned bounding boxes. Distances are computed
and compared as squared values; callers take square roots at output
boundaries only. All arithmetic is 64-bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import UsageError


@dataclass(frozen=True)
class Point2D:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise UsageError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Mbb:
    """Axis-aligned minimum bounding box (x1, y1) .. (x2, y2), closed."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        vals = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(v) for v in vals):
            raise UsageError(f"bounding box must be finite, got {vals}")
        if self.x1 > self.x2 or self.y1 > self.y2:
            raise UsageError(f"bounding box min exceeds max: {vals}")


def _xy(p):
    if isinstance(p, Point2D):
        return p.x, p.y
    return float(p[0]), float(p[1])


def segment_distance_sq(px, py, ax, ay, bx, by):
    """Squared distance from (px,py) to segment (ax,ay)-(bx,by).

    Clamped-projection distance, written so the arithmetic is exactly
    symmetric under endpoint swap: the two endpoint dot products are
    mirror negations of each other, and the interior case takes the min
    of the two algebraically identical perpendicular expressions.
    Degenerate segments (a == b) fall back to point distance.
    """
    dax = px - ax
    day = py - ay
    da2 = dax * dax + day * day
    dbx = px - bx
    dby = py - by
    db2 = dbx * dbx + dby * dby
    abx = bx - ax
    aby = by - ay
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return da2
    u = dax * abx + day * aby
    v = -(dbx * abx + dby * aby)
    if u > 0.0 and v > 0.0:
        pa = da2 - (u / denom) * u
        pb = db2 - (v / denom) * v
        d = pa if pa < pb else pb
        return d if d > 0.0 else 0.0
    if u <= 0.0 and v <= 0.0:
        # Only reachable when rounding swallows both projections (segment
        # length below noise at this distance); either endpoint is correct
        # to within an ulp.
        return da2 if da2 < db2 else db2
    if u <= 0.0:
        return da2
    return db2


def edge_crosses_ray(px, py, xi, yi, xj, yj):
    """Half-open crossing rule for the horizontal +x ray from (px,py).

    The edge (xi,yi)-(xj,yj) contributes iff exactly one endpoint lies
    strictly above the ray and the edge's x at py is strictly right of px.
    Horizontal edges never contribute.
    """
    if (yi > py) != (yj > py):
        return px < (xj - xi) * (py - yi) / (yj - yi) + xi
    return False


def point_segment_distance_sq(p, a, b) -> float:
    """Squared shortest distance from point p to segment ab."""
    px, py = _xy(p)
    ax, ay = _xy(a)
    bx, by = _xy(b)
    return segment_distance_sq(px, py, ax, ay, bx, by)


def point_polyline_distance_sq(p, vertices: Sequence) -> float:
    """Squared shortest distance from p to a polyline given as its vertices.

    A single-vertex polyline degenerates to point distance. Raises
    UsageError on an empty vertex list (corrupt feature data).
    """
    if len(vertices) == 0:
        raise UsageError("polyline has no vertices")
    px, py = _xy(p)
    ax, ay = _xy(vertices[0])
    if len(vertices) == 1:
        dax = px - ax
        day = py - ay
        return dax * dax + day * day
    best = math.inf
    for v in vertices[1:]:
        bx, by = _xy(v)
        d = segment_distance_sq(px, py, ax, ay, bx, by)
        if d < best:
            best = d
        ax, ay = bx, by
    return best


def ray_crossing_ring(p, ring: Sequence) -> bool:
    """Even-odd test of p against one implicitly closed ring (>= 3 vertices).

    Returns True when the +x ray from p crosses the ring an odd number of
    times. Points exactly on an edge or vertex may classify either way;
    this half-open rule is deterministic but boundary placement is not a
    documented contract.
    """
    n = len(ring)
    if n < 3:
        raise UsageError(f"ring needs at least 3 vertices, got {n}")
    px, py = _xy(p)
    inside = False
    xj, yj = _xy(ring[n - 1])
    for v in ring:
        xi, yi = _xy(v)
        if edge_crosses_ray(px, py, xi, yi, xj, yj):
            inside = not inside
        xj, yj = xi, yi
    return inside


def point_in_polygon(p, rings: Sequence[Sequence]) -> bool:
    """Even-odd containment for a polygon given as a list of rings.

    Ring 0 is the outer boundary, the rest are holes; under the even-odd
    rule the distinction does not affect the result (parity XOR over all
    rings).
    """
    inside = False
    for ring in rings:
        inside ^= ray_crossing_ring(p, ring)
    return inside


def mbb_of(vertices: Sequence) -> Mbb:
    """Componentwise min/max box of a nonempty vertex sequence."""
    if len(vertices) == 0:
        raise UsageError("cannot take the bounding box of no vertices")
    x, y = _xy(vertices[0])
    x1 = x2 = x
    y1 = y2 = y
    for v in vertices[1:]:
        x, y = _xy(v)
        if x < x1:
            x1 = x
        elif x > x2:
            x2 = x
        if y < y1:
            y1 = y
        elif y > y2:
            y2 = y
    return Mbb(x1, y1, x2, y2)


def mbb_expand(m: Mbb, r: float) -> Mbb:
    """Grow the box by r on every side: (x1-r, y1-r, x2+r, y2+r)."""
    if r < 0:
        raise UsageError(f"expansion range must be non-negative, got {r}")
    return Mbb(m.x1 - r, m.y1 - r, m.x2 + r, m.y2 + r)

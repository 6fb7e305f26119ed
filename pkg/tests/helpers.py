"""Shared test helpers: independent oracles and small geometry builders.

The oracles here deliberately use different arithmetic than the package
(vectorized clamped projection, dense sampling, half-plane sign tests,
angle summation) so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import numba
import numpy as np


def unit_square():
    return [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def square_ring(x0: float, y0: float, side: float):
    return [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]


def projection_distance_sq(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Textbook clamped-projection squared distance, vectorized float64.

    pts is (n, 2), a and b are (n, 2) segment endpoints. Uses the
    t = clip(dot/len2) formulation, a different expression than the
    package's swap-symmetric kernel.
    """
    pts = np.asarray(pts, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ab = b - a
    len2 = (ab * ab).sum(axis=1)
    ap = pts - a
    t = np.zeros(len(pts))
    nz = len2 > 0
    t[nz] = np.clip((ap[nz] * ab[nz]).sum(axis=1) / len2[nz], 0.0, 1.0)
    closest = a + t[:, None] * ab
    d = pts - closest
    return (d * d).sum(axis=1)


@numba.njit(cache=True)
def sampled_min_distance_sq(pts, segs, n_samples):
    """Dense-sampling distance oracle: min over n_samples+1 points per segment.

    Upper-bounds the true squared distance; the gap is at most
    len2 / (4 * n_samples**2) because the squared distance is quadratic
    along the segment.
    """
    out = np.empty(pts.shape[0])
    for i in range(pts.shape[0]):
        px, py = pts[i, 0], pts[i, 1]
        ax, ay, bx, by = segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3]
        best = np.inf
        for k in range(n_samples + 1):
            t = k / n_samples
            qx = ax + (bx - ax) * t
            qy = ay + (by - ay) * t
            d2 = (px - qx) * (px - qx) + (py - qy) * (py - qy)
            if d2 < best:
                best = d2
        out[i] = best
    return out


def convex_polygon(rng: np.random.Generator, n: int, cx=0.0, cy=0.0, radius=1.0):
    """Convex ring: n distinct angles on a circle, counter-clockwise."""
    angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    while np.any(np.diff(angles) < 1e-6):
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    xs = cx + radius * np.cos(angles)
    ys = cy + radius * np.sin(angles)
    return list(zip(xs.tolist(), ys.tolist()))


def halfplane_classify(ring, pxs: np.ndarray, pys: np.ndarray):
    """Convex containment by edge sign tests.

    Returns (inside, on_boundary) boolean arrays; ring must be convex and
    counter-clockwise. Points with any near-zero cross product are flagged
    as boundary so callers can skip them.
    """
    xs = np.array([v[0] for v in ring])
    ys = np.array([v[1] for v in ring])
    nxt = np.roll(np.arange(len(ring)), -1)
    inside = np.ones(pxs.shape, dtype=bool)
    boundary = np.zeros(pxs.shape, dtype=bool)
    scale = max(np.abs(xs).max(), np.abs(ys).max(), 1.0)
    for i in range(len(ring)):
        ex = xs[nxt[i]] - xs[i]
        ey = ys[nxt[i]] - ys[i]
        cross = ex * (pys - ys[i]) - ey * (pxs - xs[i])
        inside &= cross > 0
        boundary |= np.abs(cross) < 1e-9 * scale * scale
    return inside, boundary


def winding_contains(ring, px: float, py: float) -> bool:
    """Angle-summation containment for a simple (non-self-intersecting) ring.

    Sums the signed turn of each vertex around the point; inside gives
    about 2*pi, outside about 0. Only reliable away from the boundary.
    """
    xs = np.array([v[0] for v in ring], dtype=np.float64) - px
    ys = np.array([v[1] for v in ring], dtype=np.float64) - py
    xn = np.roll(xs, -1)
    yn = np.roll(ys, -1)
    angles = np.arctan2(xs * yn - ys * xn, xs * xn + ys * yn)
    return bool(abs(angles.sum()) > np.pi)


def covered_cells_bruteforce(x1, y1, x2, y2, origin_x, origin_y, cell_size, ncols, nrows):
    """All cell ids whose closed square intersects the closed box, by direct
    per-cell interval tests."""
    ids = []
    for row in range(nrows):
        for col in range(ncols):
            cx1 = origin_x + col * cell_size
            cy1 = origin_y + row * cell_size
            if cx1 <= x2 and cx1 + cell_size >= x1 and cy1 <= y2 and cy1 + cell_size >= y1:
                ids.append(row * ncols + col)
    return ids

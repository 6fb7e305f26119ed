"""Compiled refinement kernels.

Every kernel widens the 32-bit stored coordinates to 64-bit on load and runs
the exact arithmetic defined in :mod:`gridjoin.geometry` (the scalar functions
are jitted here, not reimplemented), so the scalar kernels, the lane-batched
kernels, and the brute-force reference kernels all produce bit-identical
per-pair values. Kernels release the GIL and are compiled once per process
with on-disk caching.

Lane-batched variants process points of a cell group in chunks of W lanes
that walk the same candidate/vertex sequence together. Chunks shorter than W
pad the trailing lanes with the chunk's first point; padded lanes compute
normally and are masked out at writeback.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from . import geometry

NO_MATCH = -1

_seg_dist_sq = njit(cache=True, nogil=True)(geometry.segment_distance_sq)
_edge_crosses = njit(cache=True, nogil=True)(geometry.edge_crosses_ray)


@njit(cache=True, nogil=True)
def _point_dist_sq(px, py, ax, ay):
    dax = px - ax
    day = py - ay
    return dax * dax + day * day


@njit(cache=True, nogil=True)
def p2p_scalar_groups(g0, g1, cand_bounds, cand_fpos,
                      pt_starts, pt_counts, perm, xs, ys,
                      vstart, vstop, vxs, vys, feature_ids,
                      r2, out_id, out_dist):
    """P2P refinement over candidate groups [g0, g1), one point at a time."""
    for g in range(g0, g1):
        c0 = cand_bounds[g]
        c1 = cand_bounds[g + 1]
        p0 = pt_starts[g]
        p1 = p0 + pt_counts[g]
        for pi in range(p0, p1):
            idx = perm[pi]
            px = np.float64(xs[idx])
            py = np.float64(ys[idx])
            best = np.inf
            best_pos = np.int64(-1)
            for c in range(c0, c1):
                f = cand_fpos[c]
                s = vstart[f]
                e = vstop[f]
                if e - s == 1:
                    d = _point_dist_sq(px, py, np.float64(vxs[s]), np.float64(vys[s]))
                    if d < best:
                        best = d
                        best_pos = f
                else:
                    ax = np.float64(vxs[s])
                    ay = np.float64(vys[s])
                    for j in range(s + 1, e):
                        bx = np.float64(vxs[j])
                        by = np.float64(vys[j])
                        d = _seg_dist_sq(px, py, ax, ay, bx, by)
                        if d < best:
                            best = d
                            best_pos = f
                        ax = bx
                        ay = by
            if best <= r2:
                out_id[idx] = feature_ids[best_pos]
                out_dist[idx] = math.sqrt(best)


@njit(cache=True, nogil=True)
def p2p_lanes_groups(g0, g1, lane_width, cand_bounds, cand_fpos,
                     pt_starts, pt_counts, perm, xs, ys,
                     vstart, vstop, vxs, vys, feature_ids,
                     r2, out_id, out_dist):
    """Lane-batched P2P refinement, bit-identical to the scalar kernel."""
    lpx = np.empty(lane_width, np.float64)
    lpy = np.empty(lane_width, np.float64)
    lbest = np.empty(lane_width, np.float64)
    lpos = np.empty(lane_width, np.int64)
    for g in range(g0, g1):
        c0 = cand_bounds[g]
        c1 = cand_bounds[g + 1]
        p0 = pt_starts[g]
        pc = pt_counts[g]
        nbatch = (pc + lane_width - 1) // lane_width
        for b in range(nbatch):
            base = p0 + b * lane_width
            active = pc - b * lane_width
            if active > lane_width:
                active = lane_width
            for l in range(lane_width):
                src = base + l if l < active else base
                idx = perm[src]
                lpx[l] = np.float64(xs[idx])
                lpy[l] = np.float64(ys[idx])
                lbest[l] = np.inf
                lpos[l] = -1
            for c in range(c0, c1):
                f = cand_fpos[c]
                s = vstart[f]
                e = vstop[f]
                if e - s == 1:
                    ax = np.float64(vxs[s])
                    ay = np.float64(vys[s])
                    for l in range(lane_width):
                        d = _point_dist_sq(lpx[l], lpy[l], ax, ay)
                        if d < lbest[l]:
                            lbest[l] = d
                            lpos[l] = f
                else:
                    ax = np.float64(vxs[s])
                    ay = np.float64(vys[s])
                    for j in range(s + 1, e):
                        bx = np.float64(vxs[j])
                        by = np.float64(vys[j])
                        for l in range(lane_width):
                            d = _seg_dist_sq(lpx[l], lpy[l], ax, ay, bx, by)
                            if d < lbest[l]:
                                lbest[l] = d
                                lpos[l] = f
                        ax = bx
                        ay = by
            for l in range(active):
                idx = perm[base + l]
                if lbest[l] <= r2:
                    out_id[idx] = feature_ids[lpos[l]]
                    out_dist[idx] = math.sqrt(lbest[l])


@njit(cache=True, nogil=True)
def pip_scalar_groups(g0, g1, cand_bounds, cand_fpos,
                      pt_starts, pt_counts, perm, xs, ys,
                      ring_lo, ring_hi, ring_bounds, vxs, vys, feature_ids,
                      out_id):
    """PIP refinement over candidate groups [g0, g1), one point at a time."""
    for g in range(g0, g1):
        c0 = cand_bounds[g]
        c1 = cand_bounds[g + 1]
        p0 = pt_starts[g]
        p1 = p0 + pt_counts[g]
        for pi in range(p0, p1):
            idx = perm[pi]
            px = np.float64(xs[idx])
            py = np.float64(ys[idx])
            found = False
            best_id = np.int64(0)
            for c in range(c0, c1):
                f = cand_fpos[c]
                inside = False
                for r in range(ring_lo[f], ring_hi[f]):
                    s = ring_bounds[r]
                    e = ring_bounds[r + 1]
                    xj = np.float64(vxs[e - 1])
                    yj = np.float64(vys[e - 1])
                    for i in range(s, e):
                        xi = np.float64(vxs[i])
                        yi = np.float64(vys[i])
                        if _edge_crosses(px, py, xi, yi, xj, yj):
                            inside = not inside
                        xj = xi
                        yj = yi
                if inside:
                    fid = feature_ids[f]
                    if not found or fid < best_id:
                        best_id = fid
                        found = True
            if found:
                out_id[idx] = best_id


@njit(cache=True, nogil=True)
def pip_lanes_groups(g0, g1, lane_width, cand_bounds, cand_fpos,
                     pt_starts, pt_counts, perm, xs, ys,
                     ring_lo, ring_hi, ring_bounds, vxs, vys, feature_ids,
                     out_id):
    """Lane-batched PIP refinement, bit-identical to the scalar kernel."""
    lpx = np.empty(lane_width, np.float64)
    lpy = np.empty(lane_width, np.float64)
    linside = np.zeros(lane_width, np.bool_)
    lfound = np.zeros(lane_width, np.bool_)
    lbest = np.empty(lane_width, np.int64)
    for g in range(g0, g1):
        c0 = cand_bounds[g]
        c1 = cand_bounds[g + 1]
        p0 = pt_starts[g]
        pc = pt_counts[g]
        nbatch = (pc + lane_width - 1) // lane_width
        for b in range(nbatch):
            base = p0 + b * lane_width
            active = pc - b * lane_width
            if active > lane_width:
                active = lane_width
            for l in range(lane_width):
                src = base + l if l < active else base
                idx = perm[src]
                lpx[l] = np.float64(xs[idx])
                lpy[l] = np.float64(ys[idx])
                lfound[l] = False
                lbest[l] = 0
            for c in range(c0, c1):
                f = cand_fpos[c]
                for l in range(lane_width):
                    linside[l] = False
                for r in range(ring_lo[f], ring_hi[f]):
                    s = ring_bounds[r]
                    e = ring_bounds[r + 1]
                    xj = np.float64(vxs[e - 1])
                    yj = np.float64(vys[e - 1])
                    for i in range(s, e):
                        xi = np.float64(vxs[i])
                        yi = np.float64(vys[i])
                        for l in range(lane_width):
                            if _edge_crosses(lpx[l], lpy[l], xi, yi, xj, yj):
                                linside[l] = not linside[l]
                        xj = xi
                        yj = yi
                fid = feature_ids[f]
                for l in range(lane_width):
                    if linside[l] and (not lfound[l] or fid < lbest[l]):
                        lbest[l] = fid
                        lfound[l] = True
            for l in range(active):
                if lfound[l]:
                    out_id[perm[base + l]] = lbest[l]


@njit(cache=True, nogil=True)
def p2p_bruteforce(xs, ys, vstart, vstop, vxs, vys, feature_ids, r2,
                   out_id, out_dist):
    """All-pairs P2P reference: no grid, no filter, same per-pair arithmetic."""
    for idx in range(xs.size):
        px = np.float64(xs[idx])
        py = np.float64(ys[idx])
        best = np.inf
        best_pos = np.int64(-1)
        for f in range(vstart.size):
            s = vstart[f]
            e = vstop[f]
            if e - s == 1:
                d = _point_dist_sq(px, py, np.float64(vxs[s]), np.float64(vys[s]))
                if d < best:
                    best = d
                    best_pos = f
            else:
                ax = np.float64(vxs[s])
                ay = np.float64(vys[s])
                for j in range(s + 1, e):
                    bx = np.float64(vxs[j])
                    by = np.float64(vys[j])
                    d = _seg_dist_sq(px, py, ax, ay, bx, by)
                    if d < best:
                        best = d
                        best_pos = f
                    ax = bx
                    ay = by
        if best <= r2:
            out_id[idx] = feature_ids[best_pos]
            out_dist[idx] = math.sqrt(best)


@njit(cache=True, nogil=True)
def pip_bruteforce(xs, ys, ring_lo, ring_hi, ring_bounds, vxs, vys,
                   feature_ids, out_id, out_edge_d2):
    """All-polygons PIP reference.

    Also reports each point's squared distance to the nearest polygon edge,
    so callers can exclude boundary-ambiguous points from comparisons.
    """
    for idx in range(xs.size):
        px = np.float64(xs[idx])
        py = np.float64(ys[idx])
        found = False
        best_id = np.int64(0)
        min_d2 = np.inf
        for f in range(ring_lo.size):
            inside = False
            for r in range(ring_lo[f], ring_hi[f]):
                s = ring_bounds[r]
                e = ring_bounds[r + 1]
                xj = np.float64(vxs[e - 1])
                yj = np.float64(vys[e - 1])
                for i in range(s, e):
                    xi = np.float64(vxs[i])
                    yi = np.float64(vys[i])
                    if _edge_crosses(px, py, xi, yi, xj, yj):
                        inside = not inside
                    d = _seg_dist_sq(px, py, xi, yi, xj, yj)
                    if d < min_d2:
                        min_d2 = d
                    xj = xi
                    yj = yi
            if inside:
                fid = feature_ids[f]
                if not found or fid < best_id:
                    best_id = fid
                    found = True
        if found:
            out_id[idx] = best_id
        out_edge_d2[idx] = min_d2


_warmed = False


def _frozen(values, dtype):
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


def warmup():
    """Force-compile every kernel on a tiny input (cached across processes).

    Inputs are read-only and outputs writable, matching exactly how the
    refinement layer calls the kernels, so real calls never recompile.
    """
    global _warmed
    if _warmed:
        return
    i64 = np.int64
    xs = _frozen([0.25, 0.75], np.float32)
    ys = _frozen([0.25, 0.75], np.float32)
    cand_bounds = _frozen([0, 1], i64)
    cand_fpos = _frozen([0], i64)
    pt_starts = _frozen([0], i64)
    pt_counts = _frozen([2], i64)
    perm = _frozen([0, 1], i64)
    line_vx = _frozen([0.0, 1.0], np.float32)
    line_vy = _frozen([0.0, 1.0], np.float32)
    vstart = _frozen([0], i64)
    vstop = _frozen([2], i64)
    fids = _frozen([0], i64)
    out_id = np.full(2, NO_MATCH, dtype=i64)
    out_dist = np.full(2, np.nan, dtype=np.float64)
    p2p_scalar_groups(0, 1, cand_bounds, cand_fpos, pt_starts, pt_counts, perm,
                      xs, ys, vstart, vstop, line_vx, line_vy, fids, 4.0,
                      out_id, out_dist)
    p2p_lanes_groups(0, 1, 4, cand_bounds, cand_fpos, pt_starts, pt_counts, perm,
                     xs, ys, vstart, vstop, line_vx, line_vy, fids, 4.0,
                     out_id.copy(), out_dist.copy())
    p2p_bruteforce(xs, ys, vstart, vstop, line_vx, line_vy, fids, 4.0,
                   out_id.copy(), out_dist.copy())
    poly_vx = _frozen([0.0, 1.0, 1.0, 0.0], np.float32)
    poly_vy = _frozen([0.0, 0.0, 1.0, 1.0], np.float32)
    ring_lo = _frozen([0], i64)
    ring_hi = _frozen([1], i64)
    ring_bounds = _frozen([0, 4], i64)
    out_pid = np.full(2, NO_MATCH, dtype=i64)
    pip_scalar_groups(0, 1, cand_bounds, cand_fpos, pt_starts, pt_counts, perm,
                      xs, ys, ring_lo, ring_hi, ring_bounds, poly_vx, poly_vy,
                      fids, out_pid)
    pip_lanes_groups(0, 1, 4, cand_bounds, cand_fpos, pt_starts, pt_counts, perm,
                     xs, ys, ring_lo, ring_hi, ring_bounds, poly_vx, poly_vy,
                     fids, out_pid.copy())
    pip_bruteforce(xs, ys, ring_lo, ring_hi, ring_bounds, poly_vx, poly_vy,
                   fids, out_pid.copy(), np.empty(2, dtype=np.float64))
    _warmed = True

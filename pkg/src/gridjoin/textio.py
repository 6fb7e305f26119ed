"""Plain-text dataset and result formats.

Points: one `x,y` pair per line; blank lines and `#` comments are skipped.
Features: `id;ring_count;c1,c2,...;x1 y1 x2 y2 ...` per line, with per-ring
vertex counts followed by all coordinates ring by ring; rings close
implicitly. Coordinates are written with shortest round-trip decimals for
their 32-bit storage, so emit/load cycles reproduce identical columns.

Results: CSV with a header. Distance joins emit point_index,feature_id,
distance (no-match rows carry feature id -1 and an empty distance);
containment joins emit point_index,feature_id with -1 for no-match.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .columnar import FeatureColumns, PointColumns, build_feature_columns
from .errors import ParseError, UsageError
from .execution import BenchReport
from .refine import NO_MATCH, P2PResult, PipResult


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _parse_float(token: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", line=lineno) from None
    if not np.isfinite(value):
        raise ParseError(f"{what} must be finite, got {token!r}", line=lineno)
    return value


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"bad {what} {token!r}", line=lineno) from None


def parse_points(text: str) -> PointColumns:
    xs = []
    ys = []
    for lineno, line in _data_lines(text):
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 'x,y', got {line!r}", line=lineno)
        xs.append(_parse_float(parts[0].strip(), lineno, "x coordinate"))
        ys.append(_parse_float(parts[1].strip(), lineno, "y coordinate"))
    return PointColumns.from_xy(np.array(xs, np.float64), np.array(ys, np.float64))


def parse_features(text: str, kind: str) -> FeatureColumns:
    features = []
    for lineno, line in _data_lines(text):
        parts = line.split(";")
        if len(parts) != 4:
            raise ParseError(
                f"expected 'id;ring_count;counts;coords' (4 fields), got {len(parts)}",
                line=lineno)
        fid = _parse_int(parts[0].strip(), lineno, "feature id")
        ring_count = _parse_int(parts[1].strip(), lineno, "ring count")
        if ring_count < 1:
            raise ParseError(f"ring count must be >= 1, got {ring_count}", line=lineno)
        count_tokens = [t for t in parts[2].split(",") if t.strip()]
        if len(count_tokens) != ring_count:
            raise ParseError(
                f"ring count {ring_count} does not match {len(count_tokens)} vertex counts",
                line=lineno)
        counts = [_parse_int(t.strip(), lineno, "vertex count") for t in count_tokens]
        if any(c < 1 for c in counts):
            raise ParseError("vertex counts must be >= 1", line=lineno)
        coord_tokens = parts[3].split()
        if len(coord_tokens) != 2 * sum(counts):
            raise ParseError(
                f"expected {2 * sum(counts)} coordinates, got {len(coord_tokens)}",
                line=lineno)
        values = [_parse_float(t, lineno, "coordinate") for t in coord_tokens]
        rings = []
        pos = 0
        for c in counts:
            ring = [(values[2 * (pos + i)], values[2 * (pos + i) + 1]) for i in range(c)]
            rings.append(ring)
            pos += c
        features.append((fid, rings))
    return build_feature_columns(features, kind)


def load_points(path) -> PointColumns:
    return parse_points(Path(path).read_text(encoding="utf-8"))


def load_features(path, kind: str) -> FeatureColumns:
    return parse_features(Path(path).read_text(encoding="utf-8"), kind)


def _c(v: np.floating) -> str:
    # str() of a float32 scalar is its shortest round-trip decimal
    return str(v)


def dumps_points(points: PointColumns) -> str:
    lines = [f"{_c(points.xs[i])},{_c(points.ys[i])}" for i in range(points.count)]
    lines.append("")
    return "\n".join(lines)


def dumps_features(feats: FeatureColumns) -> str:
    lines = []
    for f in range(feats.feature_count):
        rings = feats.feature_rings(f)
        counts = ",".join(str(len(ring)) for ring in rings)
        start, stop = feats.vertex_span(f)
        coords = " ".join(
            f"{_c(feats.vxs[i])} {_c(feats.vys[i])}" for i in range(start, stop))
        lines.append(f"{int(feats.feature_ids[f])};{len(rings)};{counts};{coords}")
    lines.append("")
    return "\n".join(lines)


def dump_points(points: PointColumns, path) -> None:
    Path(path).write_text(dumps_points(points), encoding="utf-8")


def dump_features(feats: FeatureColumns, path) -> None:
    Path(path).write_text(dumps_features(feats), encoding="utf-8")


def dumps_results(result) -> str:
    if isinstance(result, P2PResult):
        lines = ["point_index,feature_id,distance"]
        ids = result.nearest_feature_id
        dist = result.distance
        for i in range(ids.size):
            if ids[i] == NO_MATCH:
                lines.append(f"{i},{NO_MATCH},")
            else:
                lines.append(f"{i},{int(ids[i])},{repr(float(dist[i]))}")
    elif isinstance(result, PipResult):
        lines = ["point_index,feature_id"]
        ids = result.containing_feature_id
        for i in range(ids.size):
            lines.append(f"{i},{int(ids[i])}")
    else:
        raise UsageError(f"cannot serialize result of type {type(result).__name__}")
    lines.append("")
    return "\n".join(lines)


def emit_results(result, path) -> None:
    Path(path).write_text(dumps_results(result), encoding="utf-8")


def dumps_report(report: BenchReport) -> str:
    """Benchmark report as a small markdown document."""
    head = [
        "# spatial join benchmark",
        "",
        f"operation: {report.op}",
        f"points: {report.point_count}",
        f"features: {report.feature_count}",
    ]
    if report.range_r is not None:
        head.append(f"range: {report.range_r}")
    head.append(f"repeats per mode: {report.repeat}")
    head.extend([
        "",
        "| mode | workers | lanes | index build (ms) | filter (ms) | refine median (ms) | refine min (ms) |",
        "|------|---------|-------|------------------|-------------|--------------------|-----------------|",
    ])
    for t in report.timings:
        head.append(
            f"| {t.mode} | {t.workers} | {t.lane_width} | {t.index_build_ms:.3f} "
            f"| {t.filter_ms:.3f} | {t.refine_ms:.3f} | {t.refine_ms_min:.3f} |")
    head.extend([
        "",
        "| speedup | ratio |",
        "|---------|-------|",
    ])
    for label, ratio in report.speedups.items():
        head.append(f"| {label} | {ratio:.2f} |")
    head.append("")
    return "\n".join(head)


def emit_report(report: BenchReport, path) -> None:
    Path(path).write_text(dumps_report(report), encoding="utf-8")

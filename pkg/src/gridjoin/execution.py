"""Execution configurations and the timed join driver.

Four named configurations span the worker/lane matrix: SC and MC run the
scalar kernels on one/many workers, SC_LANES and MC_LANES the lane-batched
kernels. All four produce bit-identical results; only the timings differ,
and the five standard speedup ratios are derived from refine-phase times.
"""
from __future__ import annotations

import os
import statistics
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels, refine
from .columnar import FeatureColumns, PointColumns, POLYGON, POLYLINE
from .errors import UsageError
from .filtering import match_cells
from .grid import bucket_points, build_cell_feature_pairs, derive_grid

SC = "SC"
MC = "MC"
SC_LANES = "SC_LANES"
MC_LANES = "MC_LANES"
MODES = (SC, MC, SC_LANES, MC_LANES)

P2P = "p2p"
PIP = "pip"
OPS = (P2P, PIP)

MAX_WORKERS = 128
DEFAULT_LANE_WIDTH = 8
DEFAULT_REPEAT = 5

# user-facing mode spellings (CLI flags, API fields)
MODE_NAMES = {"sc": SC, "mc": MC, "sc-lanes": SC_LANES, "mc-lanes": MC_LANES}


def mode_from_name(name: str) -> str:
    try:
        return MODE_NAMES[name.lower()]
    except KeyError:
        raise UsageError(
            f"unknown mode {name!r}, expected one of {', '.join(MODE_NAMES)}") from None

SPEEDUP_ROWS = (
    ("SC/MC", SC, MC),
    ("(SC+SIMD)/(MC+SIMD)", SC_LANES, MC_LANES),
    ("SC/(SC+SIMD)", SC, SC_LANES),
    ("MC/(MC+SIMD)", MC, MC_LANES),
    ("SC/(MC+SIMD)", SC, MC_LANES),
)


def _default_workers() -> int:
    return min(os.cpu_count() or 1, MAX_WORKERS)


@dataclass(frozen=True)
class ExecConfig:
    """One cell of the mode matrix.

    Single-worker modes force workers to 1 and non-lane modes force
    lane_width to 1, so a config's fields always describe what actually runs.
    """

    mode: str
    workers: int = 1
    lane_width: int = 1
    batch_size: int = refine.DEFAULT_BATCH_SIZE

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.workers < 1:
            raise UsageError(f"worker count must be >= 1, got {self.workers}")
        if self.workers > MAX_WORKERS:
            raise UsageError(f"worker count {self.workers} exceeds the maximum {MAX_WORKERS}")
        if self.lane_width < 1:
            raise UsageError(f"lane width must be >= 1, got {self.lane_width}")
        if self.batch_size < 1:
            raise UsageError(f"batch size must be >= 1, got {self.batch_size}")
        if self.mode in (SC, SC_LANES) and self.workers != 1:
            object.__setattr__(self, "workers", 1)
        if self.mode in (SC, MC) and self.lane_width != 1:
            object.__setattr__(self, "lane_width", 1)

    @classmethod
    def for_mode(cls, mode: str, workers: int | None = None, lane_width: int | None = None,
                 batch_size: int | None = None) -> "ExecConfig":
        """Config with mode-appropriate defaults for unspecified fields."""
        if mode not in MODES:
            raise UsageError(f"unknown mode {mode!r}, expected one of {MODES}")
        if workers is None:
            workers = _default_workers() if mode in (MC, MC_LANES) else 1
        if lane_width is None:
            lane_width = DEFAULT_LANE_WIDTH if mode in (SC_LANES, MC_LANES) else 1
        if batch_size is None:
            batch_size = refine.DEFAULT_BATCH_SIZE
        return cls(mode, workers, lane_width, batch_size)


@dataclass(frozen=True)
class TimingReport:
    """Per-phase wall-clock times for one configuration, in milliseconds.

    refine_ms is the median over repeats and refine_ms_min the fastest run.
    """

    mode: str
    index_build_ms: float
    filter_ms: float
    refine_ms: float
    refine_ms_min: float
    repeats: int = 1
    workers: int = 1
    lane_width: int = 1
    speedup_vs_baseline: float | None = None

    def with_baseline(self, baseline: "TimingReport") -> "TimingReport":
        return replace(self, speedup_vs_baseline=baseline.refine_ms / self.refine_ms)


@dataclass(frozen=True)
class BenchReport:
    """All-mode benchmark outcome for one (op, dataset, params) triple."""

    op: str
    point_count: int
    feature_count: int
    range_r: float | None
    repeat: int
    timings: tuple[TimingReport, ...]
    speedups: dict[str, float] = field(compare=False)


def _now_ms() -> float:
    return time.perf_counter() * 1000.0


def run_join(op: str, points: PointColumns, feats: FeatureColumns, cfg: ExecConfig,
             r: float | None = None, cell_size: float | None = None,
             repeat: int = 1):
    """Full pipeline (index, filter, refine) under one configuration.

    Returns (result, TimingReport). The result is independent of cfg; with
    repeat > 1 only the refine phase re-runs and the median time is reported.
    """
    if op not in OPS:
        raise UsageError(f"unknown operation {op!r}, expected one of {OPS}")
    if repeat < 1:
        raise UsageError(f"repeat count must be >= 1, got {repeat}")
    if op == P2P:
        if r is None:
            raise UsageError("distance join requires a range")
        if feats.kind != POLYLINE:
            raise UsageError(f"distance join needs polylines, got {feats.kind}")
        expand = float(r)
        if not (expand > 0):
            raise UsageError(f"range must be positive, got {r}")
    else:
        if feats.kind != POLYGON:
            raise UsageError(f"containment join needs polygons, got {feats.kind}")
        expand = 0.0

    _kernels.warmup()

    t0 = _now_ms()
    g = derive_grid(points, feats, expand, cell_size)
    bucketed = bucket_points(points, g)
    pairs = build_cell_feature_pairs(feats, g, expand)
    t1 = _now_ms()
    cands = match_cells(bucketed, pairs)
    t2 = _now_ms()

    refine_times = []
    result = None
    for _ in range(repeat):
        r0 = _now_ms()
        if op == P2P:
            run = refine.p2p(points, bucketed, feats, cands, float(r),
                             cfg.lane_width, cfg.batch_size, cfg.workers)
        else:
            run = refine.pip(points, bucketed, feats, cands,
                             cfg.lane_width, cfg.batch_size, cfg.workers)
        refine_times.append(_now_ms() - r0)
        result = run
    report = TimingReport(
        mode=cfg.mode,
        index_build_ms=t1 - t0,
        filter_ms=t2 - t1,
        refine_ms=statistics.median(refine_times),
        refine_ms_min=min(refine_times),
        repeats=repeat,
        workers=cfg.workers,
        lane_width=cfg.lane_width,
    )
    return result, report


def speedup_matrix(reports) -> dict[str, float]:
    """The five standard refine-phase speedup ratios from all-mode timings."""
    by_mode: dict[str, TimingReport] = {}
    for rep in reports:
        if rep.mode in by_mode:
            raise UsageError(f"duplicate timing report for mode {rep.mode}")
        by_mode[rep.mode] = rep
    missing = [m for m in MODES if m not in by_mode]
    if missing:
        raise UsageError(f"missing timing reports for modes: {', '.join(missing)}")
    return {
        label: by_mode[num].refine_ms / by_mode[den].refine_ms
        for label, num, den in SPEEDUP_ROWS
    }


def _results_equal(op: str, a, b) -> bool:
    if op == P2P:
        return (np.array_equal(a.nearest_feature_id, b.nearest_feature_id)
                and a.distance.tobytes() == b.distance.tobytes())
    return np.array_equal(a.containing_feature_id, b.containing_feature_id)


def run_bench(op: str, points: PointColumns, feats: FeatureColumns,
              r: float | None = None, cell_size: float | None = None,
              repeat: int = DEFAULT_REPEAT, workers: int | None = None,
              lane_width: int | None = None, batch_size: int | None = None) -> BenchReport:
    """Run all four configurations, check result equality, derive speedups."""
    reports = []
    reference = None
    for mode in MODES:
        cfg = ExecConfig.for_mode(mode, workers=workers, lane_width=lane_width,
                                  batch_size=batch_size)
        result, timing = run_join(op, points, feats, cfg, r=r,
                                  cell_size=cell_size, repeat=repeat)
        if reference is None:
            reference = result
        elif not _results_equal(op, reference, result):
            raise RuntimeError(f"mode {mode} produced a different result than {MODES[0]}")
        reports.append(timing)
    return BenchReport(
        op=op,
        point_count=points.count,
        feature_count=feats.feature_count,
        range_r=float(r) if r is not None else None,
        repeat=repeat,
        timings=tuple(reports),
        speedups=speedup_matrix(reports),
    )

"""Two-phase spatial joins over columnar geometry.

A uniform grid pairs point-occupied cells with feature bounding boxes
(filter); exact distance and containment kernels evaluate the surviving
candidates (refine). Four execution configurations trade workers and lane
batching for speed while producing bit-identical results.
"""
__version__ = "0.1.0"

from .columnar import (
    COORD_DTYPE,
    INDEX_DTYPE,
    POLYGON,
    POLYLINE,
    FeatureColumns,
    PointColumns,
    build_feature_columns,
)
from .errors import GridJoinError, ParseError, UsageError, ValidationError
from .execution import (
    MODES,
    BenchReport,
    ExecConfig,
    TimingReport,
    run_bench,
    run_join,
    speedup_matrix,
)
from .filtering import CandidatePairs, match_cells
from .grid import GridSpec, bucket_points, build_cell_feature_pairs, derive_grid
from .refine import NO_MATCH, P2PResult, PipResult

__all__ = [
    "__version__",
    "COORD_DTYPE",
    "INDEX_DTYPE",
    "POLYGON",
    "POLYLINE",
    "FeatureColumns",
    "PointColumns",
    "build_feature_columns",
    "GridJoinError",
    "ParseError",
    "UsageError",
    "ValidationError",
    "MODES",
    "BenchReport",
    "ExecConfig",
    "TimingReport",
    "run_bench",
    "run_join",
    "speedup_matrix",
    "CandidatePairs",
    "match_cells",
    "GridSpec",
    "bucket_points",
    "build_cell_feature_pairs",
    "derive_grid",
    "NO_MATCH",
    "P2PResult",
    "PipResult",
]

"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

DATASET_NAME = Field(min_length=1, max_length=200, pattern=r"^[A-Za-z0-9._-]+$")

ModeName = Literal["sc", "mc", "sc-lanes", "mc-lanes"]


class PointsUpload(BaseModel):
    name: str = DATASET_NAME
    text: str


class FeaturesUpload(BaseModel):
    name: str = DATASET_NAME
    kind: Literal["polyline", "polygon"]
    text: str


class DatasetInfo(BaseModel):
    name: str
    kind: Literal["points", "polyline", "polygon"]
    count: int
    vertex_count: int | None = None


class DatasetListing(BaseModel):
    datasets: list[DatasetInfo]


class DatasetText(BaseModel):
    name: str
    kind: Literal["points", "polyline", "polygon"]
    text: str


class GenParams(BaseModel):
    kind: Literal["clustered", "scattered"]
    point_count: int = Field(ge=0)
    feature_count: int = Field(ge=0)
    geometry: Literal["polyline", "polygon"] | None = None
    mean_vertices: float | None = Field(default=None, gt=0)
    holes_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = 0


class GenerateRequest(GenParams):
    points_name: str = DATASET_NAME
    features_name: str = DATASET_NAME


class GenerateResponse(BaseModel):
    points: DatasetInfo
    features: DatasetInfo


class ExecParams(BaseModel):
    mode: ModeName = "sc"
    workers: int | None = Field(default=None, ge=1)
    lanes: int | None = Field(default=None, ge=1)
    batch: int | None = Field(default=None, ge=1)
    grid_size: float | None = Field(default=None, gt=0)
    repeat: int = Field(default=1, ge=1)


class P2PJoinRequest(ExecParams):
    points: str = DATASET_NAME
    polylines: str = DATASET_NAME
    range: float = Field(gt=0)


class PipJoinRequest(ExecParams):
    points: str = DATASET_NAME
    polygons: str = DATASET_NAME


class TimingModel(BaseModel):
    mode: str
    index_build_ms: float
    filter_ms: float
    refine_ms: float
    refine_ms_min: float
    repeats: int
    workers: int
    lane_width: int


class JoinResponse(BaseModel):
    op: Literal["p2p", "pip"]
    point_count: int
    matched: int
    results_csv: str
    timing: TimingModel


class BenchRequest(BaseModel):
    op: Literal["p2p", "pip"]
    points: str | None = None
    features: str | None = None
    gen: GenParams | None = None
    range: float | None = Field(default=None, gt=0)
    grid_size: float | None = Field(default=None, gt=0)
    repeat: int = Field(default=5, ge=1)
    workers: int | None = Field(default=None, ge=1)
    lanes: int | None = Field(default=None, ge=1)
    batch: int | None = Field(default=None, ge=1)


class BenchResponse(BaseModel):
    op: str
    point_count: int
    feature_count: int
    range: float | None
    repeat: int
    timings: list[TimingModel]
    speedups: dict[str, float]
    report_markdown: str


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str

"""HTTP service: dataset registry plus join and benchmark endpoints.

The service owns parsed columnar datasets; clients upload text datasets,
reference them by name in join requests, and get CSV results plus timings
back. Error mapping: usage/parse problems are 400, data-invariant
violations 422, unknown datasets 404.
"""
from __future__ import annotations

from dataclasses import asdict

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, datagen, execution, refine, textio
from ..columnar import FeatureColumns, PointColumns, POLYGON, POLYLINE
from ..errors import GridJoinError, ParseError, UsageError
from ..errors import ValidationError as DataValidationError
from . import schemas
from .store import DatasetNotFound, DatasetStore


def _error_payload(tag: str, exc: Exception) -> dict:
    return {"detail": {"error": tag, "message": str(exc)}}


def _exec_config(params: schemas.ExecParams) -> execution.ExecConfig:
    return execution.ExecConfig.for_mode(
        execution.mode_from_name(params.mode),
        workers=params.workers,
        lane_width=params.lanes,
        batch_size=params.batch,
    )


def _gen_spec(params: schemas.GenParams, geometry_default: str | None = None) -> datagen.GenSpec:
    geometry = params.geometry or geometry_default or POLYLINE
    return datagen.GenSpec(
        kind=params.kind,
        point_count=params.point_count,
        feature_count=params.feature_count,
        geometry=geometry,
        mean_vertices=params.mean_vertices,
        holes_fraction=params.holes_fraction,
        seed=params.seed,
    )


def _timing_model(report: execution.TimingReport) -> schemas.TimingModel:
    fields = asdict(report)
    fields.pop("speedup_vs_baseline", None)
    return schemas.TimingModel(**fields)


def create_app(store: DatasetStore | None = None) -> FastAPI:
    app = FastAPI(title="gridjoin", version=__version__)
    registry = store if store is not None else DatasetStore()
    app.state.store = registry

    @app.exception_handler(GridJoinError)
    async def _on_engine_error(request: Request, exc: GridJoinError):
        if isinstance(exc, DataValidationError):
            return JSONResponse(status_code=422, content=_error_payload("validation", exc))
        if isinstance(exc, ParseError):
            return JSONResponse(status_code=400, content=_error_payload("parse", exc))
        return JSONResponse(status_code=400, content=_error_payload("usage", exc))

    @app.exception_handler(DatasetNotFound)
    async def _on_missing_dataset(request: Request, exc: DatasetNotFound):
        return JSONResponse(status_code=404, content=_error_payload("not_found", exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/datasets/points", response_model=schemas.DatasetInfo)
    def upload_points(req: schemas.PointsUpload):
        points = textio.parse_points(req.text)
        return registry.put_points(req.name, points).info()

    @app.post("/datasets/features", response_model=schemas.DatasetInfo)
    def upload_features(req: schemas.FeaturesUpload):
        feats = textio.parse_features(req.text, req.kind)
        return registry.put_features(req.name, feats).info()

    @app.post("/datasets/generate", response_model=schemas.GenerateResponse)
    def generate_datasets(req: schemas.GenerateRequest):
        points, feats = datagen.generate(_gen_spec(req))
        p_info = registry.put_points(req.points_name, points).info()
        f_info = registry.put_features(req.features_name, feats).info()
        return schemas.GenerateResponse(points=p_info, features=f_info)

    @app.get("/datasets", response_model=schemas.DatasetListing)
    def list_datasets():
        return schemas.DatasetListing(datasets=registry.list())

    @app.get("/datasets/{name}", response_model=schemas.DatasetInfo)
    def dataset_info(name: str):
        return registry.get(name).info()

    @app.get("/datasets/{name}/text", response_model=schemas.DatasetText)
    def dataset_text(name: str):
        entry = registry.get(name)
        if entry.points is not None:
            text = textio.dumps_points(entry.points)
        else:
            text = textio.dumps_features(entry.features)
        return schemas.DatasetText(name=name, kind=entry.kind, text=text)

    @app.delete("/datasets/{name}", status_code=204)
    def delete_dataset(name: str):
        registry.delete(name)

    @app.post("/joins/p2p", response_model=schemas.JoinResponse)
    def join_p2p(req: schemas.P2PJoinRequest):
        points = registry.get_points(req.points)
        feats = registry.get_features(req.polylines, POLYLINE)
        result, timing = execution.run_join(
            execution.P2P, points, feats, _exec_config(req),
            r=req.range, cell_size=req.grid_size, repeat=req.repeat)
        matched = int((result.nearest_feature_id != refine.NO_MATCH).sum())
        return schemas.JoinResponse(
            op="p2p", point_count=result.point_count, matched=matched,
            results_csv=textio.dumps_results(result), timing=_timing_model(timing))

    @app.post("/joins/pip", response_model=schemas.JoinResponse)
    def join_pip(req: schemas.PipJoinRequest):
        points = registry.get_points(req.points)
        feats = registry.get_features(req.polygons, POLYGON)
        result, timing = execution.run_join(
            execution.PIP, points, feats, _exec_config(req),
            cell_size=req.grid_size, repeat=req.repeat)
        matched = int((result.containing_feature_id != refine.NO_MATCH).sum())
        return schemas.JoinResponse(
            op="pip", point_count=result.point_count, matched=matched,
            results_csv=textio.dumps_results(result), timing=_timing_model(timing))

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest):
        if req.gen is not None:
            if req.points or req.features:
                raise UsageError("provide either a generator spec or dataset names, not both")
            default_geometry = POLYLINE if req.op == "p2p" else POLYGON
            points, feats = datagen.generate(_gen_spec(req.gen, default_geometry))
        else:
            if not (req.points and req.features):
                raise UsageError("benchmark needs dataset names or a generator spec")
            points = registry.get_points(req.points)
            kind = POLYLINE if req.op == "p2p" else POLYGON
            feats = registry.get_features(req.features, kind)
        report = execution.run_bench(
            req.op, points, feats, r=req.range, cell_size=req.grid_size,
            repeat=req.repeat, workers=req.workers, lane_width=req.lanes,
            batch_size=req.batch)
        return schemas.BenchResponse(
            op=report.op,
            point_count=report.point_count,
            feature_count=report.feature_count,
            range=report.range_r,
            repeat=report.repeat,
            timings=[_timing_model(t) for t in report.timings],
            speedups=report.speedups,
            report_markdown=textio.dumps_report(report),
        )

    return app

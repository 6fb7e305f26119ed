"""Command-line client for the spatial-join service.

Every data-touching command talks to the HTTP API: by default an in-process
instance of the service, or a remote one via --server. Datasets uploaded for
a single command use throwaway names and are deleted afterwards.

Exit codes: 0 success, 1 usage or parse errors, 2 data-validation errors.
"""
from __future__ import annotations

import uuid
from contextlib import contextmanager
from pathlib import Path

import click
import httpx

from .errors import GridJoinError, ParseError, UsageError, ValidationError

MODE_CHOICES = ("sc", "mc", "sc-lanes", "mc-lanes")


class ApiClient:
    """Thin JSON wrapper: in-process service by default, remote by URL."""

    def __init__(self, server: str | None = None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from .service import create_app
            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def close(self) -> None:
        self._client.close()

    def request(self, method: str, path: str, json: dict | None = None):
        resp = self._client.request(method, path, json=json)
        if resp.status_code >= 400:
            self._raise_for(resp)
        if resp.status_code == 204:
            return None
        return resp.json()

    def _raise_for(self, resp) -> None:
        try:
            detail = resp.json().get("detail")
        except Exception:
            detail = None
        if isinstance(detail, dict):
            tag = detail.get("error", "usage")
            message = detail.get("message") or "request failed"
        elif isinstance(detail, list):
            # request-shape errors from the API's model validation
            parts = [e.get("msg", "") for e in detail[:3] if isinstance(e, dict)]
            tag = "usage"
            message = "; ".join(p for p in parts if p) or "invalid request"
        else:
            tag = "usage"
            message = str(detail) if detail else f"request failed with status {resp.status_code}"
        if tag == "validation":
            raise ValidationError(message)
        if tag == "parse":
            raise ParseError(message)
        raise UsageError(message)


def _temp_name() -> str:
    return f"cli-{uuid.uuid4().hex}"


@contextmanager
def _uploaded_points(client: ApiClient, path):
    name = _temp_name()
    text = Path(path).read_text(encoding="utf-8")
    client.request("POST", "/datasets/points", {"name": name, "text": text})
    try:
        yield name
    finally:
        _quiet_delete(client, name)


@contextmanager
def _uploaded_features(client: ApiClient, path, kind: str):
    name = _temp_name()
    text = Path(path).read_text(encoding="utf-8")
    client.request("POST", "/datasets/features", {"name": name, "kind": kind, "text": text})
    try:
        yield name
    finally:
        _quiet_delete(client, name)


def _quiet_delete(client: ApiClient, name: str) -> None:
    try:
        client.request("DELETE", f"/datasets/{name}")
    except (GridJoinError, httpx.HTTPError):
        pass


def _drop_nones(payload: dict) -> dict:
    return {k: v for k, v in payload.items() if v is not None}


def _echo_join_summary(resp: dict) -> None:
    t = resp["timing"]
    click.echo(
        f"{resp['op']}: matched {resp['matched']} of {resp['point_count']} points; "
        f"index {t['index_build_ms']:.3f} ms, filter {t['filter_ms']:.3f} ms, "
        f"refine {t['refine_ms']:.3f} ms ({t['mode']})")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--server", default=None, metavar="URL",
              help="Base URL of a running service; default runs one in process.")
@click.pass_context
def cli(ctx, server):
    """Grid-filtered spatial joins: nearest polyline and containing polygon."""
    ctx.obj = server


@cli.command("p2p")
@click.option("--points", "points_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Points text file.")
@click.option("--polylines", "polylines_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Polylines text file.")
@click.option("--range", "range_r", required=True, type=float,
              help="Search range R; matches report the nearest polyline within R.")
@click.option("--grid-size", type=float, default=None, help="Grid cell size (default: heuristic).")
@click.option("--mode", type=click.Choice(MODE_CHOICES), default="sc", show_default=True)
@click.option("--workers", type=int, default=None, help="Worker threads for mc modes.")
@click.option("--lanes", type=int, default=None, help="Lane width for *-lanes modes.")
@click.option("--batch", type=int, default=None, help="Candidate groups per work batch.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.pass_obj
def p2p_cmd(server, points_path, polylines_path, range_r, grid_size, mode,
            workers, lanes, batch, out_path):
    """Nearest polyline within a range for every point."""
    client = ApiClient(server)
    try:
        with _uploaded_points(client, points_path) as pname, \
                _uploaded_features(client, polylines_path, "polyline") as fname:
            payload = _drop_nones({
                "points": pname, "polylines": fname, "range": range_r,
                "grid_size": grid_size, "mode": mode, "workers": workers,
                "lanes": lanes, "batch": batch,
            })
            resp = client.request("POST", "/joins/p2p", payload)
        Path(out_path).write_text(resp["results_csv"], encoding="utf-8")
        _echo_join_summary(resp)
    finally:
        client.close()


@cli.command("pip")
@click.option("--points", "points_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Points text file.")
@click.option("--polygons", "polygons_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Polygons text file.")
@click.option("--grid-size", type=float, default=None, help="Grid cell size (default: heuristic).")
@click.option("--mode", type=click.Choice(MODE_CHOICES), default="sc", show_default=True)
@click.option("--workers", type=int, default=None, help="Worker threads for mc modes.")
@click.option("--lanes", type=int, default=None, help="Lane width for *-lanes modes.")
@click.option("--batch", type=int, default=None, help="Candidate groups per work batch.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.pass_obj
def pip_cmd(server, points_path, polygons_path, grid_size, mode, workers,
            lanes, batch, out_path):
    """Containing polygon (even-odd rule) for every point."""
    client = ApiClient(server)
    try:
        with _uploaded_points(client, points_path) as pname, \
                _uploaded_features(client, polygons_path, "polygon") as fname:
            payload = _drop_nones({
                "points": pname, "polygons": fname, "grid_size": grid_size,
                "mode": mode, "workers": workers, "lanes": lanes, "batch": batch,
            })
            resp = client.request("POST", "/joins/pip", payload)
        Path(out_path).write_text(resp["results_csv"], encoding="utf-8")
        _echo_join_summary(resp)
    finally:
        client.close()


_GEN_KEYS = {
    "kind": ("kind", str),
    "points": ("point_count", int),
    "features": ("feature_count", int),
    "geometry": ("geometry", str),
    "mean-vertices": ("mean_vertices", float),
    "holes-frac": ("holes_fraction", float),
    "seed": ("seed", int),
}


def _parse_gen_option(text: str) -> dict:
    """Compact generator spec: kind=clustered,points=10000,features=200,..."""
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep:
            raise UsageError(f"generator spec items look like key=value, got {item!r}")
        if key not in _GEN_KEYS:
            raise UsageError(f"unknown generator key {key!r}; known: {', '.join(_GEN_KEYS)}")
        field, conv = _GEN_KEYS[key]
        try:
            out[field] = conv(value.strip())
        except ValueError:
            raise UsageError(f"bad value for generator key {key}: {value!r}") from None
    missing = [k for k, (f, _) in _GEN_KEYS.items() if f in ("kind", "point_count", "feature_count") and f not in out]
    if missing:
        raise UsageError(f"generator spec is missing: {', '.join(missing)}")
    return out


@cli.command("bench")
@click.option("--op", required=True, type=click.Choice(["p2p", "pip"]))
@click.option("--gen", "gen_spec", default=None, metavar="SPEC",
              help="Generate the dataset in place of files: "
                   "kind=clustered,points=10000,features=200[,geometry=...]"
                   "[,mean-vertices=...][,holes-frac=...][,seed=...]")
@click.option("--points", "points_path", default=None,
              type=click.Path(exists=True, dir_okay=False), help="Points text file.")
@click.option("--polylines", "polylines_path", default=None,
              type=click.Path(exists=True, dir_okay=False), help="Polylines file (p2p).")
@click.option("--polygons", "polygons_path", default=None,
              type=click.Path(exists=True, dir_okay=False), help="Polygons file (pip).")
@click.option("--range", "range_r", type=float, default=None, help="Search range (p2p only).")
@click.option("--grid-size", type=float, default=None)
@click.option("--repeat", type=int, default=5, show_default=True,
              help="Refine-phase repetitions per mode; the median is reported.")
@click.option("--workers", type=int, default=None, help="Worker threads for mc modes.")
@click.option("--lanes", type=int, default=None, help="Lane width for *-lanes modes.")
@click.option("--batch", type=int, default=None, help="Candidate groups per work batch.")
@click.option("--report", "report_path", required=True,
              type=click.Path(dir_okay=False, writable=True))
@click.pass_obj
def bench_cmd(server, op, gen_spec, points_path, polylines_path, polygons_path,
              range_r, grid_size, repeat, workers, lanes, batch, report_path):
    """Time all four execution modes and write the speedup report."""
    if op == "p2p" and range_r is None:
        raise UsageError("a distance benchmark needs --range")
    client = ApiClient(server)
    try:
        payload = _drop_nones({
            "op": op, "range": range_r, "grid_size": grid_size, "repeat": repeat,
            "workers": workers, "lanes": lanes, "batch": batch,
        })
        if gen_spec is not None:
            if points_path or polylines_path or polygons_path:
                raise UsageError("use --gen or dataset files, not both")
            payload["gen"] = _parse_gen_option(gen_spec)
            resp = client.request("POST", "/bench", payload)
        else:
            feature_path = polylines_path if op == "p2p" else polygons_path
            flag = "--polylines" if op == "p2p" else "--polygons"
            if points_path is None or feature_path is None:
                raise UsageError(f"benchmark needs --gen, or --points and {flag}")
            if (polygons_path if op == "p2p" else polylines_path) is not None:
                raise UsageError(f"operation {op} takes {flag}, not the other feature kind")
            kind = "polyline" if op == "p2p" else "polygon"
            with _uploaded_points(client, points_path) as pname, \
                    _uploaded_features(client, feature_path, kind) as fname:
                payload["points"] = pname
                payload["features"] = fname
                resp = client.request("POST", "/bench", payload)
        Path(report_path).write_text(resp["report_markdown"], encoding="utf-8")
        click.echo(f"benchmarked {resp['op']} on {resp['point_count']} points x "
                   f"{resp['feature_count']} features (repeat {resp['repeat']})")
        for label, ratio in resp["speedups"].items():
            click.echo(f"  {label}: {ratio:.2f}")
        click.echo(f"report written to {report_path}")
    finally:
        client.close()


@cli.command("gen")
@click.option("--kind", required=True, type=click.Choice(["clustered", "scattered"]))
@click.option("--points", "point_count", required=True, type=int)
@click.option("--features", "feature_count", required=True, type=int)
@click.option("--geometry", type=click.Choice(["polyline", "polygon"]), default=None,
              help="Feature geometry; clustered defaults to polyline, scattered to polygon.")
@click.option("--mean-vertices", type=float, default=None,
              help="Mean vertices per feature (defaults: 2.4 polyline, 280 polygon).")
@click.option("--holes-frac", type=float, default=0.0, show_default=True,
              help="Fraction of polygons that get a hole.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-points", "out_points", required=True,
              type=click.Path(dir_okay=False, writable=True))
@click.option("--out-features", "out_features", required=True,
              type=click.Path(dir_okay=False, writable=True))
@click.pass_obj
def gen_cmd(server, kind, point_count, feature_count, geometry, mean_vertices,
            holes_frac, seed, out_points, out_features):
    """Generate a synthetic dataset and write it as text files."""
    geometry = geometry or ("polyline" if kind == "clustered" else "polygon")
    client = ApiClient(server)
    try:
        pname, fname = _temp_name(), _temp_name()
        payload = _drop_nones({
            "points_name": pname, "features_name": fname, "kind": kind,
            "point_count": point_count, "feature_count": feature_count,
            "geometry": geometry, "mean_vertices": mean_vertices,
            "holes_fraction": holes_frac, "seed": seed,
        })
        client.request("POST", "/datasets/generate", payload)
        try:
            points_text = client.request("GET", f"/datasets/{pname}/text")["text"]
            features_text = client.request("GET", f"/datasets/{fname}/text")["text"]
        finally:
            _quiet_delete(client, pname)
            _quiet_delete(client, fname)
        Path(out_points).write_text(points_text, encoding="utf-8")
        Path(out_features).write_text(features_text, encoding="utf-8")
        click.echo(f"wrote {point_count} points to {out_points} and "
                   f"{feature_count} {kind} {geometry} features to {out_features}")
    finally:
        client.close()


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except GridJoinError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except httpx.HTTPError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

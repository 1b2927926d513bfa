"""HTTP service bridging the engine and the browser UI.

In-memory sessions only: a dataset id maps to its point cloud and the
most recent mapper graph. A newer mapper request for the same dataset
supersedes an in-flight one (checked between cover elements); the
superseded request answers 409. Every error body is {"error": str}.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.concurrency import run_in_threadpool

from .analysis import linear_regression, pca
from .clustering import DistanceStrategy
from .dataset import PointCloud, read_csv_text, wrangle
from .errors import DataError
from .filters import FilterSpec
from .graph_query import (
    Selection,
    connected_component,
    extend_path,
    selection_details,
    shortest_path,
)
from .nerve import MapperGraph, parse_graph_json
from .pipeline import MapperParams, compute_mapper

MAX_UPLOAD_BYTES = 512 << 20


class Superseded(Exception):
    """A newer mapper request took over this dataset."""


class HttpError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class DatasetSession:
    pc: PointCloud | None
    report_obj: dict | None
    lock: threading.Lock = field(default_factory=threading.Lock)
    generation: int = 0
    graph: MapperGraph | None = None
    graph_bytes: bytes | None = None


class SessionState:
    """Dataset-id keyed store; ids are never reused within a process."""

    def __init__(self):
        self._lock = threading.Lock()
        self._next_id = 1
        self.sessions: dict[int, DatasetSession] = {}

    def add(self, session: DatasetSession) -> int:
        with self._lock:
            dataset_id = self._next_id
            self._next_id += 1
            self.sessions[dataset_id] = session
        return dataset_id

    def get(self, dataset_id) -> DatasetSession:
        session = self.sessions.get(dataset_id)
        if session is None:
            raise HttpError(404, f"unknown dataset {dataset_id!r}")
        return session


def _require(body: dict, key: str):
    if key not in body:
        raise HttpError(422, f"missing field {key!r}")
    return body[key]


def _as_axis_list(value, axes: int, name: str) -> list:
    out = value if isinstance(value, list) else [value] * axes
    if len(out) != axes:
        raise HttpError(422, f"{name} needs one value per filter axis")
    return out


def _parse_mapper_params(body: dict) -> MapperParams:
    raw_filters = _require(body, "filters")
    if not isinstance(raw_filters, list) or not 1 <= len(raw_filters) <= 2:
        raise HttpError(422, "filters must be a list of 1 or 2 specs")
    try:
        filters = [FilterSpec.from_json_obj(obj) for obj in raw_filters]
    except DataError as e:
        raise HttpError(422, f"filters: {e}") from None
    axes = len(filters)
    n = _as_axis_list(_require(body, "n"), axes, "n")
    p = _as_axis_list(_require(body, "p"), axes, "p")
    eps = _require(body, "eps")
    if not isinstance(eps, (int, float)) or not eps > 0:
        raise HttpError(422, "eps must be a positive number")
    min_pts = body.get("min_pts", 5)
    if not isinstance(min_pts, int) or min_pts < 1:
        raise HttpError(422, "min_pts must be a positive integer")
    strategy = body.get("strategy", {})
    try:
        return MapperParams(
            filters=filters,
            n=[int(v) for v in n],
            p=[float(v) for v in p],
            eps=float(eps),
            min_pts=min_pts,
            norm=body.get("norm", "none"),
            strategy=DistanceStrategy(
                mode=strategy.get("mode", "precomputed"),
                threshold=strategy.get("threshold", 20_000)),
        )
    except DataError as e:
        raise HttpError(422, str(e)) from None


def create_app(graphs_dir: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="nervemap")
    state = SessionState()
    app.state.sessions = state
    app.state.graphs_dir = os.path.abspath(graphs_dir) if graphs_dir else None

    @app.exception_handler(HttpError)
    async def _http_error(_req, exc: HttpError):
        return JSONResponse({"error": exc.message}, status_code=exc.status)

    @app.exception_handler(DataError)
    async def _data_error(_req, exc: DataError):
        return JSONResponse({"error": str(exc)}, status_code=422)

    async def _json_body(request: Request) -> dict:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            raise HttpError(422, "request body must be JSON")
        if not isinstance(body, dict):
            raise HttpError(422, "request body must be a JSON object")
        return body

    @app.post("/api/dataset")
    async def upload_dataset(request: Request):
        data = await request.body()
        if len(data) > MAX_UPLOAD_BYTES:
            raise HttpError(413, "upload exceeds 512 MB; use the command line")
        try:
            rows, header = read_csv_text(data.decode("utf-8-sig"))
            pc, report = wrangle(rows, header)
        except (DataError, UnicodeDecodeError) as e:
            raise HttpError(400, str(e)) from None
        session = DatasetSession(pc=pc, report_obj=report.to_json_obj())
        dataset_id = state.add(session)
        return {
            "dataset_id": dataset_id,
            "n_rows": pc.n_rows,
            "columns": [{"name": c.name, "kind": c.kind} for c in pc.columns],
            "wrangle_report": session.report_obj,
        }

    @app.post("/api/mapper")
    async def mapper(request: Request):
        body = await _json_body(request)
        session = state.get(_require(body, "dataset_id"))
        if session.pc is None:
            raise HttpError(422, "dataset is a loaded graph; upload a CSV to recompute")
        params = _parse_mapper_params(body)
        with session.lock:
            session.generation += 1
            generation = session.generation

        def cancel_check():
            if session.generation != generation:
                raise Superseded()

        def compute():
            return compute_mapper(session.pc, params, cancel_check=cancel_check)

        try:
            run = await run_in_threadpool(compute)
        except Superseded:
            raise HttpError(409, "superseded by a newer request") from None
        with session.lock:
            if session.generation == generation:  # never install a stale graph
                session.graph = run.graph
                session.graph_bytes = run.graph_bytes
        return Response(content=run.graph_bytes, media_type="application/json")

    def _session_graph(session: DatasetSession) -> MapperGraph:
        if session.graph is None:
            raise HttpError(404, "no mapper graph computed for this dataset yet")
        return session.graph

    @app.post("/api/select")
    async def select(request: Request):
        body = await _json_body(request)
        session = state.get(_require(body, "dataset_id"))
        graph = _session_graph(session)
        mode = _require(body, "mode")
        args = body.get("args", {})
        if not isinstance(args, dict):
            raise HttpError(422, "args must be an object")
        try:
            if mode == "nodes":
                ids = _require(args, "ids") if "ids" in args else _require(body, "ids")
                if not isinstance(ids, list):
                    raise HttpError(422, "ids must be a list of node ids")
                sel = Selection(node_ids=sorted(set(ids)), mode="nodes")
                details = selection_details(graph, sel, session.pc)
                return details
            if mode == "cluster":
                seed = _require(args, "seed")
                sel = connected_component(graph, seed)
                return selection_details(graph, sel, session.pc)
            if mode == "path":
                if "path" in args:
                    path = extend_path(graph, _require(args, "path"),
                                       _require(args, "extend"))
                else:
                    path = shortest_path(graph, _require(args, "start"),
                                         _require(args, "end"))
                if path is None:
                    return {"path": None}
                sel = Selection(node_ids=path, mode="path")
                details = selection_details(graph, sel, session.pc)
                details["path"] = path
                return details
        except DataError as e:
            raise HttpError(422, str(e)) from None
        raise HttpError(422, f"unknown selection mode {mode!r}")

    @app.post("/api/analysis")
    async def analysis(request: Request):
        body = await _json_body(request)
        session = state.get(_require(body, "dataset_id"))
        if session.pc is None:
            raise HttpError(422, "analysis needs the dataset, not just a graph")
        kind = _require(body, "kind")
        rows = body.get("rows")  # omitted -> whole dataset
        if rows is not None and (not isinstance(rows, list)
                                 or any(not isinstance(r, int) for r in rows)):
            raise HttpError(422, "rows must be a list of row indices")
        params = body.get("params", {})
        try:
            if kind == "regression":
                result = await run_in_threadpool(
                    linear_regression, session.pc, rows,
                    _require(params, "dependent"),
                    _require(params, "independents"))
                return {"kind": "regression", "result": result.to_json_obj()}
            if kind == "pca":
                result = await run_in_threadpool(
                    pca, session.pc, rows, _require(params, "k"))
                return {"kind": "pca", "result": result.to_json_obj()}
        except DataError as e:
            raise HttpError(422, str(e)) from None
        raise HttpError(422, f"unknown analysis kind {kind!r}")

    def _graphs_dir() -> str:
        if app.state.graphs_dir is None:
            raise HttpError(404, "no graphs directory configured")
        return app.state.graphs_dir

    @app.get("/api/graphs")
    async def list_graphs():
        root = _graphs_dir()
        names = sorted(
            name for name in os.listdir(root)
            if name.endswith(".json") and name != "manifest.json")
        return {"graphs": names}

    @app.post("/api/graphs/load")
    async def load_graph(request: Request):
        body = await _json_body(request)
        root = _graphs_dir()
        rel = _require(body, "path")
        full = os.path.abspath(os.path.join(root, rel))
        if not (full + os.sep).startswith(root + os.sep) or full == root:
            raise HttpError(403, "path escapes the graphs directory")
        if not os.path.isfile(full):
            raise HttpError(404, f"no such graph file {rel!r}")
        with open(full, "rb") as f:
            data = f.read()
        try:
            graph = parse_graph_json(data)
        except DataError as e:
            raise HttpError(422, str(e)) from None
        if "dataset_id" in body and body["dataset_id"] is not None:
            session = state.get(body["dataset_id"])
            with session.lock:
                session.generation += 1
                session.graph = graph
                session.graph_bytes = data
            dataset_id = body["dataset_id"]
        else:
            session = DatasetSession(pc=None, report_obj=None,
                                     graph=graph, graph_bytes=data)
            dataset_id = state.add(session)
        return Response(content=data, media_type="application/json",
                        headers={"X-Dataset-Id": str(dataset_id)})

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True))

    return app

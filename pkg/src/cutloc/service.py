"""HTTP service for interactive localization sessions.

A session is created from a graph payload and an anomaly spec; the client
then alternates GET query / POST answer until the session finishes, and
fetches the result and the graph for rendering. Sessions live in memory;
each one is advanced under its own lock so concurrent clients cannot
corrupt a state machine.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .cuts import state_of, vertices_between
from .errors import CutlocError, ParseError, VerdictMismatchError
from .graph import EdgeKey, EdgeKind, ExecutionGraph, topo_levels
from .graphio import loads_graph
from .localizer import (
    LocalizerConfig,
    LocalizerSession,
    feed_verdict,
    parse_anomaly_spec,
    query_bound,
    result_to_json,
    start,
    transcript_entry_to_json,
)
from .oracles import EdgeVerdict, GlobalVerdict, StateVerdict
from .predicates import parse_predicates


class CreateSessionRequest(BaseModel):
    graph: str  # graph file payload (line-delimited JSON)
    anomaly: str  # anomaly spec, e.g. "edge:1,3,data,x"
    predicates: Optional[str] = None  # predicate file payload, for step-5b


class AnswerRequest(BaseModel):
    per_edge: dict[str, str]
    global_verdict: str = Field(alias="global")

    model_config = {"populate_by_name": True}


@dataclass
class SessionRecord:
    id: str
    graph: ExecutionGraph
    session: LocalizerSession
    created: str
    updated: str
    lock: threading.Lock = dc_field(default_factory=threading.Lock)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionStore:
    def __init__(self):
        self._records: dict[str, SessionRecord] = {}
        self._table_lock = threading.Lock()

    def create(
        self, graph_text: str, anomaly_spec: str, predicates_text: str | None = None
    ) -> SessionRecord:
        graph = loads_graph(graph_text)
        predicates = parse_predicates(predicates_text) if predicates_text else []
        anomaly = parse_anomaly_spec(graph, anomaly_spec)
        session = start(graph, anomaly, LocalizerConfig(predicates=tuple(predicates)))
        record = SessionRecord(
            id=uuid.uuid4().hex[:12],
            graph=graph,
            session=session,
            created=_now(),
            updated=_now(),
        )
        with self._table_lock:
            self._records[record.id] = record
        return record

    def get(self, session_id: str) -> SessionRecord:
        with self._table_lock:
            record = self._records.get(session_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return record

    def list(self) -> list[SessionRecord]:
        with self._table_lock:
            return sorted(self._records.values(), key=lambda r: r.created)


def _status(session: LocalizerSession) -> str:
    return "finished" if session.finished else "awaiting_verdict"


def _summary(record: SessionRecord) -> dict:
    session = record.session
    body = {"id": record.id, "status": _status(session), "created": record.created}
    if session.finished:
        body["result"] = result_to_json(session.result)
    else:
        body["pending"] = session.pending_cut.to_json()
    return body


def _query_payload(record: SessionRecord) -> dict:
    session = record.session
    pending = session.pending_cut
    assert pending is not None
    state = state_of(record.graph, pending)
    return {
        "cut": pending.to_json(),
        "atoms": [a.to_json() for a in state.sorted_atoms()],
        "progress": {
            "between_count": len(vertices_between(session.c_c, session.c_e)),
            "step": len(session.transcript) + 1,
            "bound": query_bound(session.initial_between),
        },
        "bounds": {
            "clean": session.c_c.sorted_downset(),
            "anomalous": session.c_e.sorted_downset(),
        },
    }


def _parse_answer(record: SessionRecord, body: AnswerRequest) -> StateVerdict:
    per_edge = {}
    for key_text, verdict_text in body.per_edge.items():
        try:
            key = EdgeKey.from_string(key_text)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        try:
            per_edge[key] = EdgeVerdict(verdict_text)
        except ValueError:
            raise HTTPException(
                status_code=422, detail=f"bad edge verdict {verdict_text!r}"
            ) from None
    if body.global_verdict == "ok":
        global_verdict = GlobalVerdict.ok()
    elif body.global_verdict == "violated":
        global_verdict = GlobalVerdict.violated()
    else:
        raise HTTPException(
            status_code=422, detail=f"bad global verdict {body.global_verdict!r}"
        )
    return StateVerdict(per_edge, global_verdict)


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>cutloc</title></head>
<body><h1>cutloc session service</h1>
<p>The web UI is not built. Run <code>npm install && npm run build</code> in
<code>frontend/</code> and restart with <code>--static frontend/dist</code>.</p>
<p>The JSON API lives under <code>/sessions</code>.</p></body></html>"""


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="cutloc session service")
    store = SessionStore()
    app.state.store = store

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        try:
            record = store.create(request.graph, request.anomaly, request.predicates)
        except (ParseError, CutlocError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return _summary(record)

    @app.get("/sessions")
    def list_sessions():
        return [_summary(r) for r in store.list()]

    @app.get("/sessions/{session_id}/query")
    def get_query(session_id: str):
        record = store.get(session_id)
        with record.lock:
            if record.session.finished:
                raise HTTPException(status_code=409, detail="session is finished")
            return _query_payload(record)

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerRequest):
        record = store.get(session_id)
        with record.lock:
            if record.session.finished:
                raise HTTPException(status_code=409, detail="session is finished")
            verdict = _parse_answer(record, body)
            try:
                record.session = feed_verdict(record.session, verdict)
            except VerdictMismatchError as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from None
            record.updated = _now()
            session = record.session
            response = {"status": _status(session)}
            if session.finished:
                response["result"] = result_to_json(session.result)
            else:
                response["next"] = session.pending_cut.to_json()
            return response

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str):
        record = store.get(session_id)
        with record.lock:
            session = record.session
            if not session.finished:
                raise HTTPException(status_code=409, detail="session is still running")
            return {
                "result": result_to_json(session.result),
                "transcript": [
                    transcript_entry_to_json(i, entry)
                    for i, entry in enumerate(session.transcript, start=1)
                ],
            }

    @app.get("/sessions/{session_id}/graph")
    def get_graph(session_id: str):
        record = store.get(session_id)
        g = record.graph
        levels = topo_levels(g)
        vertices = [
            {"id": v, "desc": desc, "level": levels[v]}
            for v, desc in g.descriptions().items()
        ]
        edges = []
        for e in g.edges:
            obj = {"src": e.src, "dst": e.dst, "kind": e.label.kind.value,
                   "key": e.key.to_string()}
            if e.label.kind is EdgeKind.DATA:
                obj["var"] = e.label.var
                obj["value"] = e.label.value
            edges.append(obj)
        return {
            "root": 0,
            "deterministic": g.deterministic,
            "vertices": vertices,
            "edges": edges,
        }

    resolved_static = _resolve_static(static_dir)
    if resolved_static is not None:
        app.mount("/", StaticFiles(directory=resolved_static, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_PAGE

    return app


def _resolve_static(static_dir: str | None) -> str | None:
    if static_dir:
        return static_dir
    default = Path.cwd() / "frontend" / "dist"
    if (default / "index.html").exists():
        return str(default)
    return None

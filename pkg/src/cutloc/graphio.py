"""Line-delimited JSON graph files.

First line is the header {"type":"graph","root":0,"deterministic":...},
then one line per vertex, then one line per edge. Unknown fields on a
line are ignored; unknown line types and vertices appearing after edges
are parse errors. Semantic problems (duplicate keys, dangling endpoints,
cycles) are not parse errors: they surface through graph validation.
"""

from __future__ import annotations

import json

from .errors import GraphParseError
from .graph import ROOT, Edge, EdgeLabel, ExecutionGraph


def dumps_graph(g: ExecutionGraph) -> str:
    lines = [
        json.dumps({"type": "graph", "root": ROOT, "deterministic": g.deterministic})
    ]
    for v, desc in g.descriptions().items():
        lines.append(json.dumps({"type": "vertex", "id": v, "desc": desc}))
    for e in g.edges:
        obj = {"type": "edge", "src": e.src, "dst": e.dst, "kind": e.label.kind.value}
        if e.label.kind.value == "data":
            obj["var"] = e.label.var
            obj["value"] = e.label.value
        lines.append(json.dumps(obj))
    return "\n".join(lines) + "\n"


def save_graph(g: ExecutionGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_graph(g))


def _scalar(obj, line_no: int, what: str):
    if not isinstance(obj, (bool, int, float, str)):
        raise GraphParseError(f"{what} must be a scalar, got {type(obj).__name__}", line_no)
    return obj


def loads_graph(text: str, *, validate: bool = True) -> ExecutionGraph:
    vertices: dict[int, str] = {}
    edges: list[Edge] = []
    header = None
    saw_edge = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GraphParseError(f"bad JSON ({exc.msg})", line_no) from None
        if not isinstance(obj, dict):
            raise GraphParseError("each line must be a JSON object", line_no)
        kind = obj.get("type")

        if header is None:
            if kind != "graph":
                raise GraphParseError('expected the {"type":"graph",...} header first', line_no)
            if obj.get("root") != ROOT:
                raise GraphParseError(f"root must be {ROOT}", line_no)
            header = {"deterministic": bool(obj.get("deterministic", True))}
        elif kind == "vertex":
            if saw_edge:
                raise GraphParseError("vertex line after edge lines", line_no)
            if not isinstance(obj.get("id"), int) or isinstance(obj.get("id"), bool):
                raise GraphParseError("vertex needs an integer id", line_no)
            vid = obj["id"]
            if vid < 0:
                raise GraphParseError("vertex id must be non-negative", line_no)
            if vid in vertices:
                raise GraphParseError(f"vertex {vid} declared twice", line_no)
            vertices[vid] = str(obj.get("desc", ""))
        elif kind == "edge":
            saw_edge = True
            for endpoint in ("src", "dst"):
                if not isinstance(obj.get(endpoint), int) or isinstance(obj.get(endpoint), bool):
                    raise GraphParseError(f"edge needs an integer {endpoint}", line_no)
            edge_kind = obj.get("kind")
            if edge_kind == "control":
                label = EdgeLabel.control()
            elif edge_kind == "data":
                if "var" not in obj or "value" not in obj:
                    raise GraphParseError("data edge needs var and value", line_no)
                label = EdgeLabel.data(
                    str(obj["var"]), _scalar(obj["value"], line_no, "edge value")
                )
            else:
                raise GraphParseError(f"unknown edge kind {edge_kind!r}", line_no)
            edges.append(Edge(obj["src"], obj["dst"], label))
        elif kind == "graph":
            raise GraphParseError("duplicate graph header", line_no)
        else:
            raise GraphParseError(f"unknown line type {kind!r}", line_no)

    if header is None:
        raise GraphParseError("missing graph header", 1)

    g = ExecutionGraph(vertices, edges, deterministic=header["deterministic"])
    if validate:
        g.ensure_valid()
    return g


def load_graph(path, *, validate: bool = True) -> ExecutionGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_graph(fh.read(), validate=validate)

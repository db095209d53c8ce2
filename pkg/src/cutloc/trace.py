"""Execution traces of a small imperative language and their graphs.

A trace is an ordered list of events: assignments, branches and outputs.
The builder turns a trace into an execution graph with one vertex per
event: each variable read becomes a data edge from its latest assignment,
and each event gets a control edge from the branch that guarded it (or
from the start vertex at top level).

Also provides the single-fault mutator used to grow a corpus of buggy
runs whose graphs stay edge-key-aligned with their golden originals.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .errors import (
    BadCtrlRefError,
    NoAssignEventError,
    TraceError,
    TraceParseError,
    UseBeforeDefError,
)
from .graph import ROOT, Edge, ExecutionGraph, Scalar

KINDS = ("assign", "branch", "output")


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    kind: str
    var: str = ""
    value: Optional[Scalar] = None
    uses: tuple[str, ...] = ()
    cond_result: Optional[bool] = None
    ctrl: int = 0

    def to_json(self) -> dict:
        obj: dict = {"seq": self.seq, "kind": self.kind}
        if self.kind == "assign":
            obj["var"] = self.var
            obj["value"] = self.value
        if self.kind == "output" and self.value is not None:
            obj["value"] = self.value
        if self.uses:
            obj["uses"] = list(self.uses)
        if self.kind == "branch":
            obj["cond_result"] = self.cond_result
        obj["ctrl"] = self.ctrl
        return obj


def assign(seq: int, var: str, value: Scalar, uses: Iterable[str] = (), ctrl: int = 0) -> TraceEvent:
    return TraceEvent(seq, "assign", var=var, value=value, uses=tuple(uses), ctrl=ctrl)


def branch(seq: int, cond_result: bool, uses: Iterable[str] = (), ctrl: int = 0) -> TraceEvent:
    return TraceEvent(seq, "branch", cond_result=cond_result, uses=tuple(uses), ctrl=ctrl)


def output(seq: int, uses: Iterable[str] = (), value: Optional[Scalar] = None, ctrl: int = 0) -> TraceEvent:
    return TraceEvent(seq, "output", uses=tuple(uses), value=value, ctrl=ctrl)


def validate_trace(events: Sequence[TraceEvent]) -> None:
    """Check sequence numbering, control references and event shapes."""
    prev_seq = 0
    branches = set()
    for e in events:
        if e.seq <= prev_seq:
            raise TraceError(f"event seq {e.seq} not strictly ascending")
        prev_seq = e.seq
        if e.kind not in KINDS:
            raise TraceError(f"event {e.seq}: unknown kind {e.kind!r}")
        if e.kind == "assign" and not e.var:
            raise TraceError(f"assign event {e.seq} needs a variable name")
        if e.kind == "branch" and e.cond_result is None:
            raise TraceError(f"branch event {e.seq} needs cond_result")
        if e.ctrl != 0:
            if e.ctrl >= e.seq:
                raise BadCtrlRefError(e.seq, e.ctrl, "must reference an earlier event")
            if e.ctrl not in branches:
                raise BadCtrlRefError(e.seq, e.ctrl, "must reference a branch event")
        if e.kind == "branch":
            branches.add(e.seq)


def build_graph(events: Sequence[TraceEvent], *, allow_undef: bool = False) -> ExecutionGraph:
    """One vertex per event plus the start vertex; data edges from the
    latest assignment of each variable read, control edges from the
    guarding branch. Reads of never-assigned variables are errors unless
    allow_undef, which routes them from the start vertex as "undef"."""
    validate_trace(events)
    vertices: dict[int, str] = {ROOT: "start"}
    edges: list[Edge] = []
    last_assign: dict[str, TraceEvent] = {}

    for e in events:
        vertices[e.seq] = _describe(e)
        edges.append(Edge.control(e.ctrl, e.seq))
        for var in sorted(set(e.uses)):
            src = last_assign.get(var)
            if src is not None:
                edges.append(Edge.data(src.seq, e.seq, var, src.value))
            elif allow_undef:
                edges.append(Edge.data(ROOT, e.seq, var, "undef"))
            else:
                raise UseBeforeDefError(var, e.seq)
        if e.kind == "assign":
            last_assign[e.var] = e

    g = ExecutionGraph(vertices, edges, deterministic=True)
    g.ensure_valid()
    return g


def _describe(e: TraceEvent) -> str:
    if e.kind == "assign":
        return f"assign {e.var} = {json.dumps(e.value)}"
    if e.kind == "branch":
        return f"branch -> {json.dumps(e.cond_result)}"
    return f"output({', '.join(e.uses)})"


def mutate_trace(events: Sequence[TraceEvent], seed: int) -> tuple[list[TraceEvent], int]:
    """Perturb the value of one assignment, chosen by the seed.

    Numbers gain 1, booleans flip, strings get a suffix; sequence numbers
    never change, so the mutant's graph has exactly the original's edge
    keys and differs only in labels."""
    assigns = [e for e in events if e.kind == "assign"]
    if not assigns:
        raise NoAssignEventError("trace has no assign events to mutate")
    rng = random.Random(seed)
    target = assigns[rng.randrange(len(assigns))]
    value = target.value
    if isinstance(value, bool):
        new_value: Scalar = not value
    elif isinstance(value, (int, float)):
        new_value = value + 1
    else:
        new_value = str(value) + "_X"
    mutated = [
        replace(e, value=new_value) if e.seq == target.seq else e for e in events
    ]
    return mutated, target.seq


# -- trace files ----------------------------------------------------------------


def dumps_trace(events: Sequence[TraceEvent]) -> str:
    return "\n".join(json.dumps(e.to_json()) for e in events) + "\n"


def save_trace(events: Sequence[TraceEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_trace(events))


def loads_trace(text: str) -> list[TraceEvent]:
    events = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceParseError(f"bad JSON ({exc.msg})", line_no) from None
        if not isinstance(obj, dict):
            raise TraceParseError("each line must be a JSON object", line_no)
        try:
            event = TraceEvent(
                seq=int(obj["seq"]),
                kind=str(obj["kind"]),
                var=str(obj.get("var", "")),
                value=obj.get("value"),
                uses=tuple(str(u) for u in obj.get("uses", ())),
                cond_result=obj.get("cond_result"),
                ctrl=int(obj.get("ctrl", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise TraceParseError(f"bad event: {exc}", line_no) from None
        events.append(event)
    return events


def load_trace(path) -> list[TraceEvent]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_trace(fh.read())

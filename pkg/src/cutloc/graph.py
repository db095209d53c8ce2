"""Rooted acyclic execution graphs with labeled data and control edges.

A graph models one program run: vertex 0 is the synthetic start vertex,
every other vertex one executed operation. A data edge carries the
(variable, value) pair written at its source and read at its target; a
control edge records that the source caused the target to run and is
always labeled "true".

Graphs are immutable once constructed and safe to share between threads.
Construction accepts structurally broken input on purpose: validation is
a report, not a constructor failure, so that loaders can surface every
violation at once.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import GraphValidationError, UnknownVertexError

Scalar = Union[bool, int, float, str]

ROOT = 0
CONTROL_LABEL = "true"


class EdgeKind(str, Enum):
    DATA = "data"
    CONTROL = "control"


def scalars_equal(a: Scalar, b: Scalar) -> bool:
    """Value equality that keeps booleans apart from 0/1 but lets 1 == 1.0."""
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


@dataclass(frozen=True, order=True)
class EdgeKey:
    """Stable identity of an edge: (src, dst, kind, var); var is "" for control."""

    src: int
    dst: int
    kind: EdgeKind
    var: str = ""

    def to_string(self) -> str:
        if self.kind is EdgeKind.CONTROL:
            return f"{self.src},{self.dst},control"
        return f"{self.src},{self.dst},data,{self.var}"

    @staticmethod
    def from_string(text: str) -> "EdgeKey":
        parts = text.split(",")
        if len(parts) == 3 and parts[2] == "control":
            pass
        elif len(parts) == 4 and parts[2] == "control" and parts[3] == "":
            parts = parts[:3]
        elif len(parts) != 4 or parts[2] != "data":
            raise ValueError(f"not an edge key: {text!r}")
        try:
            src, dst = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"not an edge key: {text!r}") from None
        if len(parts) == 3:
            return EdgeKey(src, dst, EdgeKind.CONTROL)
        return EdgeKey(src, dst, EdgeKind.DATA, parts[3])

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class EdgeLabel:
    """What an edge carries: a (var, value) pair for data, "true" for control."""

    kind: EdgeKind
    var: str = ""
    value: Scalar = CONTROL_LABEL

    @staticmethod
    def data(var: str, value: Scalar) -> "EdgeLabel":
        return EdgeLabel(EdgeKind.DATA, var, value)

    @staticmethod
    def control(value: Scalar = CONTROL_LABEL) -> "EdgeLabel":
        # Non-"true" values are representable so that validation can flag them.
        return EdgeLabel(EdgeKind.CONTROL, "", value)

    def to_json(self) -> dict:
        if self.kind is EdgeKind.CONTROL:
            return {"kind": "control", "value": self.value}
        return {"kind": "data", "var": self.var, "value": self.value}

    @staticmethod
    def from_json(obj: Mapping) -> "EdgeLabel":
        if obj.get("kind") == "control":
            return EdgeLabel.control(obj.get("value", CONTROL_LABEL))
        return EdgeLabel.data(obj["var"], obj["value"])


def labels_equal(a: EdgeLabel, b: EdgeLabel) -> bool:
    return a.kind == b.kind and a.var == b.var and scalars_equal(a.value, b.value)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: EdgeLabel

    @property
    def key(self) -> EdgeKey:
        return EdgeKey(self.src, self.dst, self.label.kind, self.label.var)

    @staticmethod
    def data(src: int, dst: int, var: str, value: Scalar) -> "Edge":
        return Edge(src, dst, EdgeLabel.data(var, value))

    @staticmethod
    def control(src: int, dst: int) -> "Edge":
        return Edge(src, dst, EdgeLabel.control())


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()


class ExecutionGraph:
    """One program run as a rooted DAG; immutable after construction.

    `vertices` is either an iterable of ids or a mapping id -> description.
    Edges are kept sorted by key so every traversal in the package is
    deterministic.
    """

    def __init__(
        self,
        vertices: Mapping[int, str] | Iterable[int],
        edges: Iterable[Edge] = (),
        *,
        deterministic: bool = True,
    ):
        if isinstance(vertices, Mapping):
            desc = {int(v): str(d) for v, d in vertices.items()}
        else:
            desc = {int(v): "" for v in vertices}
        if any(v < 0 for v in desc):
            raise ValueError("vertex ids must be non-negative")
        self._desc: dict[int, str] = dict(sorted(desc.items()))
        self._edges: tuple[Edge, ...] = tuple(sorted(edges, key=lambda e: e.key))
        self._deterministic = bool(deterministic)

    @property
    def vertex_ids(self) -> frozenset[int]:
        return frozenset(self._desc)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def deterministic(self) -> bool:
        return self._deterministic

    def __contains__(self, vertex: int) -> bool:
        return vertex in self._desc

    def description(self, vertex: int) -> str:
        if vertex not in self._desc:
            raise UnknownVertexError(f"vertex {vertex} not in graph")
        return self._desc[vertex]

    def descriptions(self) -> dict[int, str]:
        return dict(self._desc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExecutionGraph):
            return NotImplemented
        return (
            self._desc == other._desc
            and self._edges == other._edges
            and self._deterministic == other._deterministic
        )

    def __repr__(self) -> str:
        return (
            f"ExecutionGraph({len(self._desc)} vertices, {len(self._edges)} edges,"
            f" deterministic={self._deterministic})"
        )

    # -- adjacency (restricted to endpoints that exist) ---------------------

    @cached_property
    def _succ(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, set[int]] = {v: set() for v in self._desc}
        for e in self._edges:
            if e.src in self._desc and e.dst in self._desc and e.src != e.dst:
                adj[e.src].add(e.dst)
        return {v: tuple(sorted(s)) for v, s in adj.items()}

    @cached_property
    def _pred(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, set[int]] = {v: set() for v in self._desc}
        for e in self._edges:
            if e.src in self._desc and e.dst in self._desc and e.src != e.dst:
                adj[e.dst].add(e.src)
        return {v: tuple(sorted(s)) for v, s in adj.items()}

    @cached_property
    def edge_by_key(self) -> dict[EdgeKey, Edge]:
        return {e.key: e for e in self._edges}

    def out_edges(self, vertex: int) -> tuple[Edge, ...]:
        return tuple(e for e in self._edges if e.src == vertex)

    # -- validation ----------------------------------------------------------

    @cached_property
    def validation(self) -> ValidationReport:
        violations: list[Violation] = []
        if ROOT not in self._desc:
            violations.append(Violation("root_missing", f"vertex {ROOT} is required"))

        seen_keys: set[EdgeKey] = set()
        for e in self._edges:
            if e.src not in self._desc:
                violations.append(
                    Violation("dangling", f"edge {e.key} has unknown src {e.src}")
                )
            if e.dst not in self._desc:
                violations.append(
                    Violation("dangling", f"edge {e.key} has unknown dst {e.dst}")
                )
            if e.src == e.dst:
                violations.append(Violation("cycle", f"self loop at {e.src}"))
            if e.key in seen_keys:
                violations.append(Violation("duplicate_key", str(e.key)))
            seen_keys.add(e.key)
            if e.label.kind is EdgeKind.CONTROL and e.label.value != CONTROL_LABEL:
                violations.append(
                    Violation(
                        "bad_control_label",
                        f"edge {e.key} labeled {e.label.value!r}, expected \"true\"",
                    )
                )

        cycle = self._find_cycle()
        if cycle:
            violations.append(
                Violation("cycle", ",".join(str(v) for v in cycle))
            )

        if ROOT in self._desc:
            reached = self._reachable_from(ROOT)
            for v in self._desc:
                if v not in reached:
                    violations.append(Violation("unreachable", f"vertex {v}"))

        return ValidationReport(ok=not violations, violations=tuple(violations))

    def _reachable_from(self, start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in self._succ[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen

    def _find_cycle(self) -> list[int] | None:
        """Iterative three-color DFS; returns the vertices of one cycle."""
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {v: WHITE for v in self._desc}
        parent: dict[int, int | None] = {}
        for start in self._desc:
            if color[start] != WHITE:
                continue
            stack: list[tuple[int, int]] = [(start, 0)]
            parent[start] = None
            while stack:
                node, idx = stack[-1]
                if idx == 0:
                    color[node] = GRAY
                succ = self._succ[node]
                if idx < len(succ):
                    stack[-1] = (node, idx + 1)
                    child = succ[idx]
                    if color[child] == GRAY:
                        # child is on the current DFS path, so walking the
                        # parent chain from node must reach it.
                        cycle = [node]
                        cur = node
                        while cur != child:
                            cur = parent[cur]  # type: ignore[assignment]
                            cycle.append(cur)
                        return list(reversed(cycle))
                    if color[child] == WHITE:
                        parent[child] = node
                        stack.append((child, 0))
                else:
                    color[node] = BLACK
                    stack.pop()
        return None

    def ensure_valid(self) -> None:
        report = self.validation
        if not report.ok:
            raise GraphValidationError(report)

    # -- traversal helpers ----------------------------------------------------

    @cached_property
    def _levels(self) -> dict[int, int]:
        # Longest directed path length from the root; requires a valid graph.
        indeg = {v: len(self._pred[v]) for v in self._desc}
        level = {ROOT: 0}
        queue = deque([ROOT])
        while queue:
            u = queue.popleft()
            for v in self._succ[u]:
                level[v] = max(level.get(v, 0), level[u] + 1)
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        return level


def validate_graph(g: ExecutionGraph) -> ValidationReport:
    """Check rootedness, acyclicity, endpoint existence, control labels and
    key uniqueness; every violation found is reported."""
    return g.validation


def topo_levels(g: ExecutionGraph) -> dict[int, int]:
    """Longest-path distance from the root for every vertex.

    level(root) = 0 and level(dst) >= level(src) + 1 for every edge, so a
    sort by (level, id) never places a vertex before one of its ancestors.
    """
    g.ensure_valid()
    return dict(g._levels)


def ancestors(g: ExecutionGraph, vertex: int) -> frozenset[int]:
    """All vertices with a directed path to `vertex`, including `vertex`."""
    g.ensure_valid()
    if vertex not in g:
        raise UnknownVertexError(f"vertex {vertex} not in graph")
    seen = {vertex}
    queue = deque([vertex])
    while queue:
        u = queue.popleft()
        for p in g._pred[u]:
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return frozenset(seen)

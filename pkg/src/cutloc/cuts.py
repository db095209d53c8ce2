"""Cuts of an execution graph and the partial order used for bisection.

A cut separates the graph into a root-side part and the rest, with every
cut edge directed outward from the root side. The canonical form is the
root-side vertex set W (a downset: closed under predecessors); the edge
set and the state crossing the cut are derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .errors import (
    CutGraphMismatchError,
    CutsNotOrderedError,
    EmptyComplementError,
    NotDownClosedError,
    RootNotInCutError,
    UnknownVertexError,
)
from .graph import ROOT, Edge, EdgeKey, EdgeLabel, ExecutionGraph


class CutOrder(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Cut:
    """A valid cut, represented by its root-side downset W.

    Construct through cut_from_downset or root_cut; both reject sets that
    do not describe a cut. Equality and hashing ignore the graph handle.
    """

    downset: frozenset[int]
    graph: ExecutionGraph = field(compare=False, repr=False)

    def sorted_downset(self) -> list[int]:
        return sorted(self.downset)

    def to_json(self) -> dict:
        return {"downset": self.sorted_downset()}


@dataclass(frozen=True)
class Atom:
    """One conjunct of a state: the label carried by one cut edge."""

    edge_key: EdgeKey
    label: EdgeLabel

    def to_json(self) -> dict:
        return {"edge_key": self.edge_key.to_string(), "label": self.label.to_json()}


@dataclass(frozen=True)
class State:
    """The program state at a cut: one atom per cut edge."""

    atoms: frozenset[Atom]

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=lambda a: a.edge_key)

    def edge_keys(self) -> frozenset[EdgeKey]:
        return frozenset(a.edge_key for a in self.atoms)

    def without(self, atom: Atom) -> "State":
        return State(self.atoms - {atom})

    def __len__(self) -> int:
        return len(self.atoms)


def _same_graph(g: ExecutionGraph, c: Cut) -> None:
    if c.graph is not g and c.graph != g:
        raise CutGraphMismatchError("cut belongs to a different graph")


def cut_from_downset(g: ExecutionGraph, w: Iterable[int]) -> Cut:
    """Build the cut whose root side is exactly `w`.

    Rejects sets missing the root, covering all vertices, containing
    unknown vertices, or not closed under predecessors (the witness
    back-edge is reported).
    """
    g.ensure_valid()
    downset = frozenset(int(v) for v in w)
    unknown = downset - g.vertex_ids
    if unknown:
        raise UnknownVertexError(f"vertices {sorted(unknown)} not in graph")
    if ROOT not in downset:
        raise RootNotInCutError("the root vertex must be on the root side")
    if downset == g.vertex_ids:
        raise EmptyComplementError("the complement of the cut must be nonempty")
    for e in g.edges:
        if e.dst in downset and e.src not in downset:
            raise NotDownClosedError(e.src, e.dst)
    return Cut(downset=downset, graph=g)


def root_cut(g: ExecutionGraph) -> Cut:
    """The smallest cut: root side {root}, cut edges = the root's out-edges."""
    g.ensure_valid()
    return cut_from_downset(g, {ROOT})


def cut_edges(g: ExecutionGraph, c: Cut) -> list[Edge]:
    """The edges crossing the cut, sorted by key (all directed outward)."""
    _same_graph(g, c)
    w = c.downset
    return [e for e in g.edges if e.src in w and e.dst not in w]


def compare(c_a: Cut, c_b: Cut) -> CutOrder:
    """Order two cuts of the same graph by containment of their root sides."""
    if c_a.graph is not c_b.graph and c_a.graph != c_b.graph:
        raise CutGraphMismatchError("cuts belong to different graphs")
    if c_a.downset == c_b.downset:
        return CutOrder.EQUAL
    if c_a.downset < c_b.downset:
        return CutOrder.LESS
    if c_a.downset > c_b.downset:
        return CutOrder.GREATER
    return CutOrder.INCOMPARABLE


def state_of(g: ExecutionGraph, c: Cut) -> State:
    """One atom (edge key, label) per edge crossing the cut."""
    return State(frozenset(Atom(e.key, e.label) for e in cut_edges(g, c)))


def _require_ordered(c_lo: Cut, c_hi: Cut) -> None:
    if compare(c_lo, c_hi) not in (CutOrder.LESS, CutOrder.EQUAL):
        raise CutsNotOrderedError("lower cut is not below upper cut")


def vertices_between(c_lo: Cut, c_hi: Cut) -> frozenset[int]:
    """Vertices strictly after c_lo and inside c_hi's root side."""
    _require_ordered(c_lo, c_hi)
    return frozenset(c_hi.downset - c_lo.downset)


def bisect(g: ExecutionGraph, c_lo: Cut, c_hi: Cut) -> Optional[Cut]:
    """A cut strictly between two ordered cuts, or None when none is needed.

    Returns None when at most one vertex separates the bounds. Otherwise
    the vertices between are sorted by (longest-path level, id) and the
    lower cut is grown by the first half. Any prefix of that order is
    predecessor-closed because every edge strictly increases the level,
    so the result is always a valid cut and the choice is deterministic.
    """
    _same_graph(g, c_lo)
    _same_graph(g, c_hi)
    between = vertices_between(c_lo, c_hi)
    if len(between) <= 1:
        return None
    levels = g._levels
    ordered = sorted(between, key=lambda v: (levels[v], v))
    take = len(ordered) // 2
    new_downset = c_lo.downset | frozenset(ordered[:take])
    return Cut(downset=new_downset, graph=g)

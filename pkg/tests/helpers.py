"""Random generators and brute-force oracles used by the test suite."""

from __future__ import annotations

import random
from itertools import combinations

from hypothesis import strategies as st

from cutloc import Edge, ExecutionGraph
from cutloc.trace import TraceEvent, assign, branch, output


# -- random generators ----------------------------------------------------------


def random_dag(rng: random.Random, max_vertices: int = 8) -> ExecutionGraph:
    """A random valid rooted DAG; every non-root vertex gets at least one
    parent with a smaller id, so rootedness holds by construction."""
    n = rng.randint(2, max_vertices)
    vertices = {0: "start", **{i: f"op{i}" for i in range(1, n)}}
    edges: dict = {}
    for v in range(1, n):
        parents = rng.sample(range(v), k=rng.randint(1, min(v, 3)))
        for u in parents:
            if rng.random() < 0.3:
                e = Edge.control(u, v)
            else:
                e = Edge.data(u, v, rng.choice("xyz"), rng.randint(0, 9))
            edges[e.key] = e
    # occasionally a parallel data edge with a different variable
    if len(edges) > 1 and rng.random() < 0.3:
        base = rng.choice([e for e in edges.values()])
        extra = Edge.data(base.src, base.dst, "w", rng.randint(0, 9))
        edges.setdefault(extra.key, extra)
    return ExecutionGraph(vertices, edges.values())


def corrupt_graph(rng: random.Random, g: ExecutionGraph) -> ExecutionGraph:
    """Break a valid graph in one random way (or leave it alone)."""
    vertices = dict(g.descriptions())
    edges = list(g.edges)
    mode = rng.choice(["none", "isolated", "back_edge", "dangling", "dup_key", "bad_label"])
    if mode == "isolated":
        vertices[99] = "stray"
    elif mode == "back_edge" and len(vertices) >= 2:
        v = rng.randrange(1, max(vertices) + 1)
        u = rng.randrange(0, v)
        if v in vertices and u in vertices:
            edges.append(Edge.data(v, u, "back", 0))
    elif mode == "dangling":
        edges.append(Edge.control(0, 123))
    elif mode == "dup_key" and edges:
        edges.append(rng.choice(edges))
    elif mode == "bad_label":
        from cutloc import EdgeLabel

        edges.append(Edge(0, rng.choice(sorted(vertices)), EdgeLabel.control("yes")))
    return ExecutionGraph(vertices, edges)


@st.composite
def dag_graphs(draw, max_vertices: int = 8) -> ExecutionGraph:
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_dag(random.Random(seed), max_vertices=max_vertices)


def random_trace(
    rng: random.Random, min_events: int = 10, max_events: int = 30
) -> list[TraceEvent]:
    """A random trace where every assignment's value is read later (the
    next assignment reads it, and a final output reads everything), so a
    mutated assignment always shows up on at least one edge."""
    n = rng.randint(min_events, max_events)
    pool = ["x", "y", "z"]
    events: list[TraceEvent] = []
    assigned: list[str] = []
    last_var: str | None = None
    branches: list[int] = []
    for seq in range(1, n):
        kind = "assign" if seq == 1 else rng.choices(
            ["assign", "branch", "output"], weights=[6, 2, 2]
        )[0]
        ctrl = rng.choice(branches) if branches and rng.random() < 0.3 else 0
        if kind == "assign":
            var = rng.choice(pool)
            uses = [last_var] if last_var else []
            if assigned and rng.random() < 0.3:
                extra = rng.choice(assigned)
                if extra not in uses:
                    uses.append(extra)
            events.append(assign(seq, var, rng.randint(0, 99), uses=uses, ctrl=ctrl))
            if var not in assigned:
                assigned.append(var)
            last_var = var
        elif kind == "branch":
            uses = [rng.choice(assigned)] if assigned and rng.random() < 0.7 else []
            events.append(branch(seq, rng.random() < 0.5, uses=uses, ctrl=ctrl))
            branches.append(seq)
        else:
            uses = [rng.choice(assigned)] if assigned else []
            events.append(output(seq, uses=uses, ctrl=ctrl))
    events.append(output(n, uses=sorted(set(assigned))))
    return events


# -- brute-force oracles ----------------------------------------------------------


def brute_longest_paths(g: ExecutionGraph) -> dict[int, int]:
    """Longest path length from the root by enumerating every path."""
    succ: dict[int, set[int]] = {v: set() for v in g.vertex_ids}
    for e in g.edges:
        if e.src != e.dst:
            succ[e.src].add(e.dst)
    best = {v: 0 for v in g.vertex_ids}

    def walk(v: int, length: int) -> None:
        best[v] = max(best[v], length)
        for w in succ[v]:
            walk(w, length + 1)

    walk(0, 0)
    return best


def brute_is_valid(g: ExecutionGraph) -> bool:
    """Re-derive validity with independent (recursive, exhaustive) checks."""
    vids = g.vertex_ids
    if 0 not in vids:
        return False
    if any(e.src not in vids or e.dst not in vids for e in g.edges):
        return False
    keys = [e.key for e in g.edges]
    if len(keys) != len(set(keys)):
        return False
    if any(
        e.label.kind.value == "control" and e.label.value != "true" for e in g.edges
    ):
        return False
    if any(e.src == e.dst for e in g.edges):
        return False

    succ: dict[int, set[int]] = {v: set() for v in vids}
    for e in g.edges:
        succ[e.src].add(e.dst)

    def has_cycle_from(start: int, v: int, seen: frozenset[int]) -> bool:
        for w in succ[v]:
            if w == start:
                return True
            if w not in seen and has_cycle_from(start, w, seen | {w}):
                return True
        return False

    if any(has_cycle_from(v, v, frozenset({v})) for v in vids):
        return False

    reached = {0}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for w in succ[u]:
            if w not in reached:
                reached.add(w)
                frontier.append(w)
    return reached == set(vids)


def brute_valid_downsets(g: ExecutionGraph) -> list[frozenset[int]]:
    """Every root-containing, proper, predecessor-closed vertex set, found
    by enumerating all 2^(|V|-1) subsets."""
    rest = sorted(g.vertex_ids - {0})
    found = []
    for r in range(len(rest) + 1):
        for combo in combinations(rest, r):
            w = frozenset({0, *combo})
            if w == g.vertex_ids:
                continue
            if all(e.src in w for e in g.edges if e.dst in w):
                found.append(w)
    return found


def reachable_skipping(g: ExecutionGraph, skip_keys: frozenset) -> frozenset[int]:
    """Vertices reachable from the root without using the given edges."""
    seen = {0}
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for e in g.edges:
            if e.src == u and e.key not in skip_keys and e.dst not in seen:
                seen.add(e.dst)
                frontier.append(e.dst)
    return frozenset(seen)

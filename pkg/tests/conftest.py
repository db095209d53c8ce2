"""Shared fixtures: the two reference graphs from the test plan."""

from __future__ import annotations

import pytest

from cutloc import Edge, ExecutionGraph


@pytest.fixture
def chain4() -> ExecutionGraph:
    """v0 -control-> v1 -x=1-> v2 -x=2-> v3"""
    return ExecutionGraph(
        {0: "start", 1: "v1", 2: "v2", 3: "v3"},
        [Edge.control(0, 1), Edge.data(1, 2, "x", 1), Edge.data(2, 3, "x", 2)],
    )


@pytest.fixture
def diamond() -> ExecutionGraph:
    """v0 -> a,b (control); a -x=1-> c; b -y=2-> c  (a=1, b=2, c=3)"""
    return ExecutionGraph(
        {0: "start", 1: "a", 2: "b", 3: "c"},
        [
            Edge.control(0, 1),
            Edge.control(0, 2),
            Edge.data(1, 3, "x", 1),
            Edge.data(2, 3, "y", 2),
        ],
    )

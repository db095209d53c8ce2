import random

import pytest

from cutloc import (
    EdgeKey,
    EdgeKind,
    ExecutionGraph,
    build_graph,
    dumps_graph,
    load_graph,
    loads_graph,
    loads_trace,
    mutate_trace,
    root_cut,
    save_graph,
    validate_graph,
)
from cutloc.errors import (
    BadCtrlRefError,
    EmptyComplementError,
    GraphParseError,
    GraphValidationError,
    NoAssignEventError,
    TraceParseError,
    UseBeforeDefError,
)
from cutloc.trace import assign, branch, output

from helpers import random_trace


@pytest.fixture
def small_trace():
    return [
        assign(1, "x", 1),
        assign(2, "y", 2),
        output(3, uses=["x", "y"]),
    ]


class TestBuildGraph:
    def test_three_event_trace(self, small_trace):
        g = build_graph(small_trace)
        keys = {e.key.to_string() for e in g.edges}
        assert keys == {
            "0,1,control",
            "0,2,control",
            "0,3,control",
            "1,3,data,x",
            "2,3,data,y",
        }
        assert validate_graph(g).ok
        labels = {e.key.to_string(): e.label.value for e in g.edges}
        assert labels["1,3,data,x"] == 1
        assert labels["2,3,data,y"] == 2

    def test_empty_trace_is_root_only(self):
        g = build_graph([])
        assert g.vertex_ids == {0}
        assert validate_graph(g).ok
        with pytest.raises(EmptyComplementError):
            root_cut(g)

    def test_use_before_def(self):
        with pytest.raises(UseBeforeDefError) as exc:
            build_graph([output(1, uses=["z"])])
        assert exc.value.var == "z" and exc.value.seq == 1

    def test_allow_undef_routes_from_start(self):
        g = build_graph([output(1, uses=["z"])], allow_undef=True)
        edge = g.edge_by_key[EdgeKey(0, 1, EdgeKind.DATA, "z")]
        assert edge.label.value == "undef"

    def test_control_nesting(self):
        events = [
            assign(1, "x", 0),
            branch(2, True, uses=["x"]),
            assign(3, "y", 1, ctrl=2),
            output(4, uses=["y"]),
        ]
        g = build_graph(events)
        assert EdgeKey(2, 3, EdgeKind.CONTROL) in g.edge_by_key
        assert EdgeKey(0, 4, EdgeKind.CONTROL) in g.edge_by_key

    def test_bad_ctrl_forward_reference(self):
        with pytest.raises(BadCtrlRefError):
            build_graph([assign(1, "x", 0, ctrl=5)])

    def test_ctrl_must_be_branch(self):
        with pytest.raises(BadCtrlRefError):
            build_graph([assign(1, "x", 0), assign(2, "y", 1, ctrl=1)])

    def test_self_read_uses_previous_assignment(self):
        events = [assign(1, "x", 5), assign(2, "x", 6, uses=["x"])]
        g = build_graph(events)
        edge = g.edge_by_key[EdgeKey(1, 2, EdgeKind.DATA, "x")]
        assert edge.label.value == 5

    def test_last_write_matches_brute_force(self):
        rng = random.Random(99)
        for _ in range(40):
            events = random_trace(rng, 5, 30)
            g = build_graph(events)
            by_seq = {e.seq: e for e in events}
            for edge in g.edges:
                if edge.label.kind is not EdgeKind.DATA:
                    continue
                # brute force: scan the prefix for the latest assignment
                expected_src = 0
                for e in events:
                    if e.seq >= edge.dst:
                        break
                    if e.kind == "assign" and e.var == edge.label.var:
                        expected_src = e.seq
                assert edge.src == expected_src
                if expected_src != 0:
                    assert edge.label.value == by_seq[expected_src].value


class TestGraphFiles:
    def test_round_trip(self, small_trace, tmp_path):
        g = build_graph(small_trace)
        path = tmp_path / "g.jsonl"
        save_graph(g, path)
        assert load_graph(path) == g

    def test_missing_header(self):
        with pytest.raises(GraphParseError):
            loads_graph('{"type":"vertex","id":0}\n')

    def test_duplicate_edge_key_is_validation_error(self):
        text = (
            '{"type":"graph","root":0,"deterministic":true}\n'
            '{"type":"vertex","id":0}\n'
            '{"type":"vertex","id":1}\n'
            '{"type":"edge","src":0,"dst":1,"kind":"data","var":"x","value":1}\n'
            '{"type":"edge","src":0,"dst":1,"kind":"data","var":"x","value":2}\n'
        )
        with pytest.raises(GraphValidationError) as exc:
            loads_graph(text)
        assert any(v.kind == "duplicate_key" for v in exc.value.report.violations)

    def test_unknown_fields_ignored(self):
        text = (
            '{"type":"graph","root":0,"deterministic":true,"note":"hi"}\n'
            '{"type":"vertex","id":0,"color":"red"}\n'
            '{"type":"vertex","id":1}\n'
            '{"type":"edge","src":0,"dst":1,"kind":"control","weight":3}\n'
        )
        g = loads_graph(text)
        assert g.vertex_ids == {0, 1}

    def test_vertex_after_edge_rejected(self):
        text = (
            '{"type":"graph","root":0}\n'
            '{"type":"vertex","id":0}\n'
            '{"type":"vertex","id":1}\n'
            '{"type":"edge","src":0,"dst":1,"kind":"control"}\n'
            '{"type":"vertex","id":2}\n'
        )
        with pytest.raises(GraphParseError) as exc:
            loads_graph(text)
        assert exc.value.line_no == 5

    def test_bad_json_reports_line(self):
        with pytest.raises(GraphParseError) as exc:
            loads_graph('{"type":"graph","root":0}\nnot json\n')
        assert exc.value.line_no == 2

    def test_deterministic_flag_round_trips(self, small_trace):
        g = ExecutionGraph({0: ""}, [], deterministic=False)
        assert loads_graph(dumps_graph(g)).deterministic is False


class TestTraceFiles:
    def test_loads_trace(self):
        text = (
            '{"seq":1,"kind":"assign","var":"x","value":1,"ctrl":0}\n'
            '{"seq":3,"kind":"output","uses":["x"],"ctrl":0}\n'
        )
        events = loads_trace(text)
        assert [e.seq for e in events] == [1, 3]
        assert events[0].value == 1

    def test_bad_line_number(self):
        with pytest.raises(TraceParseError) as exc:
            loads_trace('{"seq":1,"kind":"assign","var":"x","value":1}\n{oops\n')
        assert exc.value.line_no == 2


class TestMutateTrace:
    def test_deterministic_by_seed(self, small_trace):
        a, seq_a = mutate_trace(small_trace, 7)
        b, seq_b = mutate_trace(small_trace, 7)
        assert a == b and seq_a == seq_b

    def test_numeric_bump_flows_to_edges(self, small_trace):
        mutated, seq = mutate_trace(small_trace, 0)
        original = {e.seq: e for e in small_trace}[seq]
        changed = {e.seq: e for e in mutated}[seq]
        assert changed.value == original.value + 1
        g = build_graph(mutated)
        out_values = {
            e.label.value
            for e in g.edges
            if e.src == seq and e.label.kind is EdgeKind.DATA
        }
        assert out_values == {changed.value}

    def test_bool_flip_and_string_suffix(self):
        events = [assign(1, "flag", True), assign(2, "name", "run"), output(3, uses=["flag", "name"])]
        flipped, _ = mutate_trace([events[0], output(2, uses=["flag"])], 0)
        assert flipped[0].value is False
        suffixed, _ = mutate_trace([events[1], output(3, uses=["name"])], 0)
        assert suffixed[0].value == "run_X"

    def test_no_assign_events(self):
        with pytest.raises(NoAssignEventError):
            mutate_trace([output(1, uses=[])], 0)

    def test_mutant_keys_identical_to_original(self):
        rng = random.Random(5)
        for i in range(30):
            events = random_trace(rng)
            mutated, seq = mutate_trace(events, i)
            g0 = build_graph(events)
            g1 = build_graph(mutated)
            assert {e.key for e in g0.edges} == {e.key for e in g1.edges}
            differing = {
                e.key
                for e in g1.edges
                if e.label != g0.edge_by_key[e.key].label
            }
            assert differing  # the corpus generator guarantees a visible fault
            assert all(k.src == seq for k in differing)

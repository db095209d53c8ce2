import random

import pytest
from fastapi.testclient import TestClient

from cutloc import (
    EdgeAnomaly,
    EdgeVerdict,
    dumps_graph,
    localize,
)
from cutloc.graph import Edge, ExecutionGraph
from cutloc.oracles import differential_oracle
from cutloc.service import create_app
from cutloc.trace import assign, build_graph, mutate_trace, output

from helpers import random_trace


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture
def chain4_payload(chain4):
    return dumps_graph(chain4)


def make_session(client, graph_text, anomaly, predicates=None):
    body = {"graph": graph_text, "anomaly": anomaly}
    if predicates:
        body["predicates"] = predicates
    response = client.post("/sessions", json=body)
    assert response.status_code == 200, response.text
    return response.json()


class TestCreateSession:
    def test_awaiting_with_pending_cut(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        assert created["status"] == "awaiting_verdict"
        assert created["pending"] == {"downset": [0, 1]}

    def test_single_edge_graph_finishes_immediately(self, client):
        g = ExecutionGraph({0: "start", 1: "only"}, [Edge.control(0, 1)])
        created = make_session(client, dumps_graph(g), "edge:0,1,control")
        assert created["status"] == "finished"
        assert created["result"]["kind"] == "missing_operation"

    def test_malformed_graph_is_400(self, client):
        response = client.post(
            "/sessions", json={"graph": "not a graph", "anomaly": "edge:0,1,control"}
        )
        assert response.status_code == 400

    def test_bad_anomaly_is_400(self, client, chain4_payload):
        response = client.post(
            "/sessions", json={"graph": chain4_payload, "anomaly": "edge:7,8,data,q"}
        )
        assert response.status_code == 400


class TestQuery:
    def test_first_query(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        response = client.get(f"/sessions/{created['id']}/query")
        assert response.status_code == 200
        body = response.json()
        assert body["cut"] == {"downset": [0, 1]}
        assert body["atoms"] == [
            {"edge_key": "1,2,data,x", "label": {"kind": "data", "var": "x", "value": 1}}
        ]
        assert body["progress"]["between_count"] == 2
        assert body["progress"]["step"] == 1

    def test_repeated_query_is_byte_identical(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        first = client.get(f"/sessions/{created['id']}/query")
        second = client.get(f"/sessions/{created['id']}/query")
        assert first.content == second.content

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/query").status_code == 404

    def test_finished_session_409(self, client):
        g = ExecutionGraph({0: "start", 1: "only"}, [Edge.control(0, 1)])
        created = make_session(client, dumps_graph(g), "edge:0,1,control")
        assert client.get(f"/sessions/{created['id']}/query").status_code == 409


class TestAnswer:
    def test_all_ok_advances_lower_bound(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        response = client.post(
            f"/sessions/{created['id']}/answer",
            json={"per_edge": {"1,2,data,x": "ok"}, "global": "ok"},
        )
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "finished"
        assert body["result"] == {
            "kind": "faulty_vertices",
            "vertices": [2],
            "evidence": ["2,3,data,x"],
        }

    def test_data_anomaly_shrinks_upper_bound(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        response = client.post(
            f"/sessions/{created['id']}/answer",
            json={"per_edge": {"1,2,data,x": "data_anomaly"}, "global": "ok"},
        )
        body = response.json()
        assert body["status"] == "finished"
        assert body["result"]["vertices"] == [1]

    def test_missing_atom_is_422(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        response = client.post(
            f"/sessions/{created['id']}/answer", json={"per_edge": {}, "global": "ok"}
        )
        assert response.status_code == 422

    def test_extra_atom_is_422(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        response = client.post(
            f"/sessions/{created['id']}/answer",
            json={
                "per_edge": {"1,2,data,x": "ok", "0,1,control": "ok"},
                "global": "ok",
            },
        )
        assert response.status_code == 422

    def test_finished_session_is_409(self, client):
        g = ExecutionGraph({0: "start", 1: "only"}, [Edge.control(0, 1)])
        created = make_session(client, dumps_graph(g), "edge:0,1,control")
        response = client.post(
            f"/sessions/{created['id']}/answer", json={"per_edge": {}, "global": "ok"}
        )
        assert response.status_code == 409

    def test_bad_global_verdict_is_422(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        response = client.post(
            f"/sessions/{created['id']}/answer",
            json={"per_edge": {"1,2,data,x": "ok"}, "global": "meh"},
        )
        assert response.status_code == 422


class TestResultAndGraph:
    def test_result_while_running_is_409(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        assert client.get(f"/sessions/{created['id']}/result").status_code == 409

    def test_result_with_transcript(self, client, chain4_payload):
        created = make_session(client, chain4_payload, "edge:2,3,data,x")
        client.post(
            f"/sessions/{created['id']}/answer",
            json={"per_edge": {"1,2,data,x": "ok"}, "global": "ok"},
        )
        body = client.get(f"/sessions/{created['id']}/result").json()
        assert body["result"]["kind"] == "faulty_vertices"
        assert body["result"]["vertices"] == [2]
        assert [entry["step"] for entry in body["transcript"]] == [1]

    def test_graph_view(self, client):
        events = [assign(1, "x", 1), assign(2, "y", 2), output(3, uses=["x", "y"])]
        g = build_graph(events)
        created = make_session(client, dumps_graph(g), "edge:2,3,data,y")
        body = client.get(f"/sessions/{created['id']}/graph").json()
        assert len(body["vertices"]) == len(events) + 1
        assert {v["id"]: v["level"] for v in body["vertices"]}[0] == 0
        assert any(e["kind"] == "data" and e["var"] == "x" for e in body["edges"])

    def test_global_anomaly_session_with_predicates(self, client, diamond):
        created = make_session(
            client,
            dumps_graph(diamond),
            "global:0,1,2:p0",
            predicates="p0: x + y = 10\n",
        )
        session_id = created["id"]
        # answer honestly, as an assertion oracle would
        while created.get("status") == "awaiting_verdict":
            query = client.get(f"/sessions/{session_id}/query").json()
            atoms = query["atoms"]
            bindings = {
                a["label"]["var"]: a["label"]["value"]
                for a in atoms
                if a["label"]["kind"] == "data"
            }
            violated = (
                "x" in bindings and "y" in bindings
                and bindings["x"] + bindings["y"] != 10
            )
            answer = {
                "per_edge": {a["edge_key"]: "ok" for a in atoms},
                "global": "violated" if violated else "ok",
            }
            created = client.post(f"/sessions/{session_id}/answer", json=answer).json()
        result = created["result"]
        assert result["kind"] == "missing_critical_sections"
        assert result["vertices"] == [1, 2]


class TestDeterminismAndFuzz:
    def test_replaying_answers_reproduces_result(self, client):
        rng = random.Random(42)
        events = random_trace(rng)
        mutated, _ = mutate_trace(events, 4)
        golden, mutant = build_graph(events), build_graph(mutated)
        changed = sorted(
            e.key for e in mutant.edges if golden.edge_by_key[e.key].label != e.label
        )
        anomaly_spec = f"edge:{changed[0].to_string()}"

        outcome = localize(
            mutant,
            EdgeAnomaly(changed[0], EdgeVerdict.DATA_ANOMALY),
            differential_oracle(golden),
        )
        answers = {
            frozenset(entry.cut.downset): entry.verdict for entry in outcome.transcript
        }

        payload = dumps_graph(mutant)
        results = []
        for _ in range(2):
            created = make_session(client, payload, anomaly_spec)
            sid = created["id"]
            status = created["status"]
            while status == "awaiting_verdict":
                query = client.get(f"/sessions/{sid}/query").json()
                verdict = answers[frozenset(query["cut"]["downset"])]
                body = {
                    "per_edge": {
                        k.to_string(): v.value for k, v in verdict.per_edge.items()
                    },
                    "global": "violated" if verdict.global_verdict.is_violated else "ok",
                }
                reply = client.post(f"/sessions/{sid}/answer", json=body).json()
                status = reply["status"]
            results.append(client.get(f"/sessions/{sid}/result").json())
        assert results[0] == results[1]
        assert results[0]["result"] == outcome.result.to_json()

    def test_random_answers_never_break_the_service(self, client, chain4_payload):
        rng = random.Random(7)
        for trial in range(25):
            created = make_session(client, chain4_payload, "edge:2,3,data,x")
            sid = created["id"]
            status = created["status"]
            steps = 0
            while status == "awaiting_verdict":
                steps += 1
                assert steps <= 6
                query = client.get(f"/sessions/{sid}/query").json()
                per_edge = {}
                for atom in query["atoms"]:
                    if rng.random() < 0.5:
                        per_edge[atom["edge_key"]] = "ok"
                    elif atom["label"]["kind"] == "data":
                        per_edge[atom["edge_key"]] = "data_anomaly"
                    else:
                        per_edge[atom["edge_key"]] = "control_anomaly"
                body = {
                    "per_edge": per_edge,
                    "global": "violated" if rng.random() < 0.2 else "ok",
                }
                reply = client.post(f"/sessions/{sid}/answer", json=body)
                assert reply.status_code == 200
                status = reply.json()["status"]
            assert client.get(f"/sessions/{sid}/result").status_code == 200

"""HTTP service: availability ingestion, need editing, plan propose/accept."""

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

import evacrec as ev
from evacrec.kb import KnowledgeBase, load_snapshot
from evacrec.recommender import ConstraintSet, SolverConfig
from evacrec.roadnet import load_graph
from evacrec.service import create_app

from conftest import FIXTURES


@pytest.fixture
def kb() -> KnowledgeBase:
    return KnowledgeBase(load_snapshot(FIXTURES / "compiegne-flood.json"))


@pytest.fixture
def client(kb) -> TestClient:
    graph = load_graph(FIXTURES / "compiegne-graph.json")
    app = create_app(kb, graph)
    return TestClient(app)


def test_availability_toggle_excludes_resource(client):
    body = {"driver_id": "d-bruno", "vehicle_id": "v-car-1", "available": False}
    r = client.post("/api/availability", json=body)
    assert r.status_code == 200
    assert r.json()["available"] is False

    state = client.get("/api/state").json()
    bruno = next(
        m for m in state["snapshot"]["mobile_resources"] if m["id"] == "mr-bruno-car"
    )
    assert bruno["available"] is False

    plan = client.post("/api/recommendations").json()["plan"]
    assert "mr-bruno-car" not in {a["resource"] for a in plan["assignments"]}


def test_availability_unknown_driver_404(client):
    r = client.post(
        "/api/availability",
        json={"driver_id": "ghost", "vehicle_id": "v-car-1", "available": True,
              "position": [49.41, 2.82]},
    )
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_entity"


def test_availability_malformed_body_400(client):
    r = client.post("/api/availability", json={"driver_id": "d-bruno"})
    assert r.status_code == 400
    assert r.json()["code"] == "malformed_body"


def test_availability_creates_pairing_and_enforces_licence(kb, client):
    kb.upsert_entity("person", {"id": "d-eve", "role": "human_resource", "licenses": ["B"]})
    kb.upsert_entity(
        "vehicle",
        {"id": "v-truck", "category": "truck", "seats": 3, "required_license": "C"},
    )
    r = client.post(
        "/api/availability",
        json={"driver_id": "d-eve", "vehicle_id": "v-truck", "available": True,
              "position": [49.42, 2.83]},
    )
    assert r.status_code == 409  # eve holds a B licence, the truck needs C
    assert r.json()["code"] == "license_mismatch"

    kb.upsert_entity(
        "vehicle",
        {"id": "v-car-3", "category": "car", "seats": 4, "required_license": "B"},
    )
    ok = client.post(
        "/api/availability",
        json={"driver_id": "d-eve", "vehicle_id": "v-car-3", "available": True,
              "position": [49.42, 2.83]},
    )
    assert ok.status_code == 200
    assert ok.json()["capacity"] == 3

    # Pairing the same driver with a second vehicle is rejected.
    dup = client.post(
        "/api/availability",
        json={"driver_id": "d-eve", "vehicle_id": "v-truck", "available": True,
              "position": [49.42, 2.83]},
    )
    assert dup.status_code == 409
    assert dup.json()["code"] == "already_paired"


def test_put_rescue_point_upserts_and_validates(client):
    body = {"evacuees": 12, "wheelchair_evacuees": 1, "priority": 3}
    r = client.put("/api/rescue-points/rp-riverside", json=body)
    assert r.status_code == 200
    assert r.json()["evacuees"] == 12
    again = client.put("/api/rescue-points/rp-riverside", json=body)
    assert again.json() == r.json()

    bad = client.put(
        "/api/rescue-points/rp-riverside",
        json={"evacuees": 2, "wheelchair_evacuees": 5, "priority": 3},
    )
    assert bad.status_code == 400
    assert bad.json()["code"] == "schema_violation"


def test_put_shelter(client):
    r = client.put("/api/shelters/sh-annex", json={"capacity": 9, "position": [49.43, 2.83]})
    assert r.status_code == 200
    assert r.json()["capacity"] == 9
    state = client.get("/api/state").json()
    assert any(s["id"] == "sh-annex" for s in state["snapshot"]["shelters"])


def test_recommendation_matches_library_solve(client):
    record = client.post("/api/recommendations").json()
    assert record["state"] == "proposed"
    plan = record["plan"]
    assert plan["status"] == "full_coverage"
    assert len(plan["assignments"]) == 3
    assert plan["objective"] == {
        "uncovered_weight": 0, "total_time": 520, "vehicles_used": 3,
    }


def test_recommendation_with_no_resources_is_200(client):
    state = client.get("/api/state").json()
    for mr in state["snapshot"]["mobile_resources"]:
        client.post(
            "/api/availability",
            json={"driver_id": mr["driver"], "vehicle_id": mr["vehicle"], "available": False},
        )
    r = client.post("/api/recommendations")
    assert r.status_code == 200
    assert r.json()["plan"]["status"] == "empty"


def test_concurrent_recommendations_get_503(kb, monkeypatch):
    graph = load_graph(FIXTURES / "compiegne-graph.json")
    app = create_app(kb, graph)

    import evacrec.service as service_module

    real_solve = service_module.solve
    release = threading.Event()

    def slow_solve(instance, config=None):
        release.wait(timeout=5)
        return real_solve(instance, config)

    monkeypatch.setattr(service_module, "solve", slow_solve)
    results = {}

    client = TestClient(app)

    def first():
        results["first"] = client.post("/api/recommendations").status_code

    t = threading.Thread(target=first)
    t.start()
    time.sleep(0.3)  # let the first request take the solver lock
    results["second"] = client.post("/api/recommendations").status_code
    release.set()
    t.join()
    assert results["second"] == 503
    assert results["first"] == 200


def test_accept_commits_and_supersedes(client):
    first = client.post("/api/recommendations").json()
    second = client.post("/api/recommendations").json()
    assert first["id"] != second["id"]

    r = client.post(f"/api/plans/{first['id']}/accept")
    assert r.status_code == 200
    assert r.json()["state"] == "accepted"

    state = client.get("/api/state").json()
    committed = {
        m["id"] for m in state["snapshot"]["mobile_resources"] if m["committed"]
    }
    assert committed == {"mr-alice-minibus", "mr-chen-boat", "mr-dana-car"}
    shelters = {s["id"]: s["capacity"] for s in state["snapshot"]["shelters"]}
    assert shelters == {"sh-gym": 5, "sh-hall": 0}
    states = {p["id"]: p["state"] for p in state["plans"]}
    assert states[first["id"]] == "accepted"
    assert states[second["id"]] == "superseded"

    again = client.post(f"/api/plans/{first['id']}/accept")
    assert again.status_code == 409


def test_accept_after_withdrawal_is_stale(client):
    record = client.post("/api/recommendations").json()
    client.post(
        "/api/availability",
        json={"driver_id": "d-chen", "vehicle_id": "v-boat", "available": False},
    )
    r = client.post(f"/api/plans/{record['id']}/accept")
    assert r.status_code == 409
    assert r.json()["code"] == "stale_plan"


def test_second_round_excludes_committed_resources(client):
    first = client.post("/api/recommendations").json()
    client.post(f"/api/plans/{first['id']}/accept")
    second = client.post("/api/recommendations").json()["plan"]
    used = {a["resource"] for a in second["assignments"]}
    assert used == {"mr-bruno-car"}
    assert second["status"] == "partial_coverage"
    # The full town hall forces the remaining trip to the gym.
    assert second["assignments"][0]["shelter"] == "sh-gym"


def test_unknown_plan_404(client):
    assert client.get("/api/plans/plan-9999").status_code == 404
    assert client.post("/api/plans/plan-9999/accept").status_code == 404


def test_state_is_deterministic(client):
    client.post("/api/recommendations")
    a = client.get("/api/state").json()
    b = client.get("/api/state").json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_position_ping_invalidates_cached_matrix(client):
    before = client.post("/api/recommendations").json()["plan"]
    assert before["assignments"][2]["resource"] == "mr-dana-car"
    assert before["assignments"][2]["t_to_rp"] == 0  # parked at the school

    # Dana drives off to the station; travel times must be recomputed.
    client.post(
        "/api/availability",
        json={"driver_id": "d-dana", "vehicle_id": "v-car-2", "available": True,
              "position": [49.4168, 2.8110]},
    )
    after = client.post("/api/recommendations").json()["plan"]
    dana = [a for a in after["assignments"] if a["resource"] == "mr-dana-car"]
    if dana:
        assert dana[0]["t_to_rp"] > 0
    # Either way the fresh plan equals solving the updated store offline.
    graph = load_graph(FIXTURES / "compiegne-graph.json")
    snapshot_json = client.get("/api/state").json()["snapshot"]
    from evacrec.kb import snapshot_from_json_dict

    instance = ev.assemble_instance(
        snapshot_from_json_dict(snapshot_json), graph, ConstraintSet()
    )
    offline = ev.solve(instance, SolverConfig())
    assert ev.plan_to_json_dict(offline) == after

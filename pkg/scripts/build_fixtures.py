#!/usr/bin/env python3
"""Regenerate the bundled demo fixtures (deterministic).

Builds a small riverside-flood scenario: four volunteer driver/vehicle pairs,
two rescue points, two shelters on an 8-node road graph.  Every property the
tests rely on is asserted here against the exhaustive-enumeration oracle
before anything is written:

  * the optimal plan fully covers demand with exactly 3 assignments,
  * the optimal assignment triple set is unique,
  * after accepting it, the follow-up plan uses the one remaining pair and is
    steered away from the now-full town-hall shelter.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import evacrec as ev
from evacrec.kb import snapshot_from_json_dict
from evacrec.roadnet import graph_from_json_dict

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

GRAPH = {
    "nodes": {
        "n-station": [49.4168, 2.8110],
        "n-center": [49.4179, 2.8261],
        "n-bridge": [49.4200, 2.8271],
        "n-riverside": [49.4228, 2.8302],
        "n-market": [49.4152, 2.8334],
        "n-school": [49.4105, 2.8223],
        "n-gym": [49.4235, 2.8398],
        "n-hall": [49.4262, 2.8254],
    },
    # Two-way streets, 36 km/h everywhere: seconds = length / 10.
    "edges": [
        edge
        for a, b, length in [
            ("n-station", "n-center", 1200),
            ("n-center", "n-bridge", 500),
            ("n-bridge", "n-riverside", 600),
            ("n-center", "n-market", 700),
            ("n-market", "n-riverside", 900),
            ("n-center", "n-school", 800),
            ("n-school", "n-market", 600),
            ("n-school", "n-hall", 700),
            ("n-riverside", "n-gym", 800),
            ("n-market", "n-gym", 1000),
            ("n-riverside", "n-hall", 500),
        ]
        for edge in (
            {"from": a, "to": b, "length_m": length, "speed_kmh": 36},
            {"from": b, "to": a, "length_m": length, "speed_kmh": 36},
        )
    ],
}

SNAPSHOT = {
    "schema_version": 1,
    "crisis": {"id": "crisis-riverside-flood", "kind": "flood"},
    "persons": [
        {"id": "d-alice", "name": "Alice", "role": "human_resource", "licenses": ["B", "D1"]},
        {"id": "d-bruno", "name": "Bruno", "role": "human_resource", "licenses": ["B"]},
        {"id": "d-chen", "name": "Chen", "role": "human_resource", "licenses": ["boat"]},
        {"id": "d-dana", "name": "Dana", "role": "human_resource", "licenses": ["B"]},
        {"id": "p-emile", "name": "Emile", "role": "affected", "mobility": "wheelchair"},
        {"id": "p-fatou", "name": "Fatou", "role": "affected"},
    ],
    "vehicles": [
        {"id": "v-minibus", "category": "minibus", "seats": 9, "wheelchair_slots": 1,
         "required_license": "D1", "terrain": "land"},
        {"id": "v-car-1", "category": "car", "seats": 5, "wheelchair_slots": 0,
         "required_license": "B", "terrain": "land"},
        {"id": "v-boat", "category": "boat", "seats": 6, "wheelchair_slots": 0,
         "required_license": "boat", "terrain": "water"},
        {"id": "v-car-2", "category": "car", "seats": 5, "wheelchair_slots": 1,
         "required_license": "B", "terrain": "land"},
    ],
    "mobile_resources": [
        {"id": "mr-alice-minibus", "driver": "d-alice", "vehicle": "v-minibus",
         "position": [49.4168, 2.8110], "available": True, "committed": False},
        {"id": "mr-bruno-car", "driver": "d-bruno", "vehicle": "v-car-1",
         "position": [49.4152, 2.8334], "available": True, "committed": False},
        {"id": "mr-chen-boat", "driver": "d-chen", "vehicle": "v-boat",
         "position": [49.4200, 2.8271], "available": True, "committed": False},
        {"id": "mr-dana-car", "driver": "d-dana", "vehicle": "v-car-2",
         "position": [49.4105, 2.8223], "available": True, "committed": False},
    ],
    "rescue_points": [
        {"id": "rp-riverside", "position": [49.4228, 2.8302],
         "evacuees": 12, "wheelchair_evacuees": 1, "priority": 5},
        {"id": "rp-school", "position": [49.4105, 2.8223],
         "evacuees": 4, "wheelchair_evacuees": 0, "priority": 3},
    ],
    "shelters": [
        {"id": "sh-gym", "position": [49.4235, 2.8398], "capacity": 17},
        {"id": "sh-hall", "position": [49.4262, 2.8254], "capacity": 4},
    ],
}

SCENARIO = {
    "snapshot_path": "compiegne-flood.json",
    "graph_path": "compiegne-graph.json",
    "solver": {"exact_bound": 12, "makespan": False},
}


def verify() -> None:
    snapshot = snapshot_from_json_dict(SNAPSHOT)
    graph = graph_from_json_dict(GRAPH)
    constraints = ev.ConstraintSet()
    instance = ev.assemble_instance(snapshot, graph, constraints)

    plan = ev.solve(instance)
    assert plan.status is ev.PlanStatus.FULL_COVERAGE, plan
    assert len(plan.assignments) == 3, plan.assignments
    assert ev.check_feasible(instance, plan).ok

    plans = ev.enumerate_all(instance)
    best = min(obj for _, obj in plans)
    assert best == plan.objective, (best, plan.objective)
    optimal_keys = {p.triple_key() for p, obj in plans if obj == best}
    assert optimal_keys == {plan.triple_key()}, optimal_keys

    # Wheelchair evacuee rides the minibus (the only slotted vehicle on site).
    by_res = {a.resource: a for a in plan.assignments}
    assert by_res["mr-alice-minibus"].wheelchair_loaded == 1

    # Round two: accept the plan, then re-solve with the remaining pair.
    committed = {a.resource for a in plan.assignments}
    assert committed == {"mr-alice-minibus", "mr-chen-boat", "mr-dana-car"}
    snap2 = snapshot.copy()
    for rid in committed:
        snap2.mobile_resources[rid] = replace(snap2.mobile_resources[rid], committed=True)
    intake: dict[str, int] = {}
    for a in plan.assignments:
        intake[a.shelter] = intake.get(a.shelter, 0) + a.evacuees_loaded
    assert intake == {"sh-gym": 12, "sh-hall": 4}, intake
    for sid, amount in intake.items():
        sh = snap2.shelters[sid]
        snap2.shelters[sid] = replace(sh, capacity=sh.capacity - amount)

    instance2 = ev.assemble_instance(snap2, graph, constraints)
    plan2 = ev.solve(instance2)
    assert plan2.status is ev.PlanStatus.PARTIAL_COVERAGE
    assert [a.resource for a in plan2.assignments] == ["mr-bruno-car"]
    assert plan2.assignments[0].shelter == "sh-gym", plan2.assignments

    # The full town hall is what steers round two to the gym: with its
    # capacity restored, the same trip would end at the hall instead.
    snap3 = snap2.copy()
    snap3.shelters["sh-hall"] = replace(snap3.shelters["sh-hall"], capacity=4)
    plan3 = ev.solve(ev.assemble_instance(snap3, graph, constraints))
    assert plan3.assignments[0].shelter == "sh-hall", plan3.assignments

    print("round 1:", plan.objective, [(a.resource, a.rescue_point, a.shelter,
                                        a.evacuees_loaded) for a in plan.assignments])
    print("round 2:", plan2.objective, [(a.resource, a.rescue_point, a.shelter,
                                         a.evacuees_loaded) for a in plan2.assignments])


def write() -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "compiegne-graph.json").write_text(
        json.dumps(GRAPH, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURES / "compiegne-flood.json").write_text(
        json.dumps(SNAPSHOT, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (FIXTURES / "compiegne-scenario.json").write_text(
        json.dumps(SCENARIO, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    verify()
    write()

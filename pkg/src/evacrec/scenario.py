"""Scenario files tie one knowledge snapshot to a road graph and solver
configuration, and provide the glue that turns them into a solvable instance.

Scenario JSON layout::

    {
      "snapshot": { ... }            # or "snapshot_path": "snapshot.json"
      "graph": { ... }               # or "graph_path": "graph.json"
      "solver": {"exact_bound": 12, "makespan": false,
                 "enforce_wheelchair": true, "enforce_shelter_capacity": true,
                 "enforce_terrain": true}
    }

Relative paths resolve against the scenario file's directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from .errors import SchemaViolation
from .kb import ALL_TERRAINS, KnowledgeSnapshot, snapshot_from_json_dict
from .recommender import (
    ConstraintSet,
    ProblemInstance,
    RecommendationPlan,
    SolverConfig,
    make_instance,
    plan_to_json_dict,
)
from .roadnet import (
    RoadGraph,
    TravelTimeMatrix,
    build_matrix,
    graph_from_json_dict,
    matrix_from_json_dict,
)


@dataclass(frozen=True)
class Scenario:
    snapshot: KnowledgeSnapshot
    graph: RoadGraph
    constraints: ConstraintSet
    config: SolverConfig


def _solver_settings(raw: Mapping[str, Any] | None) -> tuple[ConstraintSet, SolverConfig]:
    raw = dict(raw or {})
    known = {
        "exact_bound",
        "makespan",
        "enforce_wheelchair",
        "enforce_shelter_capacity",
        "enforce_terrain",
    }
    unknown = set(raw) - known
    if unknown:
        raise SchemaViolation(f"solver config has unknown keys: {sorted(unknown)}")
    constraints = ConstraintSet(
        enforce_wheelchair=bool(raw.get("enforce_wheelchair", True)),
        enforce_shelter_capacity=bool(raw.get("enforce_shelter_capacity", True)),
        enforce_terrain=bool(raw.get("enforce_terrain", True)),
    )
    config = SolverConfig(
        exact_bound=int(raw.get("exact_bound", SolverConfig().exact_bound)),
        makespan=bool(raw.get("makespan", False)),
    )
    return constraints, config


def scenario_from_dict(data: Mapping[str, Any], base_dir: Path | None = None) -> Scenario:
    if not isinstance(data, Mapping):
        raise SchemaViolation("scenario must be a JSON object")
    unknown = set(data) - {"snapshot", "snapshot_path", "graph", "graph_path", "solver"}
    if unknown:
        raise SchemaViolation(f"scenario has unknown keys: {sorted(unknown)}")

    def resolve(path_value: str) -> Path:
        path = Path(path_value)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        return path

    if "snapshot" in data:
        snapshot = snapshot_from_json_dict(data["snapshot"])
    elif "snapshot_path" in data:
        raw = json.loads(resolve(data["snapshot_path"]).read_text(encoding="utf-8"))
        snapshot = snapshot_from_json_dict(raw)
    else:
        raise SchemaViolation("scenario needs 'snapshot' or 'snapshot_path'")

    if "graph" in data:
        graph = graph_from_json_dict(data["graph"])
    elif "graph_path" in data:
        raw = json.loads(resolve(data["graph_path"]).read_text(encoding="utf-8"))
        graph = graph_from_json_dict(raw)
    else:
        raise SchemaViolation("scenario needs 'graph' or 'graph_path'")

    constraints, config = _solver_settings(data.get("solver"))
    return Scenario(snapshot=snapshot, graph=graph, constraints=constraints, config=config)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8"))
    return scenario_from_dict(data, base_dir=path.parent)


# ---------------------------------------------------------------------------
# Instance assembly
# ---------------------------------------------------------------------------


def build_matrices(
    snapshot: KnowledgeSnapshot, graph: RoadGraph
) -> tuple[TravelTimeMatrix, TravelTimeMatrix]:
    """Precompute both travel-time matrices for the allocatable resources."""
    resources = [
        mr for _, mr in sorted(snapshot.mobile_resources.items())
        if mr.available and not mr.committed
    ]
    rps = [rp for _, rp in sorted(snapshot.rescue_points.items())]
    shelters = [sh for _, sh in sorted(snapshot.shelters.items())]
    to_rp = build_matrix(
        graph,
        [(mr.id, mr.position) for mr in resources],
        [(rp.id, rp.position) for rp in rps],
    )
    rp_to_shelter = build_matrix(
        graph,
        [(rp.id, rp.position) for rp in rps],
        [(sh.id, sh.position) for sh in shelters],
    )
    return to_rp, rp_to_shelter


def assemble_instance(
    snapshot: KnowledgeSnapshot,
    graph: RoadGraph,
    constraints: ConstraintSet,
    matrices: tuple[TravelTimeMatrix, TravelTimeMatrix] | None = None,
) -> ProblemInstance:
    """Freeze the allocatable slice of a snapshot into a problem instance.

    The crisis-kind terrain default is baked into each rescue point that does
    not declare its own requirement, so the instance is self-contained.
    """
    resources = [
        mr for _, mr in sorted(snapshot.mobile_resources.items())
        if mr.available and not mr.committed
    ]
    crisis_terrains = snapshot.crisis.allowed_terrains() if snapshot.crisis else ALL_TERRAINS
    rps = []
    for _, rp in sorted(snapshot.rescue_points.items()):
        if rp.required_terrains is None:
            rp = replace(rp, required_terrains=crisis_terrains)
        rps.append(rp)
    shelters = [sh for _, sh in sorted(snapshot.shelters.items())]
    if matrices is None:
        matrices = build_matrices(snapshot, graph)
    return make_instance(resources, rps, shelters, constraints, matrices[0], matrices[1])


def scenario_instance(scenario: Scenario) -> ProblemInstance:
    return assemble_instance(scenario.snapshot, scenario.graph, scenario.constraints)


# ---------------------------------------------------------------------------
# Fingerprints and canonical serialization
# ---------------------------------------------------------------------------


def _sha(payload: Any) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    ).hexdigest()


def placement_fingerprint(snapshot: KnowledgeSnapshot, graph: RoadGraph) -> str:
    """Hash of everything the travel-time matrices depend on: the graph plus
    the identity and position of every allocatable resource, rescue point and
    shelter.  Any position change or availability flip invalidates cached
    matrices."""
    payload = {
        "graph": graph.fingerprint,
        "resources": [
            [mr.id, mr.position.to_json()]
            for _, mr in sorted(snapshot.mobile_resources.items())
            if mr.available and not mr.committed
        ],
        "rescue_points": [
            [rp.id, rp.position.to_json()] for _, rp in sorted(snapshot.rescue_points.items())
        ],
        "shelters": [
            [sh.id, sh.position.to_json()] for _, sh in sorted(snapshot.shelters.items())
        ],
    }
    return _sha(payload)


def instance_fingerprint(
    snapshot: KnowledgeSnapshot,
    graph: RoadGraph,
    constraints: ConstraintSet,
    config: SolverConfig,
) -> str:
    """Hash of every solver input; two equal fingerprints imply the same plan."""
    payload = {
        "placement": placement_fingerprint(snapshot, graph),
        "resources": [
            [mr.id, mr.capacity, mr.vehicle.wheelchair_slots, mr.vehicle.terrain.value]
            for _, mr in sorted(snapshot.mobile_resources.items())
            if mr.available and not mr.committed
        ],
        "rescue_points": [
            [
                rp.id,
                rp.evacuees,
                rp.wheelchair_evacuees,
                rp.priority,
                sorted(t.value for t in rp.required_terrains) if rp.required_terrains else None,
            ]
            for _, rp in sorted(snapshot.rescue_points.items())
        ],
        "shelters": [[sh.id, sh.capacity] for _, sh in sorted(snapshot.shelters.items())],
        "crisis": snapshot.crisis.kind if snapshot.crisis else None,
        "crisis_terrains": (
            sorted(t.value for t in snapshot.crisis.compatible_terrains)
            if snapshot.crisis and snapshot.crisis.compatible_terrains
            else None
        ),
        "constraints": [
            constraints.enforce_wheelchair,
            constraints.enforce_shelter_capacity,
            constraints.enforce_terrain,
        ],
        "config": [config.exact_bound, config.makespan],
    }
    return _sha(payload)


def plan_to_json(plan: RecommendationPlan) -> str:
    return json.dumps(plan_to_json_dict(plan), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Matrix files
# ---------------------------------------------------------------------------


def matrix_file_dict(scenario: Scenario) -> dict:
    to_rp, rp_to_shelter = build_matrices(scenario.snapshot, scenario.graph)
    return {
        "placement_fingerprint": placement_fingerprint(scenario.snapshot, scenario.graph),
        "times_to_rp": to_rp.to_json_dict(),
        "times_rp_to_shelter": rp_to_shelter.to_json_dict(),
    }


def save_matrix_file(scenario: Scenario, path: str | Path) -> None:
    text = json.dumps(matrix_file_dict(scenario), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_matrix_file(path: str | Path) -> tuple[str, TravelTimeMatrix, TravelTimeMatrix]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, Mapping) or "placement_fingerprint" not in data:
        raise SchemaViolation("matrix file misses 'placement_fingerprint'")
    return (
        data["placement_fingerprint"],
        matrix_from_json_dict(data["times_to_rp"]),
        matrix_from_json_dict(data["times_rp_to_shelter"]),
    )

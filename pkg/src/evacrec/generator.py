"""Deterministic generators: synthetic grid road graphs and seeded random
scenarios for oracle batches and property tests.

The scenario generator is pinned (6x6 grid, 1-6 resources, 1-4 rescue points,
1-3 shelters, demands 1-10, priorities 1-5) so that a seed fully determines
the instance, on any platform.
"""

from __future__ import annotations

import math
import random
from typing import Any

GRID_ORIGIN = (49.40, 2.80)
GRID_SPACING_M = 250.0
EDGE_SPEEDS_KMH = (20.0, 30.0, 40.0, 50.0)

VEHICLE_ARCHETYPES = (
    # (category, seats, wheelchair_slots, required_license, terrain)
    ("car", 5, 0, "B", "land"),
    ("car", 5, 1, "B", "land"),
    ("minibus", 9, 1, "D1", "land"),
    ("van", 7, 2, "B", "land"),
    ("boat", 6, 0, "boat", "water"),
)

CRISIS_KINDS = ("flood", "fire", "other")


def grid_graph_dict(
    n: int,
    *,
    origin: tuple[float, float] = GRID_ORIGIN,
    spacing_m: float = GRID_SPACING_M,
    speed_kmh: float = 30.0,
    rng: random.Random | None = None,
) -> dict[str, Any]:
    """An n x n grid in road-graph JSON form.

    Every neighbouring pair is connected by two directed edges, giving
    ``4 * n * (n - 1)`` edges.  With ``rng`` set, edge lengths and speeds are
    drawn per edge (deterministically for a given generator state); otherwise
    all edges share ``spacing_m`` and ``speed_kmh``.
    """
    lat0, lon0 = origin
    dlat = spacing_m / 111_320.0
    dlon = spacing_m / (111_320.0 * math.cos(math.radians(lat0)))
    nodes = {
        f"n{i}-{j}": [round(lat0 + i * dlat, 7), round(lon0 + j * dlon, 7)]
        for i in range(n)
        for j in range(n)
    }
    edges = []

    def link(a: str, b: str) -> None:
        if rng is not None:
            length = float(rng.randint(int(spacing_m * 0.5), int(spacing_m * 1.5)))
            speed = rng.choice(EDGE_SPEEDS_KMH)
        else:
            length = spacing_m
            speed = speed_kmh
        edges.append({"from": a, "to": b, "length_m": length, "speed_kmh": speed})
        edges.append({"from": b, "to": a, "length_m": length, "speed_kmh": speed})

    for i in range(n):
        for j in range(n):
            if j + 1 < n:
                link(f"n{i}-{j}", f"n{i}-{j + 1}")
            if i + 1 < n:
                link(f"n{i}-{j}", f"n{i + 1}-{j}")
    return {"nodes": nodes, "edges": edges}


def random_scenario_dict(seed: int) -> dict[str, Any]:
    """One seeded random scenario (snapshot + inline graph + solver config)."""
    rng = random.Random(seed)
    graph = grid_graph_dict(6, rng=rng)
    node_ids = sorted(graph["nodes"])

    def node_coord() -> list[float]:
        return list(graph["nodes"][rng.choice(node_ids)])

    n_res = rng.randint(1, 6)
    n_rp = rng.randint(1, 4)
    n_sh = rng.randint(1, 3)
    kind = rng.choice(CRISIS_KINDS)

    persons = []
    vehicles = []
    resources = []
    for i in range(n_res):
        category, seats, slots, licence, terrain = rng.choice(VEHICLE_ARCHETYPES)
        persons.append(
            {
                "id": f"d{i}",
                "name": f"driver {i}",
                "role": "human_resource",
                "licenses": [licence],
            }
        )
        vehicles.append(
            {
                "id": f"v{i}",
                "category": category,
                "seats": seats,
                "wheelchair_slots": slots,
                "required_license": licence,
                "terrain": terrain,
            }
        )
        resources.append(
            {
                "id": f"mr{i}",
                "driver": f"d{i}",
                "vehicle": f"v{i}",
                "position": node_coord(),
                "available": True,
                "committed": False,
            }
        )

    rescue_points = []
    for i in range(n_rp):
        evacuees = rng.randint(1, 10)
        rp = {
            "id": f"rp{i}",
            "position": node_coord(),
            "evacuees": evacuees,
            "wheelchair_evacuees": rng.randint(0, min(2, evacuees)),
            "priority": rng.randint(1, 5),
        }
        if rng.random() < 0.15:
            rp["required_terrains"] = ["water"]
        rescue_points.append(rp)

    shelters = [
        {"id": f"sh{i}", "position": node_coord(), "capacity": rng.randint(3, 15)}
        for i in range(n_sh)
    ]

    return {
        "snapshot": {
            "schema_version": 1,
            "crisis": {"id": f"crisis-{seed}", "kind": kind},
            "persons": persons,
            "vehicles": vehicles,
            "mobile_resources": resources,
            "rescue_points": rescue_points,
            "shelters": shelters,
        },
        "graph": graph,
        "solver": {"exact_bound": 12, "makespan": False},
    }


def batch_seeds(master_seed: int, count: int) -> list[int]:
    """Stable per-instance seeds for a batch keyed by one master seed."""
    return [master_seed * 100_003 + i for i in range(count)]

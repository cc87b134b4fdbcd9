"""Shared builders for hand-constructed solver instances and store entities."""

from __future__ import annotations

from pathlib import Path

import pytest

from evacrec.kb import (
    MobileResource,
    Person,
    Place,
    PlaceKind,
    Position,
    RescuePoint,
    Role,
    Shelter,
    Terrain,
    Vehicle,
)
from evacrec.recommender import ConstraintSet, make_instance
from evacrec.roadnet import TravelTimeMatrix

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def make_resource(
    rid: str,
    seats: int,
    slots: int = 0,
    terrain: Terrain = Terrain.LAND,
    coord: tuple[float, float] = (49.0, 2.0),
) -> MobileResource:
    driver = Person(
        id=f"{rid}.driver", role=Role.HUMAN_RESOURCE, licenses=frozenset({"B"})
    )
    vehicle = Vehicle(
        id=f"{rid}.vehicle",
        category="car",
        seats=seats,
        wheelchair_slots=slots,
        required_license="B",
        terrain=terrain,
    )
    return MobileResource(id=rid, driver=driver, vehicle=vehicle, position=Position(coord=coord))


def make_rp(
    pid: str,
    evacuees: int,
    wheelchair: int = 0,
    priority: int = 3,
    coord: tuple[float, float] = (49.0, 2.0),
    terrains: frozenset[Terrain] | None = None,
) -> RescuePoint:
    place = Place(id=pid, kind=PlaceKind.RESCUE_POINT, position=Position(coord=coord))
    return RescuePoint(
        place=place,
        evacuees=evacuees,
        wheelchair_evacuees=wheelchair,
        priority=priority,
        required_terrains=terrains,
    )


def make_shelter(sid: str, capacity: int, coord: tuple[float, float] = (49.0, 2.0)) -> Shelter:
    place = Place(id=sid, kind=PlaceKind.SHELTER, position=Position(coord=coord))
    return Shelter(place=place, capacity=capacity)


def matrix(origins, destinations, rows) -> TravelTimeMatrix:
    return TravelTimeMatrix(
        origins=tuple(origins),
        destinations=tuple(destinations),
        seconds=tuple(tuple(row) for row in rows),
    )


def instance_from(resources, rps, shelters, t1_rows, t2_rows, constraints=None):
    """Build an instance from explicit travel-time rows (resource x rp and
    rp x shelter, in the given list orders)."""
    t1 = matrix([r.id for r in resources], [p.id for p in rps], t1_rows)
    t2 = matrix([p.id for p in rps], [s.id for s in shelters], t2_rows)
    return make_instance(resources, rps, shelters, constraints or ConstraintSet(), t1, t2)

"""Typed store for crisis entities: people, vehicles, driver/vehicle pairings,
rescue points, shelters and the crisis description.

The store is the single source of truth for the allocation pipeline. Writes
are serialized behind one lock; readers always work on frozen snapshot
copies, so a running solver never observes a half-applied mutation.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

from .errors import (
    AlreadyPaired,
    DuplicateId,
    LicenseMismatch,
    SchemaViolation,
    StalePlan,
    UnknownEntity,
)

SCHEMA_VERSION = 1

Coord = tuple[float, float]


class Role(str, Enum):
    AFFECTED = "affected"
    HUMAN_RESOURCE = "human_resource"


class Mobility(str, Enum):
    AMBULANT = "ambulant"
    WHEELCHAIR = "wheelchair"


class Terrain(str, Enum):
    LAND = "land"
    WATER = "water"
    AIR = "air"


ALL_TERRAINS = frozenset(Terrain)

# Default vehicle-terrain compatibility per crisis kind; a rescue point may
# override this with its own requirement.
CRISIS_TERRAINS: dict[str, frozenset[Terrain]] = {
    "flood": frozenset({Terrain.LAND, Terrain.WATER}),
    "fire": frozenset({Terrain.LAND}),
}


class PlaceKind(str, Enum):
    RESCUE_POINT = "rescue_point"
    SHELTER = "shelter"
    DEPOT = "depot"


@dataclass(frozen=True)
class Position:
    """A location given either as a (lat, lon) pair or pinned to a road node.

    Exactly one of ``coord`` and ``node`` is set.  JSON forms accepted:
    ``[lat, lon]``, ``{"node": "<node-id>"}``, or the id of a rescue point or
    shelter already present in the snapshot (resolved at load time).
    """

    coord: Coord | None = None
    node: str | None = None

    def __post_init__(self):
        if (self.coord is None) == (self.node is None):
            raise SchemaViolation("position needs exactly one of coord or node")
        if self.coord is not None:
            lat, lon = self.coord
            if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
                raise SchemaViolation(f"coordinate out of range: {self.coord!r}")

    def to_json(self) -> Any:
        if self.node is not None:
            return {"node": self.node}
        return [self.coord[0], self.coord[1]]


def position_from_json(value: Any) -> Position:
    if isinstance(value, (list, tuple)):
        if len(value) != 2 or not all(isinstance(x, (int, float)) for x in value):
            raise SchemaViolation(f"coordinate must be [lat, lon]: {value!r}")
        return Position(coord=(float(value[0]), float(value[1])))
    if isinstance(value, Mapping) and "node" in value:
        node = value["node"]
        if not isinstance(node, str) or not node:
            raise SchemaViolation(f"node reference must be a non-empty string: {value!r}")
        return Position(node=node)
    raise SchemaViolation(f"cannot parse position: {value!r}")


@dataclass(frozen=True)
class Person:
    id: str
    name: str = ""
    role: Role = Role.AFFECTED
    mobility: Mobility = Mobility.AMBULANT
    licenses: frozenset[str] = frozenset()

    def __post_init__(self):
        _require_id(self.id, "person")


@dataclass(frozen=True)
class Vehicle:
    id: str
    category: str
    seats: int
    wheelchair_slots: int = 0
    required_license: str = ""
    terrain: Terrain = Terrain.LAND

    def __post_init__(self):
        _require_id(self.id, "vehicle")
        if not self.category:
            raise SchemaViolation(f"vehicle {self.id}: category must be non-empty")
        if self.seats < 1:
            raise SchemaViolation(f"vehicle {self.id}: seats must be >= 1, got {self.seats}")
        if not 0 <= self.wheelchair_slots <= self.seats - 1:
            raise SchemaViolation(
                f"vehicle {self.id}: wheelchair_slots must be in [0, seats-1], "
                f"got {self.wheelchair_slots} with {self.seats} seats"
            )


@dataclass(frozen=True)
class Place:
    id: str
    kind: PlaceKind
    position: Position

    def __post_init__(self):
        _require_id(self.id, "place")


@dataclass(frozen=True)
class RescuePoint:
    """A pickup site with its demand counts and urgency level."""

    place: Place
    evacuees: int
    wheelchair_evacuees: int = 0
    priority: int = 3
    required_terrains: frozenset[Terrain] | None = None

    def __post_init__(self):
        if self.place.kind is not PlaceKind.RESCUE_POINT:
            raise SchemaViolation(f"rescue point {self.place.id}: place kind must be rescue_point")
        if self.evacuees < 0:
            raise SchemaViolation(f"rescue point {self.id}: evacuees must be >= 0")
        if not 0 <= self.wheelchair_evacuees <= self.evacuees:
            raise SchemaViolation(
                f"rescue point {self.id}: wheelchair_evacuees must be in [0, evacuees], "
                f"got {self.wheelchair_evacuees} of {self.evacuees}"
            )
        if not 1 <= self.priority <= 5:
            raise SchemaViolation(f"rescue point {self.id}: priority must be in [1, 5]")

    @property
    def id(self) -> str:
        return self.place.id

    @property
    def position(self) -> Position:
        return self.place.position


@dataclass(frozen=True)
class Shelter:
    """A destination site with remaining intake capacity."""

    place: Place
    capacity: int

    def __post_init__(self):
        if self.place.kind is not PlaceKind.SHELTER:
            raise SchemaViolation(f"shelter {self.place.id}: place kind must be shelter")
        if self.capacity < 0:
            raise SchemaViolation(f"shelter {self.id}: capacity must be >= 0")

    @property
    def id(self) -> str:
        return self.place.id

    @property
    def position(self) -> Position:
        return self.place.position


@dataclass(frozen=True)
class MobileResource:
    """The unit the recommender allocates: one volunteer driver + one vehicle.

    The driver occupies a seat, so the usable passenger capacity is
    ``vehicle.seats - 1``.
    """

    id: str
    driver: Person
    vehicle: Vehicle
    position: Position
    available: bool = True
    committed: bool = False
    updated_at: str | None = None

    def __post_init__(self):
        _require_id(self.id, "mobile resource")
        if self.driver.role is not Role.HUMAN_RESOURCE:
            raise SchemaViolation(
                f"mobile resource {self.id}: driver {self.driver.id} is not a human resource"
            )
        if self.vehicle.required_license and self.vehicle.required_license not in self.driver.licenses:
            raise LicenseMismatch(
                f"driver {self.driver.id} lacks licence {self.vehicle.required_license!r} "
                f"required by vehicle {self.vehicle.id}",
                driver=self.driver.id,
                vehicle=self.vehicle.id,
            )

    @property
    def capacity(self) -> int:
        return self.vehicle.seats - 1


@dataclass(frozen=True)
class Crisis:
    id: str
    kind: str = "other"
    compatible_terrains: frozenset[Terrain] | None = None

    def __post_init__(self):
        _require_id(self.id, "crisis")

    def allowed_terrains(self) -> frozenset[Terrain]:
        if self.compatible_terrains is not None:
            return self.compatible_terrains
        return CRISIS_TERRAINS.get(self.kind, ALL_TERRAINS)


def _require_id(value: str, label: str) -> None:
    if not isinstance(value, str) or not value:
        raise SchemaViolation(f"{label} id must be a non-empty string, got {value!r}")


@dataclass
class KnowledgeSnapshot:
    """A referentially closed, immutable view of every stored entity."""

    schema_version: int = SCHEMA_VERSION
    crisis: Crisis | None = None
    persons: dict[str, Person] = field(default_factory=dict)
    vehicles: dict[str, Vehicle] = field(default_factory=dict)
    mobile_resources: dict[str, MobileResource] = field(default_factory=dict)
    rescue_points: dict[str, RescuePoint] = field(default_factory=dict)
    shelters: dict[str, Shelter] = field(default_factory=dict)

    def copy(self) -> "KnowledgeSnapshot":
        return KnowledgeSnapshot(
            schema_version=self.schema_version,
            crisis=self.crisis,
            persons=dict(self.persons),
            vehicles=dict(self.vehicles),
            mobile_resources=dict(self.mobile_resources),
            rescue_points=dict(self.rescue_points),
            shelters=dict(self.shelters),
        )

    def validate(self) -> None:
        """Check referential closure and pairing uniqueness."""
        if self.schema_version > SCHEMA_VERSION:
            raise SchemaViolation(
                f"snapshot schema_version {self.schema_version} is newer than "
                f"supported version {SCHEMA_VERSION}"
            )
        paired_drivers: dict[str, str] = {}
        paired_vehicles: dict[str, str] = {}
        for mr in self.mobile_resources.values():
            if mr.driver.id not in self.persons:
                raise SchemaViolation(f"mobile resource {mr.id} references unknown person {mr.driver.id}")
            if mr.vehicle.id not in self.vehicles:
                raise SchemaViolation(f"mobile resource {mr.id} references unknown vehicle {mr.vehicle.id}")
            if self.persons[mr.driver.id] != mr.driver or self.vehicles[mr.vehicle.id] != mr.vehicle:
                raise SchemaViolation(f"mobile resource {mr.id} embeds stale person/vehicle data")
            prev = paired_drivers.setdefault(mr.driver.id, mr.id)
            if prev != mr.id:
                raise AlreadyPaired(f"driver {mr.driver.id} paired in both {prev} and {mr.id}")
            prev = paired_vehicles.setdefault(mr.vehicle.id, mr.id)
            if prev != mr.id:
                raise AlreadyPaired(f"vehicle {mr.vehicle.id} paired in both {prev} and {mr.id}")

    # -- JSON codec ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "crisis": _crisis_to_json(self.crisis) if self.crisis else None,
            "persons": [_person_to_json(p) for _, p in sorted(self.persons.items())],
            "vehicles": [_vehicle_to_json(v) for _, v in sorted(self.vehicles.items())],
            "mobile_resources": [
                _resource_to_json(r) for _, r in sorted(self.mobile_resources.items())
            ],
            "rescue_points": [
                _rescue_point_to_json(rp) for _, rp in sorted(self.rescue_points.items())
            ],
            "shelters": [_shelter_to_json(s) for _, s in sorted(self.shelters.items())],
        }


# -- per-entity JSON helpers -------------------------------------------------


def _person_to_json(p: Person) -> dict:
    return {
        "id": p.id,
        "name": p.name,
        "role": p.role.value,
        "mobility": p.mobility.value,
        "licenses": sorted(p.licenses),
    }


def _vehicle_to_json(v: Vehicle) -> dict:
    return {
        "id": v.id,
        "category": v.category,
        "seats": v.seats,
        "wheelchair_slots": v.wheelchair_slots,
        "required_license": v.required_license,
        "terrain": v.terrain.value,
    }


def _resource_to_json(r: MobileResource) -> dict:
    out = {
        "id": r.id,
        "driver": r.driver.id,
        "vehicle": r.vehicle.id,
        "position": r.position.to_json(),
        "available": r.available,
        "committed": r.committed,
    }
    if r.updated_at is not None:
        out["updated_at"] = r.updated_at
    return out


def _rescue_point_to_json(rp: RescuePoint) -> dict:
    out = {
        "id": rp.id,
        "position": rp.position.to_json(),
        "evacuees": rp.evacuees,
        "wheelchair_evacuees": rp.wheelchair_evacuees,
        "priority": rp.priority,
    }
    if rp.required_terrains is not None:
        out["required_terrains"] = sorted(t.value for t in rp.required_terrains)
    return out


def _shelter_to_json(s: Shelter) -> dict:
    return {"id": s.id, "position": s.position.to_json(), "capacity": s.capacity}


def _crisis_to_json(c: Crisis) -> dict:
    out = {"id": c.id, "kind": c.kind}
    if c.compatible_terrains is not None:
        out["compatible_terrains"] = sorted(t.value for t in c.compatible_terrains)
    return out


# -- field parsing ------------------------------------------------------------


def _parse_enum(cls, value, label):
    try:
        return cls(value)
    except ValueError:
        raise SchemaViolation(f"{label}: unknown value {value!r}") from None


def _parse_int(value, label):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(f"{label} must be an integer, got {value!r}")
    return value


def _parse_terrain_set(value, label) -> frozenset[Terrain]:
    if not isinstance(value, (list, tuple, set, frozenset)):
        raise SchemaViolation(f"{label} must be a list of terrain tags")
    return frozenset(_parse_enum(Terrain, t, label) for t in value)


def _wrap_schema(fn: Callable[[], Any], kind: str):
    try:
        return fn()
    except TypeError as exc:
        raise SchemaViolation(f"{kind}: {exc}") from None


def person_from_fields(fields: Mapping[str, Any]) -> Person:
    f = dict(fields)
    if "role" in f:
        f["role"] = _parse_enum(Role, f["role"], "person role")
    if "mobility" in f:
        f["mobility"] = _parse_enum(Mobility, f["mobility"], "person mobility")
    if "licenses" in f:
        lic = f["licenses"]
        if not isinstance(lic, (list, tuple, set, frozenset)) or not all(
            isinstance(x, str) for x in lic
        ):
            raise SchemaViolation("person licenses must be a list of strings")
        f["licenses"] = frozenset(lic)
    return _wrap_schema(lambda: Person(**f), "person")


def vehicle_from_fields(fields: Mapping[str, Any]) -> Vehicle:
    f = dict(fields)
    if "terrain" in f:
        f["terrain"] = _parse_enum(Terrain, f["terrain"], "vehicle terrain")
    for key in ("seats", "wheelchair_slots"):
        if key in f:
            f[key] = _parse_int(f[key], f"vehicle {key}")
    return _wrap_schema(lambda: Vehicle(**f), "vehicle")


def rescue_point_from_fields(fields: Mapping[str, Any]) -> RescuePoint:
    f = dict(fields)
    place = Place(
        id=f.pop("id", ""),
        kind=PlaceKind.RESCUE_POINT,
        position=position_from_json(f.pop("position", None)),
    )
    if "required_terrains" in f and f["required_terrains"] is not None:
        f["required_terrains"] = _parse_terrain_set(f["required_terrains"], "rescue point terrains")
    for key in ("evacuees", "wheelchair_evacuees", "priority"):
        if key in f:
            f[key] = _parse_int(f[key], f"rescue point {key}")
    return _wrap_schema(lambda: RescuePoint(place=place, **f), "rescue_point")


def shelter_from_fields(fields: Mapping[str, Any]) -> Shelter:
    f = dict(fields)
    place = Place(
        id=f.pop("id", ""),
        kind=PlaceKind.SHELTER,
        position=position_from_json(f.pop("position", None)),
    )
    if "capacity" in f:
        f["capacity"] = _parse_int(f["capacity"], "shelter capacity")
    return _wrap_schema(lambda: Shelter(place=place, **f), "shelter")


def crisis_from_fields(fields: Mapping[str, Any]) -> Crisis:
    f = dict(fields)
    if "compatible_terrains" in f and f["compatible_terrains"] is not None:
        f["compatible_terrains"] = _parse_terrain_set(f["compatible_terrains"], "crisis terrains")
    return _wrap_schema(lambda: Crisis(**f), "crisis")


def snapshot_from_json_dict(data: Mapping[str, Any]) -> KnowledgeSnapshot:
    """Build and validate a snapshot from its documented JSON form."""
    if not isinstance(data, Mapping):
        raise SchemaViolation("snapshot must be a JSON object")
    unknown = set(data) - {
        "schema_version",
        "crisis",
        "persons",
        "vehicles",
        "mobile_resources",
        "rescue_points",
        "shelters",
    }
    if unknown:
        raise SchemaViolation(f"snapshot has unknown top-level keys: {sorted(unknown)}")
    snap = KnowledgeSnapshot(schema_version=_parse_int(data.get("schema_version", 1), "schema_version"))
    if data.get("crisis"):
        snap.crisis = crisis_from_fields(data["crisis"])

    def fill(target: dict, items, builder, label):
        for raw in items or []:
            if not isinstance(raw, Mapping):
                raise SchemaViolation(f"{label} entries must be objects")
            entity = builder(raw)
            if entity.id in target:
                raise SchemaViolation(f"duplicate {label} id {entity.id!r}")
            target[entity.id] = entity

    fill(snap.persons, data.get("persons"), person_from_fields, "person")
    fill(snap.vehicles, data.get("vehicles"), vehicle_from_fields, "vehicle")
    fill(snap.rescue_points, data.get("rescue_points"), rescue_point_from_fields, "rescue_point")
    fill(snap.shelters, data.get("shelters"), shelter_from_fields, "shelter")

    for raw in data.get("mobile_resources") or []:
        if not isinstance(raw, Mapping):
            raise SchemaViolation("mobile_resources entries must be objects")
        mr = _resource_from_json(raw, snap)
        if mr.id in snap.mobile_resources:
            raise SchemaViolation(f"duplicate mobile resource id {mr.id!r}")
        snap.mobile_resources[mr.id] = mr
    snap.validate()
    return snap


def _resource_from_json(raw: Mapping[str, Any], snap: KnowledgeSnapshot) -> MobileResource:
    f = dict(raw)
    driver_id = f.pop("driver", None)
    vehicle_id = f.pop("vehicle", None)
    if driver_id not in snap.persons:
        raise SchemaViolation(f"mobile resource references unknown person {driver_id!r}")
    if vehicle_id not in snap.vehicles:
        raise SchemaViolation(f"mobile resource references unknown vehicle {vehicle_id!r}")
    pos_raw = f.pop("position", None)
    if isinstance(pos_raw, str):
        # A bare string is the id of a rescue point or shelter the resource is
        # parked at; resolve it to that place's position.
        if pos_raw in snap.rescue_points:
            position = snap.rescue_points[pos_raw].position
        elif pos_raw in snap.shelters:
            position = snap.shelters[pos_raw].position
        else:
            raise SchemaViolation(f"mobile resource position references unknown place {pos_raw!r}")
    else:
        position = position_from_json(pos_raw)
    return _wrap_schema(
        lambda: MobileResource(
            driver=snap.persons[driver_id],
            vehicle=snap.vehicles[vehicle_id],
            position=position,
            **f,
        ),
        "mobile_resource",
    )


def save_snapshot(snapshot: KnowledgeSnapshot, path: str | Path) -> None:
    snapshot.validate()
    text = json.dumps(snapshot.to_json_dict(), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_snapshot(path: str | Path) -> KnowledgeSnapshot:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return snapshot_from_json_dict(data)


def _default_clock() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class KnowledgeBase:
    """Mutable store with a single-writer, snapshot-reader contract.

    Persons and vehicles are immutable once created (their physical attributes
    anchor every capacity computation); re-upserting one with different fields
    raises :class:`DuplicateId`.  Rescue points, shelters and the crisis record
    hold operational state and may be updated freely through upserts.
    """

    _KINDS = ("person", "vehicle", "mobile_resource", "rescue_point", "shelter", "crisis")

    def __init__(self, snapshot: KnowledgeSnapshot | None = None,
                 clock: Callable[[], str] = _default_clock):
        self.lock = threading.RLock()
        self._clock = clock
        self._snap = snapshot.copy() if snapshot else KnowledgeSnapshot()
        self._snap.validate()

    @classmethod
    def from_file(cls, path: str | Path, clock: Callable[[], str] = _default_clock) -> "KnowledgeBase":
        return cls(load_snapshot(path), clock=clock)

    def snapshot(self) -> KnowledgeSnapshot:
        with self.lock:
            return self._snap.copy()

    def save(self, path: str | Path) -> None:
        save_snapshot(self.snapshot(), path)

    # -- mutations -----------------------------------------------------------

    def upsert_entity(self, kind: str, fields: Mapping[str, Any]) -> str:
        if kind not in self._KINDS:
            raise SchemaViolation(f"unknown entity kind {kind!r}")
        with self.lock:
            if kind == "person":
                return self._upsert_immutable(self._snap.persons, person_from_fields(fields))
            if kind == "vehicle":
                return self._upsert_immutable(self._snap.vehicles, vehicle_from_fields(fields))
            if kind == "rescue_point":
                entity = rescue_point_from_fields(fields)
                self._snap.rescue_points[entity.id] = entity
                return entity.id
            if kind == "shelter":
                entity = shelter_from_fields(fields)
                self._snap.shelters[entity.id] = entity
                return entity.id
            if kind == "crisis":
                crisis = crisis_from_fields(fields)
                self._snap.crisis = crisis
                return crisis.id
            mr = _resource_from_json(fields, self._snap)
            existing = self._snap.mobile_resources.get(mr.id)
            if existing and (existing.driver.id != mr.driver.id or existing.vehicle.id != mr.vehicle.id):
                raise DuplicateId(
                    f"mobile resource {mr.id} already pairs {existing.driver.id}/{existing.vehicle.id}"
                )
            if existing is None:
                self._check_unpaired(mr.driver.id, mr.vehicle.id)
            self._snap.mobile_resources[mr.id] = mr
            return mr.id

    @staticmethod
    def _upsert_immutable(target: dict, entity) -> str:
        existing = target.get(entity.id)
        if existing is not None and existing != entity:
            raise DuplicateId(f"id {entity.id!r} already stored with different fields")
        target[entity.id] = entity
        return entity.id

    def _check_unpaired(self, driver_id: str, vehicle_id: str) -> None:
        for mr in self._snap.mobile_resources.values():
            if mr.driver.id == driver_id:
                raise AlreadyPaired(f"driver {driver_id} already paired in {mr.id}")
            if mr.vehicle.id == vehicle_id:
                raise AlreadyPaired(f"vehicle {vehicle_id} already paired in {mr.id}")

    def pair_mobile_resource(
        self,
        driver_id: str,
        vehicle_id: str,
        position: Position,
        resource_id: str | None = None,
    ) -> MobileResource:
        """Create the default driver+vehicle pairing at the given position."""
        with self.lock:
            driver = self._snap.persons.get(driver_id)
            if driver is None:
                raise UnknownEntity(f"unknown person {driver_id!r}")
            vehicle = self._snap.vehicles.get(vehicle_id)
            if vehicle is None:
                raise UnknownEntity(f"unknown vehicle {vehicle_id!r}")
            self._check_unpaired(driver_id, vehicle_id)
            mr = MobileResource(
                id=resource_id or f"mr-{driver_id}-{vehicle_id}",
                driver=driver,
                vehicle=vehicle,
                position=position,
                available=True,
                committed=False,
                updated_at=self._clock(),
            )
            if mr.id in self._snap.mobile_resources:
                raise DuplicateId(f"mobile resource id {mr.id!r} already in use")
            self._snap.mobile_resources[mr.id] = mr
            return mr

    def set_availability(
        self, resource_id: str, available: bool, position: Position | None = None
    ) -> MobileResource:
        with self.lock:
            mr = self._snap.mobile_resources.get(resource_id)
            if mr is None:
                raise UnknownEntity(f"unknown mobile resource {resource_id!r}")
            mr = replace(
                mr,
                available=available,
                position=position if position is not None else mr.position,
                updated_at=self._clock(),
            )
            self._snap.mobile_resources[resource_id] = mr
            return mr

    def find_pairing(self, driver_id: str, vehicle_id: str) -> MobileResource | None:
        with self.lock:
            for mr in self._snap.mobile_resources.values():
                if mr.driver.id == driver_id and mr.vehicle.id == vehicle_id:
                    return mr
        return None

    def apply_acceptance(self, resource_ids: Iterable[str], shelter_intake: Mapping[str, int]) -> None:
        """Atomically commit resources and decrement shelter capacities.

        Either every change applies or none does.
        """
        with self.lock:
            resources = []
            for rid in resource_ids:
                mr = self._snap.mobile_resources.get(rid)
                if mr is None:
                    raise UnknownEntity(f"unknown mobile resource {rid!r}")
                if not mr.available or mr.committed:
                    raise StalePlan(
                        f"resource {rid} is no longer available", resource=rid
                    )
                resources.append(mr)
            shelters = []
            for sid, amount in shelter_intake.items():
                sh = self._snap.shelters.get(sid)
                if sh is None:
                    raise UnknownEntity(f"unknown shelter {sid!r}")
                if amount < 0 or amount > sh.capacity:
                    raise SchemaViolation(
                        f"shelter {sid}: intake {amount} exceeds remaining capacity {sh.capacity}"
                    )
                shelters.append((sh, amount))
            now = self._clock()
            for mr in resources:
                self._snap.mobile_resources[mr.id] = replace(mr, committed=True, updated_at=now)
            for sh, amount in shelters:
                self._snap.shelters[sh.id] = replace(sh, capacity=sh.capacity - amount)

    # -- queries --------------------------------------------------------------

    def query_available_resources(self, crisis: Crisis | None = None) -> list[MobileResource]:
        """All resources that are available and not committed, sorted by id."""
        with self.lock:
            return [
                mr
                for _, mr in sorted(self._snap.mobile_resources.items())
                if mr.available and not mr.committed
            ]

    def get(self, kind: str, entity_id: str):
        with self.lock:
            table = {
                "person": self._snap.persons,
                "vehicle": self._snap.vehicles,
                "mobile_resource": self._snap.mobile_resources,
                "rescue_point": self._snap.rescue_points,
                "shelter": self._snap.shelters,
            }.get(kind)
            if table is None:
                raise SchemaViolation(f"unknown entity kind {kind!r}")
            entity = table.get(entity_id)
            if entity is None:
                raise UnknownEntity(f"unknown {kind} {entity_id!r}")
            return entity

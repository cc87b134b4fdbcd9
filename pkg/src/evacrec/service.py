"""HTTP facade: availability ingestion from drivers, need editing by decision
makers, recommendation runs and the propose/accept plan loop.

One crisis per server instance.  Plans are immutable once proposed; accepting
one atomically commits its resources, decrements shelter capacities and
supersedes the other proposed plans.  Staleness is detected by comparing the
instance fingerprint captured at proposal time with the current one.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    AlreadyPaired,
    DuplicateId,
    EmptyGraph,
    EvacError,
    LicenseMismatch,
    MatrixIncomplete,
    SchemaViolation,
    SolverBusy,
    StalePlan,
    UnknownEntity,
    UnknownNode,
)
from .kb import KnowledgeBase, Position, position_from_json
from .recommender import (
    ConstraintSet,
    RecommendationPlan,
    SolverConfig,
    plan_to_json_dict,
    solve,
)
from .roadnet import RoadGraph
from .scenario import (
    assemble_instance,
    build_matrices,
    instance_fingerprint,
    placement_fingerprint,
)

ERROR_STATUS: dict[type, int] = {
    UnknownEntity: 404,
    LicenseMismatch: 409,
    AlreadyPaired: 409,
    DuplicateId: 409,
    StalePlan: 409,
    MatrixIncomplete: 409,
    EmptyGraph: 409,
    UnknownNode: 409,
    SolverBusy: 503,
    SchemaViolation: 400,
}


class PlanState(str, Enum):
    PROPOSED = "proposed"
    ACCEPTED = "accepted"
    SUPERSEDED = "superseded"


@dataclass
class PlanRecord:
    id: str
    instance_fingerprint: str
    plan: RecommendationPlan
    state: PlanState
    created_at: str

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "instance_fingerprint": self.instance_fingerprint,
            "plan": plan_to_json_dict(self.plan),
            "state": self.state.value,
            "created_at": self.created_at,
        }


class AvailabilityBody(BaseModel):
    driver_id: str
    vehicle_id: str
    available: bool
    position: Any = None


class RescuePointBody(BaseModel):
    evacuees: int
    wheelchair_evacuees: int = 0
    priority: int
    position: Any = None
    required_terrains: list[str] | None = None


class ShelterBody(BaseModel):
    capacity: int
    position: Any = None


def _resource_json(mr) -> dict:
    out = {
        "id": mr.id,
        "driver": mr.driver.id,
        "vehicle": mr.vehicle.id,
        "position": mr.position.to_json(),
        "available": mr.available,
        "committed": mr.committed,
        "capacity": mr.capacity,
    }
    if mr.updated_at is not None:
        out["updated_at"] = mr.updated_at
    return out


def create_app(
    kb: KnowledgeBase,
    graph: RoadGraph,
    *,
    constraints: ConstraintSet | None = None,
    config: SolverConfig | None = None,
    console_dir: str | None = None,
) -> FastAPI:
    constraints = constraints or ConstraintSet()
    config = config or SolverConfig()
    app = FastAPI(title="evacrec", version="0.1.0")

    records: dict[str, PlanRecord] = {}
    counter = {"plans": 0}
    solve_lock = threading.Lock()
    matrix_cache: dict[str, tuple] = {}

    def now() -> str:
        return datetime.now(timezone.utc).isoformat(timespec="seconds")

    @app.exception_handler(EvacError)
    async def evac_error_handler(_req: Request, exc: EvacError):
        status = 400
        for cls, code in ERROR_STATUS.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(
            status_code=status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "malformed_body",
                "message": "request body failed validation",
                "details": {"errors": exc.errors()},
            },
        )

    @app.post("/api/availability")
    def post_availability(body: AvailabilityBody) -> dict:
        position: Position | None = None
        if body.position is not None:
            position = position_from_json(body.position)
        with kb.lock:
            mr = kb.find_pairing(body.driver_id, body.vehicle_id)
            if mr is None:
                if position is None:
                    raise SchemaViolation("a new pairing needs a position")
                mr = kb.pair_mobile_resource(body.driver_id, body.vehicle_id, position)
            mr = kb.set_availability(mr.id, body.available, position)
        return _resource_json(mr)

    @app.put("/api/rescue-points/{rescue_point_id}")
    def put_rescue_point(rescue_point_id: str, body: RescuePointBody) -> dict:
        fields: dict[str, Any] = {
            "id": rescue_point_id,
            "evacuees": body.evacuees,
            "wheelchair_evacuees": body.wheelchair_evacuees,
            "priority": body.priority,
        }
        with kb.lock:
            if body.position is not None:
                fields["position"] = body.position
            else:
                existing = kb.snapshot().rescue_points.get(rescue_point_id)
                if existing is None:
                    raise SchemaViolation("a new rescue point needs a position")
                fields["position"] = existing.position.to_json()
            if body.required_terrains is not None:
                fields["required_terrains"] = body.required_terrains
            kb.upsert_entity("rescue_point", fields)
            stored = kb.get("rescue_point", rescue_point_id)
        return {
            "id": stored.id,
            "position": stored.position.to_json(),
            "evacuees": stored.evacuees,
            "wheelchair_evacuees": stored.wheelchair_evacuees,
            "priority": stored.priority,
        }

    @app.put("/api/shelters/{shelter_id}")
    def put_shelter(shelter_id: str, body: ShelterBody) -> dict:
        fields: dict[str, Any] = {"id": shelter_id, "capacity": body.capacity}
        with kb.lock:
            if body.position is not None:
                fields["position"] = body.position
            else:
                existing = kb.snapshot().shelters.get(shelter_id)
                if existing is None:
                    raise SchemaViolation("a new shelter needs a position")
                fields["position"] = existing.position.to_json()
            kb.upsert_entity("shelter", fields)
            stored = kb.get("shelter", shelter_id)
        return {
            "id": stored.id,
            "position": stored.position.to_json(),
            "capacity": stored.capacity,
        }

    @app.post("/api/recommendations")
    def post_recommendation() -> dict:
        if not solve_lock.acquire(blocking=False):
            raise SolverBusy("a recommendation run is already in flight")
        try:
            snapshot = kb.snapshot()
            place_fp = placement_fingerprint(snapshot, graph)
            matrices = matrix_cache.get(place_fp)
            if matrices is None:
                matrices = build_matrices(snapshot, graph)
                matrix_cache.clear()
                matrix_cache[place_fp] = matrices
            instance = assemble_instance(snapshot, graph, constraints, matrices)
            plan = solve(instance, config)
            fingerprint = instance_fingerprint(snapshot, graph, constraints, config)
            with kb.lock:
                counter["plans"] += 1
                record = PlanRecord(
                    id=f"plan-{counter['plans']:04d}",
                    instance_fingerprint=fingerprint,
                    plan=plan,
                    state=PlanState.PROPOSED,
                    created_at=now(),
                )
                records[record.id] = record
            return record.to_json_dict()
        finally:
            solve_lock.release()

    @app.post("/api/plans/{plan_id}/accept")
    def accept_plan(plan_id: str) -> dict:
        with kb.lock:
            record = records.get(plan_id)
            if record is None:
                raise UnknownEntity(f"unknown plan {plan_id!r}")
            if record.state is not PlanState.PROPOSED:
                raise StalePlan(
                    f"plan {plan_id} is {record.state.value}, only proposed plans can be accepted",
                    state=record.state.value,
                )
            current = instance_fingerprint(kb.snapshot(), graph, constraints, config)
            if current != record.instance_fingerprint:
                raise StalePlan(
                    "the knowledge base changed since this plan was proposed; "
                    "request a new recommendation",
                    proposed=record.instance_fingerprint,
                    current=current,
                )
            intake: dict[str, int] = {}
            for a in record.plan.assignments:
                intake[a.shelter] = intake.get(a.shelter, 0) + a.evacuees_loaded
            kb.apply_acceptance([a.resource for a in record.plan.assignments], intake)
            record.state = PlanState.ACCEPTED
            for other in records.values():
                if other.id != plan_id and other.state is PlanState.PROPOSED:
                    other.state = PlanState.SUPERSEDED
            return record.to_json_dict()

    @app.get("/api/plans/{plan_id}")
    def get_plan(plan_id: str) -> dict:
        record = records.get(plan_id)
        if record is None:
            raise UnknownEntity(f"unknown plan {plan_id!r}")
        return record.to_json_dict()

    @app.get("/api/state")
    def get_state() -> dict:
        with kb.lock:
            snapshot = kb.snapshot()
            plans = [records[k].to_json_dict() for k in sorted(records)]
        return {
            "snapshot": snapshot.to_json_dict(),
            "plans": plans,
            "config": {
                "exact_bound": config.exact_bound,
                "makespan": config.makespan,
                "enforce_wheelchair": constraints.enforce_wheelchair,
                "enforce_shelter_capacity": constraints.enforce_shelter_capacity,
                "enforce_terrain": constraints.enforce_terrain,
            },
        }

    if console_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")

    return app

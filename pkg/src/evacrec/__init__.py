"""evacrec: constraint-based driver/vehicle allocation for crisis evacuations."""

from .errors import (
    AlreadyPaired,
    DuplicateId,
    EmptyGraph,
    EvacError,
    GraphViolation,
    InstanceTooLarge,
    LicenseMismatch,
    MatrixIncomplete,
    SchemaViolation,
    SolverBusy,
    StalePlan,
    UnknownEntity,
    UnknownNode,
)
from .kb import (
    Crisis,
    KnowledgeBase,
    KnowledgeSnapshot,
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
    load_snapshot,
    save_snapshot,
)
from .recommender import (
    Assignment,
    ConstraintSet,
    PlanStatus,
    ProblemInstance,
    RecommendationPlan,
    SolverConfig,
    check_feasible,
    enumerate_all,
    enumeration_minimum,
    explain,
    load_rule,
    make_instance,
    plan_to_json_dict,
    solve,
)
from .roadnet import (
    RoadGraph,
    TravelTimeMatrix,
    build_matrix,
    load_graph,
    shortest_time,
    snap,
)
from .scenario import (
    Scenario,
    assemble_instance,
    instance_fingerprint,
    load_scenario,
    placement_fingerprint,
    plan_to_json,
    scenario_from_dict,
    scenario_instance,
)

__version__ = "0.1.0"

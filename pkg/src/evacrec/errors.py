"""Exception hierarchy shared by the store, the road network and the solver.

Every error carries a machine-readable ``code`` so the HTTP layer and the CLI
can map failures without string matching.
"""

from __future__ import annotations


class EvacError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details


class SchemaViolation(EvacError):
    """An entity, snapshot or file breaks a declared invariant."""

    code = "schema_violation"


class DuplicateId(SchemaViolation):
    """An id is reused with conflicting immutable fields."""

    code = "duplicate_id"


class LicenseMismatch(SchemaViolation):
    """The driver does not hold the licence the vehicle requires."""

    code = "license_mismatch"


class AlreadyPaired(SchemaViolation):
    """Driver or vehicle already belongs to an active pairing."""

    code = "already_paired"


class UnknownEntity(EvacError):
    """A referenced entity id does not exist in the store."""

    code = "unknown_entity"


class GraphViolation(EvacError):
    """A road-graph file breaks the node/edge contract."""

    code = "graph_violation"


class EmptyGraph(GraphViolation):
    """An operation that needs at least one node got an empty graph."""

    code = "empty_graph"


class UnknownNode(GraphViolation):
    """A node id is missing from the road graph."""

    code = "unknown_node"


class MatrixIncomplete(EvacError):
    """The travel-time matrix lacks an entry the solver needs."""

    code = "matrix_incomplete"


class InstanceTooLarge(EvacError):
    """The instance exceeds the exhaustive-enumeration guard."""

    code = "instance_too_large"


class StalePlan(EvacError):
    """The world changed between proposing a plan and accepting it."""

    code = "stale_plan"


class SolverBusy(EvacError):
    """A recommendation run is already in flight for this crisis."""

    code = "solver_busy"

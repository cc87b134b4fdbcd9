/** Payload shapes of the dispatch service JSON API (single source of truth:
 * the server; the console never recomputes objectives client-side). */

export type PositionJson = [number, number] | { node: string };

export interface ResourceJson {
  id: string;
  driver: string;
  vehicle: string;
  position: PositionJson;
  available: boolean;
  committed: boolean;
  updated_at?: string;
}

export interface PersonJson {
  id: string;
  name: string;
  role: "affected" | "human_resource";
  mobility: "ambulant" | "wheelchair";
  licenses: string[];
}

export interface VehicleJson {
  id: string;
  category: string;
  seats: number;
  wheelchair_slots: number;
  required_license: string;
  terrain: "land" | "water" | "air";
}

export interface RescuePointJson {
  id: string;
  position: PositionJson;
  evacuees: number;
  wheelchair_evacuees: number;
  priority: number;
  required_terrains?: string[];
}

export interface ShelterJson {
  id: string;
  position: PositionJson;
  capacity: number;
}

export interface SnapshotJson {
  schema_version: number;
  crisis: { id: string; kind: string } | null;
  persons: PersonJson[];
  vehicles: VehicleJson[];
  mobile_resources: ResourceJson[];
  rescue_points: RescuePointJson[];
  shelters: ShelterJson[];
}

export interface AssignmentJson {
  resource: string;
  rescue_point: string;
  shelter: string;
  evacuees_loaded: number;
  wheelchair_loaded: number;
  t_to_rp: number;
  t_rp_to_shelter: number;
}

export interface PlanJson {
  assignments: AssignmentJson[];
  objective: { uncovered_weight: number; total_time: number; vehicles_used: number };
  uncovered: Record<string, { evacuees_left: number; wheelchair_left: number }>;
  status: "full_coverage" | "partial_coverage" | "empty";
  solver: "exact" | "heuristic";
  lower_bound_s?: number;
}

export interface PlanRecordJson {
  id: string;
  instance_fingerprint: string;
  plan: PlanJson;
  state: "proposed" | "accepted" | "superseded";
  created_at: string;
}

export interface StateJson {
  snapshot: SnapshotJson;
  plans: PlanRecordJson[];
  config: Record<string, unknown>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(`${body.code}: ${body.message}`);
    this.status = status;
    this.code = body.code;
    this.body = body;
  }
}

export interface RescuePointEdit {
  evacuees: number;
  wheelchair_evacuees: number;
  priority: number;
}

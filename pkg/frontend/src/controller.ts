/** View-model holder and mutation coordinator.
 *
 * The console is stateless beyond the last fetched server state.  At most one
 * mutation runs at a time; poll responses that resolve while a mutation is in
 * flight are discarded so a stale snapshot can never overwrite its outcome.
 */

import { ApiClient } from "./api.js";
import {
  ApiError,
  PlanRecordJson,
  RescuePointEdit,
  StateJson,
} from "./types.js";
import { rescuePointEditProblem } from "./validate.js";

export type Banner =
  | { kind: "idle" }
  | { kind: "in_progress"; message: string }
  | { kind: "stale"; message: string }
  | { kind: "error"; message: string };

export interface EditOutcome {
  ok: boolean;
  message: string | null;
}

export class Controller {
  state: StateJson | null = null;
  /** The plan record currently shown: the accepted one if fresh, else the
   * latest proposed record. */
  currentPlanId: string | null = null;
  banner: Banner = { kind: "idle" };
  mutationInFlight = false;
  onChange: () => void = () => {};

  constructor(private readonly api: ApiClient) {}

  private emit(): void {
    this.onChange();
  }

  currentPlan(): PlanRecordJson | null {
    if (!this.state || this.currentPlanId === null) return null;
    return this.state.plans.find((p) => p.id === this.currentPlanId) ?? null;
  }

  private adoptState(state: StateJson): void {
    this.state = state;
    if (this.currentPlanId === null && state.plans.length > 0) {
      this.currentPlanId = state.plans[state.plans.length - 1].id;
    }
    this.emit();
  }

  /** Poll tick.  Discarded when it races a mutation. */
  async refresh(): Promise<void> {
    const ticket = this.mutationInFlight;
    try {
      const state = await this.api.getState();
      if (ticket || this.mutationInFlight) return; // raced a mutation: discard
      this.adoptState(state);
    } catch {
      // A dropped poll is not an error state; the next tick retries.
    }
  }

  private async mutate<T>(run: () => Promise<T>): Promise<T> {
    if (this.mutationInFlight) {
      throw new Error("a mutation is already in flight");
    }
    this.mutationInFlight = true;
    this.emit();
    try {
      return await run();
    } finally {
      this.mutationInFlight = false;
      this.emit();
    }
  }

  /** PUT new needs for a rescue point.  Optimistically updates the row, then
   * reconciles with the stored record (or reverts on a server 400). */
  async editRescuePoint(id: string, edit: RescuePointEdit): Promise<EditOutcome> {
    const problem = rescuePointEditProblem(edit);
    if (problem) return { ok: false, message: problem };
    if (!this.state) return { ok: false, message: "no state loaded yet" };
    const row = this.state.snapshot.rescue_points.find((rp) => rp.id === id);
    if (!row) return { ok: false, message: `unknown rescue point ${id}` };
    const before = { ...row };
    Object.assign(row, edit); // optimistic
    this.emit();
    try {
      const stored = await this.mutate(() => this.api.putRescuePoint(id, edit));
      Object.assign(row, stored); // reconcile with the authoritative record
      this.emit();
      return { ok: true, message: null };
    } catch (err) {
      Object.assign(row, before); // revert
      this.emit();
      const message = err instanceof ApiError ? err.message : String(err);
      return { ok: false, message };
    }
  }

  /** POST /api/recommendations; a 503 renders as retryable progress info. */
  async requestRecommendation(): Promise<void> {
    try {
      const record = await this.mutate(() => this.api.requestRecommendation());
      this.currentPlanId = record.id;
      this.banner = { kind: "idle" };
    } catch (err) {
      if (err instanceof ApiError && err.status === 503) {
        this.banner = {
          kind: "in_progress",
          message: "a computation is already in progress — retry shortly",
        };
      } else {
        this.banner = { kind: "error", message: String(err) };
      }
    }
    await this.reload();
  }

  /** POST accept; a 409 asks the operator to recompute. */
  async acceptPlan(planId: string): Promise<void> {
    try {
      await this.mutate(() => this.api.acceptPlan(planId));
      this.banner = { kind: "idle" };
    } catch (err) {
      if (err instanceof ApiError && err.code === "stale_plan") {
        this.banner = {
          kind: "stale",
          message: "the situation changed since this plan was proposed — request a new recommendation",
        };
      } else {
        this.banner = { kind: "error", message: String(err) };
      }
    }
    await this.reload();
  }

  /** Unconditional state reload after a mutation settled. */
  private async reload(): Promise<void> {
    try {
      this.adoptState(await this.api.getState());
    } catch {
      // keep the previous view; the poll loop will catch up
    }
  }
}

/** Thin fetch client for the dispatch service. */

import {
  ApiError,
  PlanRecordJson,
  RescuePointEdit,
  RescuePointJson,
  StateJson,
} from "./types.js";

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  getState(): Promise<StateJson> {
    return request(`${this.base}/api/state`);
  }

  putRescuePoint(id: string, edit: RescuePointEdit): Promise<RescuePointJson> {
    return request(`${this.base}/api/rescue-points/${encodeURIComponent(id)}`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(edit),
    });
  }

  requestRecommendation(): Promise<PlanRecordJson> {
    return request(`${this.base}/api/recommendations`, { method: "POST" });
  }

  acceptPlan(planId: string): Promise<PlanRecordJson> {
    return request(`${this.base}/api/plans/${encodeURIComponent(planId)}/accept`, {
      method: "POST",
    });
  }
}

/** DOM rendering: tables first, plus a tile-free coordinate scatter.
 *
 * Everything shown is taken verbatim from the last server state; objective
 * numbers in particular are never recomputed here.
 */

import { Controller } from "./controller.js";
import {
  PlanRecordJson,
  PositionJson,
  ResourceJson,
  SnapshotJson,
  StateJson,
} from "./types.js";
import { rescuePointEditProblem } from "./validate.js";

export function formatSeconds(total: number): string {
  const minutes = Math.floor(total / 60);
  const seconds = total % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function section(title: string, ...children: (Node | string)[]): HTMLElement {
  return el("section", {}, el("h2", {}, title), ...children);
}

function coord(position: PositionJson): [number, number] | null {
  return Array.isArray(position) ? [position[0], position[1]] : null;
}

// -- resources ---------------------------------------------------------------

function resourcesTable(snapshot: SnapshotJson): HTMLElement {
  const vehicles = new Map(snapshot.vehicles.map((v) => [v.id, v]));
  const persons = new Map(snapshot.persons.map((p) => [p.id, p]));
  const table = el("table", { class: "resources", "data-testid": "resources" });
  table.append(
    el(
      "tr",
      {},
      ...["pair", "driver", "vehicle", "seats", "status"].map((h) => el("th", {}, h)),
    ),
  );
  for (const mr of snapshot.mobile_resources) {
    const vehicle = vehicles.get(mr.vehicle);
    const driver = persons.get(mr.driver);
    const status = mr.committed ? "committed" : mr.available ? "available" : "off duty";
    const cls = mr.committed ? "committed" : mr.available ? "available" : "unavailable";
    table.append(
      el(
        "tr",
        { class: `resource ${cls}`, "data-resource": mr.id },
        el("td", {}, mr.id),
        el("td", {}, driver?.name || mr.driver),
        el("td", {}, vehicle ? `${vehicle.category} (${vehicle.id})` : mr.vehicle),
        el("td", {}, vehicle ? String(vehicle.seats) : "?"),
        el("td", {}, el("span", { class: `badge ${cls}` , "data-testid": "badge"}, status)),
      ),
    );
  }
  return table;
}

// -- rescue points (editable) --------------------------------------------------

function rescuePointRow(
  controller: Controller,
  rp: SnapshotJson["rescue_points"][number],
): HTMLElement {
  const evac = el("input", {
    type: "number", min: "0", value: String(rp.evacuees), "data-field": "evacuees",
  });
  const wheel = el("input", {
    type: "number", min: "0", value: String(rp.wheelchair_evacuees), "data-field": "wheelchair",
  });
  const priority = el("select", { "data-field": "priority" });
  for (let level = 1; level <= 5; level++) {
    const option = el("option", { value: String(level) }, String(level));
    if (level === rp.priority) option.setAttribute("selected", "selected");
    priority.append(option);
  }
  const save = el("button", { "data-action": "save" }, "save") as HTMLButtonElement;
  const hint = el("span", { class: "hint", "data-testid": "hint" });

  const currentEdit = () => ({
    evacuees: Number(evac.value),
    wheelchair_evacuees: Number(wheel.value),
    priority: Number(priority.value),
  });
  const revalidate = () => {
    const problem = rescuePointEditProblem(currentEdit());
    save.disabled = problem !== null || controller.mutationInFlight;
    hint.textContent = problem ?? "";
  };
  evac.addEventListener("input", revalidate);
  wheel.addEventListener("input", revalidate);
  priority.addEventListener("change", revalidate);
  revalidate();

  save.addEventListener("click", async () => {
    const outcome = await controller.editRescuePoint(rp.id, currentEdit());
    if (!outcome.ok) hint.textContent = outcome.message ?? "rejected";
  });

  return el(
    "tr",
    { class: "rescue-point", "data-rescue-point": rp.id },
    el("td", {}, rp.id),
    el("td", {}, evac),
    el("td", {}, wheel),
    el("td", {}, priority),
    el("td", {}, save),
    el("td", {}, hint),
  );
}

function rescuePointsTable(controller: Controller, snapshot: SnapshotJson): HTMLElement {
  const table = el("table", { class: "rescue-points", "data-testid": "rescue-points" });
  table.append(
    el(
      "tr",
      {},
      ...["rescue point", "evacuees", "wheelchair", "priority", "", ""].map((h) =>
        el("th", {}, h),
      ),
    ),
  );
  for (const rp of snapshot.rescue_points) table.append(rescuePointRow(controller, rp));
  return table;
}

// -- shelters -------------------------------------------------------------------

function sheltersTable(snapshot: SnapshotJson): HTMLElement {
  const table = el("table", { class: "shelters", "data-testid": "shelters" });
  table.append(el("tr", {}, el("th", {}, "shelter"), el("th", {}, "places left")));
  for (const shelter of snapshot.shelters) {
    table.append(
      el(
        "tr",
        { "data-shelter": shelter.id },
        el("td", {}, shelter.id),
        el("td", { class: "capacity" }, String(shelter.capacity)),
      ),
    );
  }
  return table;
}

// -- plan -------------------------------------------------------------------------

function planPanel(controller: Controller, state: StateJson): HTMLElement {
  const record = controller.currentPlan();
  const recommend = el(
    "button",
    { "data-action": "recommend", class: "primary" },
    "request recommendation",
  ) as HTMLButtonElement;
  recommend.disabled = controller.mutationInFlight;
  recommend.addEventListener("click", () => void controller.requestRecommendation());

  const panel = el("div", { class: "plan-panel" }, recommend);
  const banner = controller.banner;
  if (banner.kind !== "idle") {
    panel.append(el("div", { class: `banner ${banner.kind}`, "data-testid": "banner" }, banner.message));
  }
  if (!record) {
    const demand = state.snapshot.rescue_points.reduce((acc, rp) => acc + rp.evacuees, 0);
    panel.append(
      el("p", { class: "empty-state" },
        demand === 0 ? "nothing to evacuate" : "no plan requested yet"),
    );
    return panel;
  }
  panel.append(planTable(record, state.snapshot));
  return panel;
}

function planTable(record: PlanRecordJson, snapshot: SnapshotJson): HTMLElement {
  const resources = new Map(snapshot.mobile_resources.map((m) => [m.id, m]));
  const persons = new Map(snapshot.persons.map((p) => [p.id, p]));
  const plan = record.plan;
  const wrap = el("div", { class: "plan", "data-plan": record.id });
  wrap.append(
    el(
      "p",
      { class: `status-banner ${plan.status} ${record.state}`, "data-testid": "plan-status" },
      `${record.id}: ${record.state} — ${plan.status.replace("_", " ")} ` +
        `(uncovered weight ${plan.objective.uncovered_weight}, ` +
        `total time ${formatSeconds(plan.objective.total_time)}, ` +
        `${plan.objective.vehicles_used} vehicles, ${plan.solver})`,
    ),
  );
  if (plan.assignments.length === 0) {
    wrap.append(el("p", { class: "empty-state" }, "nothing to evacuate"));
  } else {
    const table = el("table", { class: "assignments", "data-testid": "assignments" });
    table.append(
      el(
        "tr",
        {},
        ...["driver", "vehicle", "rescue point", "shelter", "to point", "to shelter", "load"].map(
          (h) => el("th", {}, h),
        ),
      ),
    );
    for (const a of plan.assignments) {
      const mr = resources.get(a.resource);
      const driver = mr ? persons.get(mr.driver) : undefined;
      const load =
        a.wheelchair_loaded > 0
          ? `${a.evacuees_loaded} (${a.wheelchair_loaded} wheelchair)`
          : String(a.evacuees_loaded);
      table.append(
        el(
          "tr",
          { class: "assignment", "data-assignment": a.resource },
          el("td", {}, driver?.name || mr?.driver || a.resource),
          el("td", {}, mr?.vehicle ?? "?"),
          el("td", {}, a.rescue_point),
          el("td", {}, a.shelter),
          el("td", {}, formatSeconds(a.t_to_rp)),
          el("td", {}, formatSeconds(a.t_rp_to_shelter)),
          el("td", {}, load),
        ),
      );
    }
    wrap.append(table);
  }
  const uncoveredIds = Object.keys(plan.uncovered);
  if (uncoveredIds.length > 0) {
    const panel = el("div", { class: "shortages", "data-testid": "shortages" });
    panel.append(el("h3", {}, "still uncovered"));
    for (const rpId of uncoveredIds.sort()) {
      const left = plan.uncovered[rpId];
      panel.append(
        el(
          "p",
          {},
          `${rpId}: ${left.evacuees_left} evacuees left` +
            (left.wheelchair_left > 0 ? ` (${left.wheelchair_left} wheelchair)` : ""),
        ),
      );
    }
    wrap.append(panel);
  }
  return wrap;
}

function acceptControls(controller: Controller): HTMLElement {
  const record = controller.currentPlan();
  const accept = el("button", { "data-action": "accept" }, "accept plan") as HTMLButtonElement;
  accept.disabled =
    !record || record.state !== "proposed" || controller.mutationInFlight;
  accept.addEventListener("click", () => {
    const current = controller.currentPlan();
    if (current) void controller.acceptPlan(current.id);
  });
  return el("div", { class: "accept-controls" }, accept);
}

// -- scatter ----------------------------------------------------------------------

const SVG_NS = "http://www.w3.org/2000/svg";

export function scatterSvg(snapshot: SnapshotJson, size = 320): SVGSVGElement {
  const points: { x: number; y: number; cls: string; id: string }[] = [];
  const push = (position: PositionJson, cls: string, id: string) => {
    const c = coord(position);
    if (c) points.push({ x: c[1], y: c[0], cls, id });
  };
  for (const rp of snapshot.rescue_points) push(rp.position, "rescue-point", rp.id);
  for (const shelter of snapshot.shelters) push(shelter.position, "shelter", shelter.id);
  for (const mr of snapshot.mobile_resources) {
    push(mr.position, mr.committed ? "resource committed" : "resource", mr.id);
  }
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "scatter");
  if (points.length === 0) return svg;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const minX = Math.min(...xs), maxX = Math.max(...xs);
  const minY = Math.min(...ys), maxY = Math.max(...ys);
  const pad = 18;
  const span = Math.max(maxX - minX, maxY - minY) || 1;
  const scale = (size - 2 * pad) / span;
  for (const p of points) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(pad + (p.x - minX) * scale));
    // Latitude grows northwards; SVG y grows downwards.
    circle.setAttribute("cy", String(size - pad - (p.y - minY) * scale));
    circle.setAttribute("r", "6");
    circle.setAttribute("class", p.cls);
    circle.setAttribute("data-point", p.id);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = p.id;
    circle.append(title);
    svg.append(circle);
  }
  return svg;
}

// -- root -------------------------------------------------------------------------

export function render(root: HTMLElement, controller: Controller): void {
  root.replaceChildren();
  const state = controller.state;
  if (!state) {
    root.append(el("p", { class: "empty-state" }, "connecting…"));
    return;
  }
  const crisis = state.snapshot.crisis;
  root.append(
    el(
      "header",
      {},
      el("h1", {}, "evacuation dispatch console"),
      el("p", { class: "crisis" }, crisis ? `${crisis.kind} — ${crisis.id}` : "no crisis loaded"),
    ),
    section("volunteer pairs", resourcesTable(state.snapshot)),
    section("rescue points", rescuePointsTable(controller, state.snapshot)),
    section("shelters", sheltersTable(state.snapshot)),
    section("plan", planPanel(controller, state), acceptControls(controller)),
    section("map", scatterSvg(state.snapshot)),
  );
}

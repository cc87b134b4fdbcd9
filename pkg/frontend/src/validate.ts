/** Client-side mirror of the server's rescue-point invariants, used only to
 * gate the submit button; the server remains authoritative. */

import { RescuePointEdit } from "./types.js";

export function rescuePointEditProblem(edit: RescuePointEdit): string | null {
  if (!Number.isInteger(edit.evacuees) || edit.evacuees < 0) {
    return "evacuees must be a non-negative integer";
  }
  if (!Number.isInteger(edit.wheelchair_evacuees) || edit.wheelchair_evacuees < 0) {
    return "wheelchair count must be a non-negative integer";
  }
  if (edit.wheelchair_evacuees > edit.evacuees) {
    return "wheelchair count cannot exceed total evacuees";
  }
  if (!Number.isInteger(edit.priority) || edit.priority < 1 || edit.priority > 5) {
    return "priority must be between 1 and 5";
  }
  return null;
}

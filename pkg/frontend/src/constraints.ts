// Constraint authoring: turn a canvas selection plus a chosen kind into a
// constraint document identical to the backend's file schema.

import type { CanvasRegion, ConstraintDoc, ConstraintKind } from "./types.js";

export const RELATIONAL_KINDS = [
  "size-larger",
  "size-smaller",
  "size-equal",
  "loc-above",
  "loc-below",
  "loc-left",
  "loc-right",
  "loc-overlap",
] as const;

export const GLOBAL_KINDS = ["alignment", "non-overlap"] as const;

export const ALL_KINDS: ConstraintKind[] = [
  ...GLOBAL_KINDS,
  ...RELATIONAL_KINDS,
  "canvas-region",
];

/** What the user currently has selected on the canvas. */
export interface Selection {
  elements: number[];
  region?: CanvasRegion;
}

export class SelectionError extends Error {}

/**
 * Whether the selection can author the kind; used to enable/disable kind
 * buttons so invalid combinations are unreachable in the UI.
 */
export function canAuthor(selection: Selection, kind: ConstraintKind): boolean {
  if (kind === "alignment" || kind === "non-overlap") {
    return selection.elements.length === 0 && selection.region === undefined;
  }
  if (kind === "canvas-region") {
    return selection.elements.length === 1 && selection.region !== undefined;
  }
  return (
    selection.elements.length === 2 &&
    selection.region === undefined &&
    selection.elements[0] !== selection.elements[1]
  );
}

/**
 * Author a constraint from the selection. For relational kinds the first
 * selected element is the subject: "A loc-above B" reads as "A must be
 * above B", "A size-larger B" as "A must be larger than B".
 */
export function authorConstraint(selection: Selection, kind: ConstraintKind): ConstraintDoc {
  if (!canAuthor(selection, kind)) {
    throw new SelectionError(
      `cannot author ${kind} from ${selection.elements.length} selected element(s)` +
        (selection.region ? ` and region ${selection.region}` : ""),
    );
  }
  if (kind === "alignment" || kind === "non-overlap") {
    return { kind };
  }
  if (kind === "canvas-region") {
    return { kind, subject: selection.elements[0], region: selection.region };
  }
  return { kind, subject: selection.elements[0], object: selection.elements[1] };
}

/** Validate a constraint document against the file schema. */
export function validateConstraintDoc(doc: ConstraintDoc, elementCount: number): string | null {
  if (!ALL_KINDS.includes(doc.kind)) {
    return `unknown kind ${String(doc.kind)}`;
  }
  const inRange = (i: number | undefined) =>
    i !== undefined && Number.isInteger(i) && i >= 0 && i < elementCount;
  if (doc.kind === "alignment" || doc.kind === "non-overlap") {
    if (doc.subject !== undefined || doc.object !== undefined || doc.region !== undefined) {
      return `${doc.kind} takes no indices`;
    }
    return null;
  }
  if (doc.kind === "canvas-region") {
    if (!inRange(doc.subject)) return "canvas-region subject out of range";
    if (doc.object !== undefined) return "canvas-region takes no object";
    if (doc.region !== "top" && doc.region !== "middle" && doc.region !== "bottom") {
      return `bad region ${String(doc.region)}`;
    }
    return null;
  }
  if (!inRange(doc.subject) || !inRange(doc.object)) {
    return `${doc.kind} subject/object out of range`;
  }
  if (doc.subject === doc.object) return `${doc.kind} needs two distinct elements`;
  if (doc.region !== undefined) return `${doc.kind} takes no region`;
  return null;
}

/** Human-readable label for a constraint, for list rows and badges. */
export function describeConstraint(doc: ConstraintDoc): string {
  switch (doc.kind) {
    case "alignment":
      return "keep everything aligned";
    case "non-overlap":
      return "no overlapping elements";
    case "canvas-region":
      return `element ${doc.subject} in the ${doc.region} band`;
    case "size-larger":
      return `element ${doc.subject} larger than ${doc.object}`;
    case "size-smaller":
      return `element ${doc.subject} smaller than ${doc.object}`;
    case "size-equal":
      return `elements ${doc.subject} and ${doc.object} equal size`;
    case "loc-overlap":
      return `elements ${doc.subject} and ${doc.object} touching`;
    case "loc-above":
      return `element ${doc.subject} above ${doc.object}`;
    case "loc-below":
      return `element ${doc.subject} below ${doc.object}`;
    case "loc-left":
      return `element ${doc.subject} left of ${doc.object}`;
    default:
      return `element ${doc.subject} right of ${doc.object}`;
  }
}

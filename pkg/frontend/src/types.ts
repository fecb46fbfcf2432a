// Document shapes exchanged with the layout service. These mirror the
// backend's JSON formats exactly; the UI never invents its own geometry.

export interface ElementDoc {
  label: number;
  xc: number;
  yc: number;
  w: number;
  h: number;
}

export interface LayoutDoc {
  elements: ElementDoc[];
}

export type RelationalKind =
  | "size-larger"
  | "size-smaller"
  | "size-equal"
  | "loc-above"
  | "loc-below"
  | "loc-left"
  | "loc-right"
  | "loc-overlap";

export type GlobalKind = "alignment" | "non-overlap";

export type CanvasKind = "canvas-region";

export type ConstraintKind = RelationalKind | GlobalKind | CanvasKind;

export type CanvasRegion = "top" | "middle" | "bottom";

// Matches the constraint file schema: optional fields are omitted, never null.
export interface ConstraintDoc {
  kind: ConstraintKind;
  subject?: number;
  object?: number;
  region?: CanvasRegion;
}

export interface SnapshotDoc {
  k: number;
  f_raw: number;
  f_clamped: number;
  h: number[];
  lagrangian: number;
  layout: LayoutDoc;
  z: number[][];
}

export interface FinalDoc {
  layout: LayoutDoc;
  z: number[][];
  satisfied: boolean;
  max_violation: number;
}

export interface ReportDoc {
  history: SnapshotDoc[];
  final: FinalDoc;
}

export interface GenerateResponse {
  layout: LayoutDoc;
  z: number[][];
}

export interface OptimizeResponse {
  run_id: string;
  report: ReportDoc;
}

export interface SolveOptionsDoc {
  seed?: number;
  k_max?: number;
  alpha?: number;
  mu0?: number;
  eps_stop?: number;
  inner?: {
    method: "cma-es" | "adam";
    iters?: number;
    sigma0?: number;
    lr?: number;
    popsize?: number;
  };
}

export interface OptimizeRequest {
  model: string;
  labels: number[];
  z?: number[][];
  constraints: ConstraintDoc[];
  options?: SolveOptionsDoc;
  stream?: boolean;
}

export interface RunSummaryDoc {
  run_id: string;
  created_at: string;
  satisfied: boolean | null;
  max_violation: number | null;
  iterations: number;
}

export interface ApiErrorBody {
  error: { message: string; field?: string };
}

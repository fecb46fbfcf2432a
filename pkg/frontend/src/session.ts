// One designer session: the label set, the authored constraints with
// their satisfaction badges, the current latent code, and the streamed
// snapshot history of the run in flight. A plain state machine with a
// change callback; rendering lives elsewhere.

import { ApiError, type StreamResult } from "./api.js";
import type {
  ConstraintDoc,
  ConstraintKind,
  GenerateResponse,
  LayoutDoc,
  OptimizeRequest,
  ReportDoc,
  SnapshotDoc,
  SolveOptionsDoc,
} from "./types.js";
import { authorConstraint, type Selection } from "./constraints.js";

/** The slice of the API client a session needs; narrow for testability. */
export interface SessionApi {
  generate(model: string, labels: number[], seed: number): Promise<GenerateResponse>;
  optimizeStream(
    request: OptimizeRequest,
    onSnapshot: (snapshot: SnapshotDoc) => void,
  ): Promise<StreamResult>;
}

export interface ConstraintBadge {
  cost: number;
  satisfied: boolean;
  /** true while a solve is in flight and the cost predates it */
  stale: boolean;
}

export interface AuthoredConstraint {
  doc: ConstraintDoc;
  badge: ConstraintBadge | null;
}

export type SolveStatus = "idle" | "running" | "done" | "error";

export interface RunEntry {
  runId: string;
  satisfied: boolean;
  snapshots: SnapshotDoc[];
}

const VIOLATION_EPS = 1e-4;

export class Session {
  model: string;
  labels: number[];
  seed: number;
  options: SolveOptionsDoc;

  /** latent code carried into the next solve; null means sample from seed */
  currentZ: number[][] | null = null;
  currentLayout: LayoutDoc | null = null;

  constraints: AuthoredConstraint[] = [];
  status: SolveStatus = "idle";
  snapshots: SnapshotDoc[] = [];
  finalReport: ReportDoc | null = null;
  lastRunId: string | null = null;
  lastError: string | null = null;
  runHistory: RunEntry[] = [];

  private changed: () => void;

  constructor(
    private api: SessionApi,
    init: { model: string; labels: number[]; seed?: number; options?: SolveOptionsDoc },
    onChange?: () => void,
  ) {
    this.model = init.model;
    this.labels = [...init.labels];
    this.seed = init.seed ?? 0;
    this.options = init.options ?? {};
    this.changed = onChange ?? (() => {});
  }

  /** Fetch the unconstrained layout for the current seed. */
  async generateInitial(): Promise<void> {
    const result = await this.api.generate(this.model, this.labels, this.seed);
    this.currentLayout = result.layout;
    this.currentZ = result.z;
    this.changed();
  }

  addConstraint(selection: Selection, kind: ConstraintKind): ConstraintDoc {
    const doc = authorConstraint(selection, kind);
    this.constraints.push({ doc, badge: null });
    this.changed();
    return doc;
  }

  removeConstraint(index: number): void {
    this.constraints.splice(index, 1);
    this.changed();
  }

  constraintDocs(): ConstraintDoc[] {
    return this.constraints.map((c) => ({ ...c.doc }));
  }

  /**
   * Run the solver with streaming snapshots. Badges go stale while the
   * solve runs and are refreshed from the final report's cost vector.
   * On an API error the session state (constraints, z) is unchanged.
   */
  async runAndStream(): Promise<void> {
    if (this.status === "running") {
      throw new Error("a solve is already in flight for this session");
    }
    this.status = "running";
    this.lastError = null;
    this.snapshots = [];
    this.finalReport = null;
    for (const c of this.constraints) {
      if (c.badge) c.badge.stale = true;
    }
    this.changed();

    try {
      const result = await this.api.optimizeStream(
        {
          model: this.model,
          labels: this.labels,
          constraints: this.constraintDocs(),
          options: { ...this.options, seed: this.seed },
          ...(this.currentZ ? { z: this.currentZ } : {}),
        },
        (snapshot) => {
          this.snapshots.push(snapshot);
          this.changed();
        },
      );
      this.finishRun(result.runId, result.report);
    } catch (error) {
      this.status = "error";
      this.lastError =
        error instanceof ApiError ? describeApiError(error) : String(error);
      this.changed();
      return;
    }
  }

  private finishRun(runId: string, report: ReportDoc): void {
    this.status = "done";
    this.finalReport = report;
    this.lastRunId = runId;
    this.currentLayout = report.final.layout;
    this.currentZ = report.final.z;
    const costs = report.history.length
      ? report.history[report.history.length - 1].h
      : this.constraints.map(() => 0);
    this.constraints.forEach((c, i) => {
      const cost = costs[i] ?? 0;
      c.badge = { cost, satisfied: cost <= VIOLATION_EPS, stale: false };
    });
    this.runHistory.push({
      runId,
      satisfied: report.final.satisfied,
      snapshots: [...this.snapshots],
    });
    this.changed();
  }

  /** Make an intermediate snapshot's latent code the session's current one. */
  acceptSnapshot(k: number): void {
    const snapshot = this.snapshots.find((s) => s.k === k);
    if (!snapshot) {
      throw new Error(`no snapshot with k=${k} in the current run`);
    }
    this.currentZ = snapshot.z;
    this.currentLayout = snapshot.layout;
    this.changed();
  }

  /** Drop the carried latent code and change the seed: a fresh start. */
  reseed(seed: number): void {
    this.seed = seed;
    this.currentZ = null;
    this.currentLayout = null;
    this.changed();
  }
}

function describeApiError(error: ApiError): string {
  return error.field ? `${error.field}: ${error.message}` : error.message;
}

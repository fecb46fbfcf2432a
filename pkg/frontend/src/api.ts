// HTTP client for the layout service. The UI reaches the backend only
// through this module; no other file issues requests.

import type {
  ApiErrorBody,
  ConstraintDoc,
  GenerateResponse,
  OptimizeRequest,
  OptimizeResponse,
  ReportDoc,
  RunSummaryDoc,
  SnapshotDoc,
  SolveOptionsDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

export interface StreamResult {
  runId: string;
  report: ReportDoc;
}

async function errorFrom(response: Response): Promise<ApiError> {
  let message = `${response.status} ${response.statusText}`;
  let field: string | undefined;
  try {
    const body = (await response.json()) as ApiErrorBody;
    if (body?.error?.message) {
      message = body.error.message;
      field = body.error.field;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, message, field);
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) throw await errorFrom(response);
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.getJson("/api/health");
  }

  models(): Promise<{ models: Array<Record<string, unknown>> }> {
    return this.getJson("/api/models");
  }

  generate(model: string, labels: number[], seed: number): Promise<GenerateResponse> {
    return this.postJson("/api/generate", { model, labels, seed });
  }

  optimize(request: OptimizeRequest): Promise<OptimizeResponse> {
    return this.postJson("/api/optimize", { ...request, stream: false });
  }

  runs(): Promise<{ runs: RunSummaryDoc[] }> {
    return this.getJson("/api/runs");
  }

  run(runId: string): Promise<Record<string, unknown>> {
    return this.getJson(`/api/runs/${runId}`);
  }

  resume(
    runId: string,
    extraConstraints: ConstraintDoc[],
    options?: SolveOptionsDoc,
  ): Promise<OptimizeResponse> {
    const body: Record<string, unknown> = { constraints: extraConstraints };
    if (options) body.options = options;
    return this.postJson(`/api/runs/${runId}/resume`, body);
  }

  /**
   * Streaming optimize: resolves with the final report after invoking
   * onSnapshot for each outer-iteration line, in arrival order.
   */
  async optimizeStream(
    request: OptimizeRequest,
    onSnapshot: (snapshot: SnapshotDoc) => void,
  ): Promise<StreamResult> {
    const response = await fetch(this.baseUrl + "/api/optimize", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ...request, stream: true }),
    });
    if (!response.ok || !response.body) throw await errorFrom(response);

    let result: StreamResult | null = null;
    for await (const line of ndjsonLines(response.body)) {
      const message = JSON.parse(line) as { type: string } & Record<string, unknown>;
      if (message.type === "snapshot") {
        const { type, ...snapshot } = message;
        void type;
        onSnapshot(snapshot as unknown as SnapshotDoc);
      } else if (message.type === "final") {
        result = {
          runId: message.run_id as string,
          report: message.report as ReportDoc,
        };
      }
    }
    if (!result) throw new ApiError(502, "stream ended without a final report");
    return result;
  }
}

/** Split a byte stream into newline-delimited JSON lines. */
export async function* ndjsonLines(body: ReadableStream<Uint8Array>): AsyncGenerator<string> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (line) yield line;
      }
    }
    const tail = buffer.trim();
    if (tail) yield tail;
  } finally {
    reader.releaseLock();
  }
}

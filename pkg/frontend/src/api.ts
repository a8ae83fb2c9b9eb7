// Thin fetch client for the gesturelab HTTP API, plus session polling.

import type {
  GestureInfo,
  SessionRecord,
  SessionSummary,
  TrajectoryPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "UNKNOWN";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) throw await parseError(response);
    return response.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await parseError(response);
    return response.json() as Promise<T>;
  }

  async listSessions(): Promise<SessionSummary[]> {
    const body = await this.get<{ sessions: SessionSummary[] }>("/api/sessions");
    return body.sessions;
  }

  getSession(id: string): Promise<SessionRecord> {
    return this.get(`/api/sessions/${id}`);
  }

  async listGestures(): Promise<GestureInfo[]> {
    const body = await this.get<{ gestures: GestureInfo[] }>("/api/gestures");
    return body.gestures;
  }

  getTrajectory(
    id: string,
    options: { rate?: number; iteration?: number } = {},
  ): Promise<TrajectoryPayload> {
    const params = new URLSearchParams();
    if (options.rate !== undefined) params.set("rate", String(options.rate));
    if (options.iteration !== undefined) params.set("iteration", String(options.iteration));
    const query = params.size ? `?${params}` : "";
    return this.get(`/api/sessions/${id}/trajectory${query}`);
  }

  createSession(body: {
    gesture?: string;
    instruction?: string;
    backend?: string;
  }): Promise<SessionSummary> {
    return this.post("/api/sessions", body);
  }

  postFeedback(id: string, text: string, backend?: string): Promise<SessionRecord> {
    return this.post(`/api/sessions/${id}/feedback`, { text, backend });
  }

  finalize(id: string, rate?: number): Promise<{ artifacts: string[]; samples: number }> {
    return this.post(`/api/sessions/${id}/finalize`, rate === undefined ? {} : { rate });
  }

  /** Poll the session until `done(record)` holds or the timeout elapses. */
  async pollSession(
    id: string,
    done: (record: SessionRecord) => boolean,
    { intervalMs = 1000, timeoutMs = 120000 } = {},
  ): Promise<SessionRecord> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const record = await this.getSession(id);
      if (done(record)) return record;
      if (Date.now() > deadline) {
        throw new ApiError(0, "POLL_TIMEOUT", `session ${id} still ${record.status}`);
      }
      await new Promise((resolve) => setTimeout(resolve, intervalMs));
    }
  }
}

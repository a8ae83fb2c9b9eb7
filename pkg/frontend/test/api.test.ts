import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { SessionRecord, TrajectoryPayload } from "../src/types.js";
import { fixture, startFixtureServer } from "./helpers.js";

const sessionsList = fixture<{ sessions: unknown[] }>("sessions_list.json");
const sessionOk = fixture<SessionRecord>("session_ok.json");
const trajectory = fixture<TrajectoryPayload>("trajectory_ok.json");
const gestures = fixture("gestures.json");

let server: Awaited<ReturnType<typeof startFixtureServer>>;
let api: ApiClient;

beforeAll(async () => {
  server = await startFixtureServer([
    { pattern: /^\/api\/sessions$/, body: sessionsList },
    { pattern: /^\/api\/gestures$/, body: gestures },
    { pattern: new RegExp(`^/api/sessions/${sessionOk.id}$`), body: sessionOk },
    { pattern: new RegExp(`^/api/sessions/${sessionOk.id}/trajectory`), body: trajectory },
    {
      pattern: new RegExp(`^/api/sessions/${sessionOk.id}/feedback$`),
      status: 422,
      body: { error: { code: "ITERATION_LIMIT", message: "refinement limit reached: i_max=5" } },
    },
  ]);
  api = new ApiClient(server.url);
});

afterAll(async () => {
  await server.close();
});

describe("api client against fixture server", () => {
  it("lists sessions", async () => {
    const sessions = await api.listSessions();
    expect(sessions.length).toBeGreaterThanOrEqual(3);
    const statuses = new Set(sessions.map((s) => s.status));
    expect(statuses.has("failed")).toBe(true);
  });

  it("fetches a full record", async () => {
    const record = await api.getSession(sessionOk.id);
    expect(record.iterations).toHaveLength(2);
    expect(record.gesture?.name).toBe("jazz-hands");
  });

  it("fetches a trajectory with the expected shape", async () => {
    const payload = await api.getTrajectory(sessionOk.id, { rate: 50, iteration: 2 });
    expect(payload.sample_count).toBe(226);
    expect(payload.samples[0]).toHaveLength(22);
    expect(payload.joints.left).toHaveLength(226);
    expect(payload.duration).toBeCloseTo(4.5);
  });

  it("lists the ten builtin gestures", async () => {
    const list = await api.listGestures();
    expect(list).toHaveLength(10);
  });

  it("surfaces machine-readable error codes", async () => {
    const err = await api
      .postFeedback(sessionOk.id, "one more tweak")
      .then(() => null)
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(422);
    expect((err as ApiError).code).toBe("ITERATION_LIMIT");
  });

  it("raises a coded 404 for unknown resources", async () => {
    const err = await api.getSession("nope").catch((e: unknown) => e);
    expect((err as ApiError).status).toBe(404);
  });
});

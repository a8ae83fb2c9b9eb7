// Test props: a recording 2D-context fake and a local HTTP server that
// serves the checked-in fixture responses the way the real API would.

import { readFileSync } from "node:fs";
import { createServer, type Server } from "node:http";
import type { AddressInfo } from "node:net";
import { join } from "node:path";

export function fixture<T = unknown>(name: string): T {
  // node:path instead of URL: the happy-dom environment overrides globalThis.URL
  return JSON.parse(
    readFileSync(join(import.meta.dirname, "..", "fixtures", name), "utf8"),
  ) as T;
}

export class FakeContext {
  calls: { method: string; args: unknown[] }[] = [];
  strokeStyle = "";
  fillStyle = "";
  lineWidth = 0;
  lineCap = "";
  font = "";
  canvas = { width: 640, height: 420 };

  private record(method: string) {
    return (...args: unknown[]) => {
      this.calls.push({ method, args });
    };
  }

  beginPath = this.record("beginPath");
  moveTo = this.record("moveTo");
  lineTo = this.record("lineTo");
  arc = this.record("arc");
  fill = this.record("fill");
  fillRect = this.record("fillRect");
  fillText = (...args: unknown[]) => {
    this.calls.push({ method: "fillText", args: [...args, this.fillStyle] });
  };
  stroke = (...args: unknown[]) => {
    this.calls.push({ method: "stroke", args: [this.strokeStyle] });
  };

  strokesWith(color: string): boolean {
    return this.calls.some((c) => c.method === "stroke" && c.args[0] === color);
  }

  texts(): string[] {
    return this.calls.filter((c) => c.method === "fillText").map((c) => String(c.args[0]));
  }
}

interface Route {
  pattern: RegExp;
  status?: number;
  body: unknown;
}

/** Serve canned JSON bodies; later routes win ties so tests can override. */
export async function startFixtureServer(routes: Route[]): Promise<{
  url: string;
  close(): Promise<void>;
  requests: { method: string; path: string }[];
}> {
  const requests: { method: string; path: string }[] = [];
  const server: Server = createServer((request, response) => {
    const path = request.url ?? "/";
    requests.push({ method: request.method ?? "GET", path });
    const route = [...routes].reverse().find((r) => r.pattern.test(path));
    if (!route) {
      response.writeHead(404, { "Content-Type": "application/json" });
      response.end(JSON.stringify({ error: { code: "NOT_FOUND", message: path } }));
      return;
    }
    response.writeHead(route.status ?? 200, { "Content-Type": "application/json" });
    response.end(JSON.stringify(route.body));
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const address = server.address() as AddressInfo;
  return {
    url: `http://127.0.0.1:${address.port}`,
    requests,
    close: () => new Promise((resolve) => server.close(() => resolve())),
  };
}

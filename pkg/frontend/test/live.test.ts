/**
 * Tests against a live tile service: spawns `fracdom serve` (the Python
 * package must be installed) and exercises the same HTTP surface the
 * browser app uses.
 */

import { spawn } from "node:child_process";
import type { ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { panelFromError, panelFromReport } from "../src/analysis.js";
import { fetchAnalysis, fetchTileBlob, tileUrl } from "../src/api.js";
import type { FetchLike } from "../src/api.js";

const PORT = 8931 + (process.pid % 23);
const BASE = `http://127.0.0.1:${PORT}`;
const realFetch: FetchLike = (url, init) => fetch(url, init);

let server: ChildProcess;

async function waitForServer(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/palettes`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`tile service did not come up on ${BASE}: ${String(lastError)}`);
}

beforeAll(async () => {
  server = spawn("fracdom", ["serve", "--port", String(PORT), "--workers", "1"], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.on("error", (err) => {
    throw new Error(`could not spawn fracdom serve: ${String(err)}`);
  });
  await waitForServer(30_000);
}, 45_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("analysis panel against the live service", () => {
  it("shows order 2 for cos(z)-1+c", async () => {
    const result = await fetchAnalysis(realFetch, BASE, "cos(z)-1+c");
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.classification).toBe("EmbeddedMultibrot");
    expect(result.value.predicted_order).toBe(2);
    const panel = panelFromReport(result.value);
    expect(panel.headline).toBe("expect embedded z^2 + c");
  });

  it("shows order 3 for 6*(z - sin(z)) + c", async () => {
    const result = await fetchAnalysis(realFetch, BASE, "6*(z - sin(z)) + c");
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.predicted_order).toBe(3);
    expect(panelFromReport(result.value).headline).toBe("expect embedded z^3 + c");
  });

  it("shows the linear-term notice for z + c", async () => {
    const result = await fetchAnalysis(realFetch, BASE, "z + c");
    expect(result.ok).toBe(true);
    if (!result.ok) return;
    expect(result.value.classification).toBe("LinearTermBlocks");
    expect(panelFromReport(result.value).headline).toContain("linear term");
  });

  it("renders non-expandable maps as a 422 notice naming the construct", async () => {
    const result = await fetchAnalysis(realFetch, BASE, "z^0.5 + c");
    expect(result.ok).toBe(false);
    if (result.ok) return;
    expect(result.error.status).toBe(422);
    const panel = panelFromError(result.error);
    expect(panel.headline).toBe("not series-expandable");
  });
});

describe("tile endpoint against the live service", () => {
  const view = {
    expr: "z^2 + c",
    logK: Math.log(2),
    maxIter: 50,
    paletteId: "gray256",
  };
  const url = tileUrl(BASE, view, -0.5, 0, 3 / 256, 256, 256);

  it("serves a PNG tile with an ETag", async () => {
    const response = await fetch(url);
    expect(response.status).toBe(200);
    expect(response.headers.get("content-type")).toBe("image/png");
    expect(response.headers.get("etag")).toBeTruthy();
    const bytes = new Uint8Array(await response.arrayBuffer());
    expect([...bytes.slice(0, 4)]).toEqual([137, 80, 78, 71]);
  });

  it("answers 304 for a matching If-None-Match", async () => {
    const first = await fetch(url);
    const etag = first.headers.get("etag")!;
    await first.arrayBuffer();
    const second = await fetch(url, { headers: { "if-none-match": etag } });
    expect(second.status).toBe(304);
  });

  it("reports expression errors as 400 values the banner can show", async () => {
    const bad = tileUrl(BASE, { ...view, expr: "z^^2" }, 0, 0, 0.01, 64, 64);
    const result = await fetchTileBlob(realFetch, bad);
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.error.status).toBe(400);
      expect(result.error.offset).toBe(2);
    }
  });
});

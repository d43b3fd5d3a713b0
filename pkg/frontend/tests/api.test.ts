import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("Client", () => {
  afterEach(() => vi.restoreAllMocks());

  it("posts labels as a bare json array to the labels endpoint", async () => {
    const mock = vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse(200, { accepted: true, iteration: 1, status: "awaiting_labels", metrics: {} }),
    );
    const client = new Client("http://svc:8000/");
    await client.postLabels("abc", [
      { id: "s1", label: 1 },
      { id: "s2", label: 0 },
    ]);
    const [url, init] = mock.mock.calls[0];
    expect(url).toBe("http://svc:8000/sessions/abc/labels");
    expect(init?.method).toBe("POST");
    expect(JSON.parse(init?.body as string)).toEqual([
      { id: "s1", label: 1 },
      { id: "s2", label: 0 },
    ]);
  });

  it("maps 409 bodies onto ApiError with stale-display details", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse(409, {
        code: "label_mismatch",
        message: "labels must cover the current display exactly",
        details: { missing: ["s9"], extra: ["s1"] },
      }),
    );
    const client = new Client("http://svc:8000");
    const err = await client.postLabels("abc", []).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.isStaleDisplay).toBe(true);
    expect(err.isFinished).toBe(false);
    expect(err.details.missing).toEqual(["s9"]);
  });

  it("maps 410 onto the finished flag", async () => {
    vi.spyOn(globalThis, "fetch").mockResolvedValue(
      jsonResponse(410, { code: "session_finished", message: "done" }),
    );
    const client = new Client("http://svc:8000");
    const err = await client.postLabels("abc", []).catch((e) => e);
    expect(err.isFinished).toBe(true);
  });

  it("builds file urls off the base", () => {
    const client = new Client("http://svc:8000");
    expect(client.fileUrl("imgs/p1_t0.png")).toBe("http://svc:8000/files/imgs/p1_t0.png");
  });

  it("fetches display and metrics from their endpoints", async () => {
    const mock = vi
      .spyOn(globalThis, "fetch")
      .mockImplementation(() => Promise.resolve(jsonResponse(200, { iteration: 0 })));
    const client = new Client("http://svc:8000");
    await client.getDisplay("xyz");
    await client.getMetrics("xyz");
    expect(mock.mock.calls.map((c) => c[0])).toEqual([
      "http://svc:8000/sessions/xyz/display",
      "http://svc:8000/sessions/xyz/metrics",
    ]);
  });
});

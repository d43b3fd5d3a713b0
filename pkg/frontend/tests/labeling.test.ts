import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client, DisplayView, MetricsView, SubmitResult } from "../src/api.js";
import { LabelingView } from "../src/labeling.js";

function display(iteration: number, ids: string[], total = 4): DisplayView {
  return {
    iteration,
    status: "awaiting_labels",
    display_size: ids.length,
    total_iterations: total,
    items: ids.map((id) => ({ id, image_refs: null, features: [0.5, -0.5] })),
  };
}

function metrics(iteration: number): MetricsView {
  return {
    iteration,
    status: "awaiting_labels",
    strategy: "rl",
    evaluation_enabled: true,
    history: [],
    sampling_rates: [1.2],
    action_history: [],
    eer_curve: [44.0],
    q_values: [{ action: [0, 0, 1], name: "rep", q: 1, count: 0 }],
  };
}

function submitResult(iteration: number, status = "awaiting_labels"): SubmitResult {
  return { accepted: true, iteration, status, metrics: metrics(iteration) };
}

class FakeStorage {
  data = new Map<string, string>();
  getItem(k: string) { return this.data.get(k) ?? null; }
  setItem(k: string, v: string) { this.data.set(k, v); }
  removeItem(k: string) { this.data.delete(k); }
}

function makeClient(overrides: Partial<Record<keyof Client, unknown>> = {}): Client {
  return {
    baseUrl: "http://test",
    getDisplay: vi.fn().mockResolvedValue(display(0, ["a", "b"])),
    getMetrics: vi.fn().mockResolvedValue(metrics(0)),
    postLabels: vi.fn().mockResolvedValue(submitResult(1)),
    createSession: vi.fn(),
    fileUrl: (ref: string) => `http://test/files/${ref}`,
    ...overrides,
  } as unknown as Client;
}

function clickLabel(root: HTMLElement, id: string, cls: string): void {
  const item = root.querySelector(`.display-item[data-id="${id}"] .${cls}`) as HTMLElement;
  item.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

describe("LabelingView", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app") as HTMLElement;
  });

  it("renders the display and enables submit only when all items are labeled", async () => {
    const view = new LabelingView(root, makeClient(), "sess");
    await view.start();
    expect(root.querySelectorAll(".display-item")).toHaveLength(2);
    const btn = root.querySelector(".submit-btn") as HTMLButtonElement;
    expect(btn.disabled).toBe(true);

    clickLabel(root, "a", "label-change");
    expect(btn.disabled).toBe(true);
    clickLabel(root, "b", "label-nochange");
    expect(btn.disabled).toBe(false);
    expect(root.querySelector('[data-id="a"]')?.classList.contains("labeled-change")).toBe(true);
    expect(root.querySelector('[data-id="b"]')?.classList.contains("labeled-nochange")).toBe(true);
  });

  it("labels via keyboard shortcuts c and n", async () => {
    const view = new LabelingView(root, makeClient(), "sess");
    await view.start();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "c" }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "n" }));
    expect(root.querySelector('[data-id="a"]')?.classList.contains("labeled-change")).toBe(true);
    expect(root.querySelector('[data-id="b"]')?.classList.contains("labeled-nochange")).toBe(true);
    expect((root.querySelector(".submit-btn") as HTMLButtonElement).disabled).toBe(false);
    view.dispose();
  });

  it("submits exactly the display ids and renders the next display", async () => {
    const postLabels = vi.fn().mockResolvedValue(submitResult(1));
    const getDisplay = vi
      .fn()
      .mockResolvedValueOnce(display(0, ["a", "b"]))
      .mockResolvedValueOnce(display(1, ["c", "d"]));
    const view = new LabelingView(root, makeClient({ postLabels, getDisplay }), "sess");
    await view.start();
    clickLabel(root, "a", "label-change");
    clickLabel(root, "b", "label-nochange");
    await view.submit();

    expect(postLabels).toHaveBeenCalledWith("sess", [
      { id: "a", label: 1 },
      { id: "b", label: 0 },
    ]);
    expect(root.querySelector(".iteration-counter")?.textContent).toContain("display 2 of 4");
    expect(root.querySelector(".metrics-panel")?.innerHTML).toContain("eer-curve");
  });

  it("recovers from a stale display through the 409 path", async () => {
    const postLabels = vi
      .fn()
      .mockRejectedValueOnce(new ApiError(409, "label_mismatch", "stale", { missing: ["x"] }));
    const getDisplay = vi
      .fn()
      .mockResolvedValueOnce(display(1, ["a", "b"]))
      .mockResolvedValueOnce(display(2, ["x", "y"]));
    const view = new LabelingView(root, makeClient({ postLabels, getDisplay }), "sess");
    await view.start();
    clickLabel(root, "a", "label-change");
    clickLabel(root, "b", "label-change");
    await view.submit();

    // refetched the real current display and told the user
    expect(getDisplay).toHaveBeenCalledTimes(2);
    expect(root.querySelectorAll(".display-item")).toHaveLength(2);
    expect(root.querySelector('[data-id="x"]')).not.toBeNull();
    expect(root.querySelector(".notice")?.textContent).toContain("please relabel");
  });

  it("keeps unsent labels in storage when the network fails", async () => {
    const storage = new FakeStorage();
    const postLabels = vi.fn().mockRejectedValue(new TypeError("fetch failed"));
    const view = new LabelingView(root, makeClient({ postLabels }), "sess", storage);
    await view.start();
    clickLabel(root, "a", "label-change");
    clickLabel(root, "b", "label-nochange");
    await view.submit();

    expect(root.querySelector(".notice")?.textContent).toContain("kept locally");
    const stored = JSON.parse(storage.getItem("displaylab:sess:0") as string);
    expect(stored).toEqual({ a: 1, b: 0 });
  });

  it("shows the summary with final metrics once the session completes", async () => {
    const finalMetrics: MetricsView = { ...metrics(4), status: "none", eer_curve: [40, 20, 10, 5.5] };
    const postLabels = vi.fn().mockResolvedValue({
      accepted: true, iteration: 4, status: "none", metrics: finalMetrics,
    });
    const getMetrics = vi.fn().mockResolvedValue(finalMetrics);
    const view = new LabelingView(root, makeClient({ postLabels, getMetrics }), "sess");
    await view.start();
    clickLabel(root, "a", "label-change");
    clickLabel(root, "b", "label-nochange");
    await view.submit();

    expect(root.querySelector(".summary")).not.toBeNull();
    expect(root.querySelector(".final-eer")?.textContent).toContain("5.50%");
  });
});

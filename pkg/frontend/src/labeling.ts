// The labeling loop: show the current display, collect change / no-change
// decisions (buttons or c / n shortcuts), submit exactly the fetched ids,
// then render the next display plus refreshed metrics.

import { ApiError, Client, DisplayView } from "./api.js";
import { metricsPanelHtml } from "./charts.js";
import { featureGlyphSvg } from "./glyphs.js";
import { Label, LabelDraft } from "./state.js";

interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class LabelingView {
  private draft: LabelDraft | null = null;
  private display: DisplayView | null = null;
  private activeId: string | null = null;
  private keyHandler = (e: KeyboardEvent) => this.onKey(e);

  constructor(
    private readonly root: HTMLElement,
    private readonly client: Client,
    readonly sessionId: string,
    private readonly storage: StorageLike | null = null,
  ) {}

  async start(): Promise<void> {
    this.root.ownerDocument.addEventListener("keydown", this.keyHandler);
    await this.refreshDisplay();
    await this.refreshMetrics();
  }

  dispose(): void {
    this.root.ownerDocument.removeEventListener("keydown", this.keyHandler);
  }

  async refreshDisplay(): Promise<void> {
    const display = await this.client.getDisplay(this.sessionId);
    this.display = display;
    if (display.status === "none") {
      await this.renderSummary();
      return;
    }
    this.draft = new LabelDraft(this.sessionId, display.iteration, display, this.storage);
    this.activeId = this.draft.firstUnlabeled();
    this.render();
  }

  private async refreshMetrics(): Promise<void> {
    try {
      const metrics = await this.client.getMetrics(this.sessionId);
      const panel = this.root.querySelector(".metrics-panel");
      if (panel) panel.innerHTML = metricsPanelHtml(metrics);
    } catch {
      // metrics are advisory; the labeling flow continues without them
    }
  }

  private notice(text: string, kind: "info" | "error" = "info"): void {
    const el = this.root.querySelector(".notice");
    if (el) {
      el.textContent = text;
      el.className = `notice notice-${kind}`;
    }
  }

  private pairHtml(item: DisplayView["items"][number]): string {
    if (item.image_refs) {
      const [before, after] = item.image_refs;
      return `<div class="pair">
        <img class="patch patch-before" src="${this.client.fileUrl(before)}" alt="before">
        <img class="patch patch-after" src="${this.client.fileUrl(after)}" alt="after">
      </div>`;
    }
    return `<div class="pair pair-glyph">${featureGlyphSvg(item.features)}</div>`;
  }

  private render(): void {
    const display = this.display;
    const draft = this.draft;
    if (!display || !draft) return;
    const items = display.items
      .map(
        (item) => `
      <div class="display-item" data-id="${item.id}">
        ${this.pairHtml(item)}
        <div class="choice">
          <button type="button" class="label-change">change (c)</button>
          <button type="button" class="label-nochange">no change (n)</button>
        </div>
      </div>`,
      )
      .join("");
    this.root.innerHTML = `
      <div class="labeling">
        <div class="status-bar">
          <span class="iteration-counter">display ${display.iteration + 1} of ${display.total_iterations}</span>
          <span class="progress"></span>
          <span class="notice"></span>
        </div>
        <div class="display-grid">${items}</div>
        <button type="button" class="submit-btn" disabled>submit labels</button>
        <div class="metrics-panel"></div>
      </div>`;

    for (const el of this.root.querySelectorAll<HTMLElement>(".display-item")) {
      const id = el.dataset.id as string;
      el.querySelector(".label-change")?.addEventListener("click", () => this.setLabel(id, 1));
      el.querySelector(".label-nochange")?.addEventListener("click", () => this.setLabel(id, 0));
      el.addEventListener("click", () => {
        this.activeId = id;
        this.syncDom();
      });
    }
    this.root.querySelector(".submit-btn")?.addEventListener("click", () => void this.submit());
    this.syncDom();
  }

  setLabel(id: string, label: Label): void {
    if (!this.draft) return;
    this.draft.setLabel(id, label);
    this.activeId = this.draft.firstUnlabeled();
    this.syncDom();
  }

  private onKey(e: KeyboardEvent): void {
    if (!this.draft || !this.display) return;
    const key = e.key.toLowerCase();
    if (key !== "c" && key !== "n") return;
    const target = this.activeId ?? this.draft.firstUnlabeled();
    if (!target) return;
    this.setLabel(target, key === "c" ? 1 : 0);
  }

  private syncDom(): void {
    const draft = this.draft;
    if (!draft) return;
    for (const el of this.root.querySelectorAll<HTMLElement>(".display-item")) {
      const id = el.dataset.id as string;
      el.classList.toggle("labeled-change", draft.get(id) === 1);
      el.classList.toggle("labeled-nochange", draft.get(id) === 0);
      el.classList.toggle("active", id === this.activeId);
    }
    const progress = this.root.querySelector(".progress");
    if (progress) progress.textContent = `${draft.labeledCount}/${draft.total} labeled`;
    const btn = this.root.querySelector<HTMLButtonElement>(".submit-btn");
    if (btn) btn.disabled = !draft.allLabeled();
  }

  async submit(): Promise<void> {
    const draft = this.draft;
    if (!draft || !draft.allLabeled()) return;
    try {
      const result = await this.client.postLabels(this.sessionId, draft.toSubmission());
      draft.clear();
      if (result.status === "none") {
        await this.renderSummary(result.metrics && metricsPanelHtml(result.metrics));
        return;
      }
      await this.refreshDisplay();
      const panel = this.root.querySelector(".metrics-panel");
      if (panel && result.metrics) panel.innerHTML = metricsPanelHtml(result.metrics);
      this.notice(`labels accepted, iteration ${result.iteration}`);
    } catch (err) {
      if (err instanceof ApiError && err.isStaleDisplay) {
        draft.clear();
        await this.refreshDisplay();
        await this.refreshMetrics();
        this.notice(
          "this display was already labeled elsewhere; fetched the current one - please relabel",
          "error",
        );
      } else if (err instanceof ApiError && err.isFinished) {
        await this.renderSummary();
      } else {
        // network trouble: the draft stays in storage, nothing is lost
        this.notice("submission failed; your labels are kept locally - retry when back online", "error");
      }
    }
  }

  private async renderSummary(panelHtml?: string | null): Promise<void> {
    let metricsHtml = panelHtml ?? "";
    let finalLine = "";
    try {
      const metrics = await this.client.getMetrics(this.sessionId);
      metricsHtml = metricsPanelHtml(metrics);
      const lastEer = metrics.eer_curve?.at(-1);
      finalLine =
        lastEer != null
          ? `final EER ${Number(lastEer).toFixed(2)}%`
          : "evaluation disabled for this session";
    } catch {
      // keep whatever panel we already had
    }
    this.root.innerHTML = `
      <div class="summary">
        <h2>session complete</h2>
        <p class="final-eer">${finalLine}</p>
        <div class="metrics-panel">${metricsHtml}</div>
      </div>`;
  }
}

// Pending label choices for the display currently on screen.
//
// The draft never invents ids: submissions are built strictly from the ids of
// the display it was created for. Unsent choices are mirrored into storage so
// a network failure or reload loses nothing (the server stays the source of
// truth for everything already submitted).

import type { DisplayView } from "./api.js";

export type Label = 0 | 1;

interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class LabelDraft {
  private choices = new Map<string, Label>();
  private readonly ids: string[];

  constructor(
    readonly sessionId: string,
    readonly iteration: number,
    display: DisplayView,
    private readonly storage: StorageLike | null = null,
  ) {
    this.ids = display.items.map((item) => item.id);
    this.restore();
  }

  private get storageKey(): string {
    return `displaylab:${this.sessionId}:${this.iteration}`;
  }

  has(id: string): boolean {
    return this.choices.has(id);
  }

  get(id: string): Label | undefined {
    return this.choices.get(id);
  }

  setLabel(id: string, label: Label): void {
    if (!this.ids.includes(id)) {
      throw new Error(`id ${id} is not part of the current display`);
    }
    this.choices.set(id, label);
    this.persist();
  }

  get labeledCount(): number {
    return this.choices.size;
  }

  get total(): number {
    return this.ids.length;
  }

  allLabeled(): boolean {
    return this.ids.every((id) => this.choices.has(id));
  }

  firstUnlabeled(): string | null {
    return this.ids.find((id) => !this.choices.has(id)) ?? null;
  }

  // exact display coverage, in display order; only valid once complete
  toSubmission(): { id: string; label: Label }[] {
    if (!this.allLabeled()) {
      throw new Error("submission requires a label for every display item");
    }
    return this.ids.map((id) => ({ id, label: this.choices.get(id) as Label }));
  }

  persist(): void {
    if (!this.storage) return;
    this.storage.setItem(
      this.storageKey,
      JSON.stringify(Object.fromEntries(this.choices)),
    );
  }

  restore(): void {
    if (!this.storage) return;
    const raw = this.storage.getItem(this.storageKey);
    if (!raw) return;
    try {
      const parsed = JSON.parse(raw) as Record<string, Label>;
      for (const [id, label] of Object.entries(parsed)) {
        if (this.ids.includes(id) && (label === 0 || label === 1)) {
          this.choices.set(id, label);
        }
      }
    } catch {
      this.storage.removeItem(this.storageKey);
    }
  }

  clear(): void {
    this.choices.clear();
    if (this.storage) this.storage.removeItem(this.storageKey);
  }
}

export interface SetupValues {
  mode: "synthetic" | "dataset";
  datasetPath: string;
  nSamples: number;
  positiveFraction: number;
  seed: number;
  strategy: string;
  displaySize: number;
  iterations: number;
  trainFraction: number;
}

// client-side mirror of the session invariants; the server re-validates
export function validateSetup(v: SetupValues): string[] {
  const problems: string[] = [];
  if (v.displaySize < 1) problems.push("display size must be at least 1");
  if (v.iterations < 1) problems.push("iterations must be at least 1");
  if (!(v.trainFraction > 0 && v.trainFraction < 1)) {
    problems.push("train fraction must lie strictly between 0 and 1");
  }
  if (v.mode === "synthetic") {
    if (v.nSamples < 2) problems.push("sample count must be at least 2");
    if (!(v.positiveFraction > 0 && v.positiveFraction < 1)) {
      problems.push("positive fraction must lie strictly between 0 and 1");
    }
    const trainSize = Math.round(v.nSamples * v.trainFraction);
    if (v.displaySize * v.iterations > trainSize) {
      problems.push(
        `label budget ${v.displaySize}x${v.iterations} exceeds the ~${trainSize}-sample train split`,
      );
    }
  } else if (!v.datasetPath.trim()) {
    problems.push("dataset path is required");
  }
  return problems;
}

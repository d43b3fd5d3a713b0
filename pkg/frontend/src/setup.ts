// Session setup form. Mirrors the server-side config invariants client-side
// so obvious mistakes surface inline before any request is made.

import { Client, CreateSessionBody } from "./api.js";
import { SetupValues, validateSetup } from "./state.js";

const STRATEGIES = [
  "rl", "flat", "rep", "div", "amb", "rep+div", "rep+amb", "div+amb",
  "random", "maxmin", "uncertainty",
];

export class SetupForm {
  constructor(
    private readonly root: HTMLElement,
    private readonly client: Client,
    private readonly onCreated: (sessionId: string) => void,
  ) {}

  render(): void {
    const options = STRATEGIES.map((s) => `<option value="${s}">${s}</option>`).join("");
    this.root.innerHTML = `
      <form class="setup-form">
        <h2>new labeling session</h2>
        <label>source
          <select name="mode">
            <option value="synthetic">synthetic pool</option>
            <option value="dataset">dataset file on server</option>
          </select>
        </label>
        <label class="dataset-only hidden">dataset path <input name="datasetPath" type="text"></label>
        <label class="synthetic-only">samples <input name="nSamples" type="number" value="2000"></label>
        <label class="synthetic-only">positive fraction <input name="positiveFraction" type="number" step="0.01" value="0.02"></label>
        <label>strategy <select name="strategy">${options}</select></label>
        <label>display size <input name="displaySize" type="number" value="8"></label>
        <label>iterations <input name="iterations" type="number" value="10"></label>
        <label>seed <input name="seed" type="number" value="0"></label>
        <label>train fraction <input name="trainFraction" type="number" step="0.05" value="0.5"></label>
        <ul class="form-errors"></ul>
        <button type="submit" class="create-btn">start session</button>
      </form>`;

    const form = this.root.querySelector("form") as HTMLFormElement;
    form.querySelector('[name="mode"]')?.addEventListener("change", () => {
      const mode = this.values().mode;
      form.querySelector(".dataset-only")?.classList.toggle("hidden", mode !== "dataset");
      for (const el of form.querySelectorAll(".synthetic-only")) {
        el.classList.toggle("hidden", mode !== "synthetic");
      }
    });
    form.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.submit();
    });
  }

  values(): SetupValues {
    const get = (name: string): string =>
      (this.root.querySelector(`[name="${name}"]`) as HTMLInputElement | HTMLSelectElement)
        ?.value ?? "";
    return {
      mode: get("mode") === "dataset" ? "dataset" : "synthetic",
      datasetPath: get("datasetPath"),
      nSamples: Number(get("nSamples")),
      positiveFraction: Number(get("positiveFraction")),
      seed: Number(get("seed")),
      strategy: get("strategy") || "rl",
      displaySize: Number(get("displaySize")),
      iterations: Number(get("iterations")),
      trainFraction: Number(get("trainFraction")),
    };
  }

  showErrors(problems: string[]): void {
    const list = this.root.querySelector(".form-errors");
    if (list) {
      list.innerHTML = problems.map((p) => `<li class="form-error">${p}</li>`).join("");
    }
  }

  async submit(): Promise<void> {
    const v = this.values();
    const problems = validateSetup(v);
    this.showErrors(problems);
    if (problems.length > 0) return;

    const body: CreateSessionBody = {
      config: {
        strategy: v.strategy,
        display_size: v.displaySize,
        iterations: v.iterations,
        seed: v.seed,
      },
      train_fraction: v.trainFraction,
    };
    if (v.mode === "synthetic") {
      body.synthetic = {
        n_samples: v.nSamples,
        positive_fraction: v.positiveFraction,
        seed: v.seed,
      };
    } else {
      body.dataset = { path: v.datasetPath };
    }
    try {
      const meta = await this.client.createSession(body);
      this.onCreated(meta.session_id);
    } catch (err) {
      this.showErrors([err instanceof Error ? err.message : String(err)]);
    }
  }
}

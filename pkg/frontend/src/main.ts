// App wiring: setup form -> labeling loop, one session per tab.

import { Client } from "./api.js";
import { LabelingView } from "./labeling.js";
import { SetupForm } from "./setup.js";

interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface App {
  client: Client;
  currentView: () => SetupForm | LabelingView;
}

export function mountApp(
  root: HTMLElement,
  client: Client,
  storage: StorageLike | null = null,
): App {
  let view: SetupForm | LabelingView;

  const openSession = (sessionId: string) => {
    const labeling = new LabelingView(root, client, sessionId, storage);
    view = labeling;
    void labeling.start();
  };

  const setup = new SetupForm(root, client, openSession);
  view = setup;
  setup.render();

  return { client, currentView: () => view };
}

export function defaultApiBase(loc: { origin: string; search: string }): string {
  const params = new URLSearchParams(loc.search);
  return params.get("api") ?? loc.origin;
}

// Typed client for the labeling service. All UI traffic goes through here.

export interface DisplayItem {
  id: string;
  image_refs: [string, string] | null;
  features: number[];
}

export interface DisplayView {
  iteration: number;
  status: "awaiting_labels" | "none";
  display_size: number;
  total_iterations: number;
  items: DisplayItem[];
}

export interface QValue {
  action: number[];
  name: string;
  q: number;
  count: number;
}

export interface HistoryRow {
  iteration: number;
  display_ids: string[];
  strategy: string;
  action: number[] | null;
  reward: number | null;
  eer_percent?: number | null;
  eer_sweep_percent?: number | null;
  sampling_percent: number;
}

export interface MetricsView {
  iteration: number;
  status: string;
  strategy: string;
  evaluation_enabled: boolean;
  history: HistoryRow[];
  sampling_rates: number[];
  action_history: { iteration: number; action: number[] | null }[];
  eer_curve?: (number | null)[];
  q_values?: QValue[];
  epsilon?: number;
}

export interface SessionMeta {
  session_id: string;
  created_at: string;
  config: Record<string, unknown>;
}

export interface SyntheticSpecBody {
  n_samples: number;
  positive_fraction: number;
  n_modes_per_class?: number;
  feature_dim?: number;
  mode_spread?: number;
  within_mode_noise?: number;
  seed?: number;
}

export interface CreateSessionBody {
  dataset?: { path: string; format?: string };
  synthetic?: SyntheticSpecBody;
  config: {
    strategy: string;
    display_size: number;
    iterations: number;
    seed?: number;
    n_clusters?: number | null;
    evaluation_enabled?: boolean | null;
  };
  train_fraction?: number;
}

export interface SubmitResult {
  accepted: boolean;
  iteration: number;
  status: string;
  metrics: MetricsView;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isStaleDisplay(): boolean {
    return this.status === 409;
  }

  get isFinished(): boolean {
    return this.status === 410;
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = "error";
  let message = `${resp.status} ${resp.statusText}`;
  let details: Record<string, unknown> = {};
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? JSON.stringify(body);
    details = body.details ?? {};
  } catch {
    // non-json error body; keep the status line
  }
  return new ApiError(resp.status, code, message, details);
}

export class Client {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.url(path), {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionMeta> {
    return this.request("/sessions", { method: "POST", body: JSON.stringify(body) });
  }

  getDisplay(sessionId: string): Promise<DisplayView> {
    return this.request(`/sessions/${sessionId}/display`);
  }

  postLabels(
    sessionId: string,
    labels: { id: string; label: 0 | 1 }[],
  ): Promise<SubmitResult> {
    return this.request(`/sessions/${sessionId}/labels`, {
      method: "POST",
      body: JSON.stringify(labels),
    });
  }

  getMetrics(sessionId: string): Promise<MetricsView> {
    return this.request(`/sessions/${sessionId}/metrics`);
  }

  fileUrl(ref: string): string {
    return this.url(`/files/${ref}`);
  }
}

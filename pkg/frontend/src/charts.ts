// Small hand-rolled SVG renderers for the metrics panel. Inputs come straight
// from the metrics endpoint; everything here is pure string building so the
// views are trivially testable.

import type { MetricsView, QValue } from "./api.js";

const W = 420;
const H = 160;
const PAD = 28;

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function eerCurveSvg(values: (number | null)[]): string {
  const points = values
    .map((v, i) => ({ x: i + 1, y: v }))
    .filter((p): p is { x: number; y: number } => p.y != null);
  if (points.length === 0) {
    return `<svg class="eer-curve" viewBox="0 0 ${W} ${H}"><text x="10" y="20">no evaluation data</text></svg>`;
  }
  const maxY = Math.max(50, ...points.map((p) => p.y));
  const n = Math.max(points.length, 2);
  const sx = (x: number) => PAD + ((x - 1) / (n - 1)) * (W - 2 * PAD);
  const sy = (y: number) => H - PAD - (y / maxY) * (H - 2 * PAD);
  const path = points.map((p, i) => `${i ? "L" : "M"}${sx(p.x).toFixed(1)},${sy(p.y).toFixed(1)}`).join(" ");
  const dots = points
    .map((p) => `<circle cx="${sx(p.x).toFixed(1)}" cy="${sy(p.y).toFixed(1)}" r="3"><title>iter ${p.x}: ${p.y.toFixed(2)}%</title></circle>`)
    .join("");
  return `<svg class="eer-curve" viewBox="0 0 ${W} ${H}" role="img" aria-label="error curve">
    <line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" stroke="#999"/>
    <line x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${H - PAD}" stroke="#999"/>
    <text x="${PAD}" y="14" class="axis">EER %</text>
    <path d="${path}" fill="none" stroke="#2563eb" stroke-width="2"/>
    ${dots}
  </svg>`;
}

export function qBarsSvg(qValues: QValue[]): string {
  const bw = (W - 2 * PAD) / Math.max(qValues.length, 1);
  const bars = qValues
    .map((qv, i) => {
      const h = Math.max(1, qv.q * (H - 2 * PAD));
      const x = PAD + i * bw;
      const y = H - PAD - h;
      return `<g class="q-bar" data-action="${esc(qv.name)}">
        <rect x="${(x + 3).toFixed(1)}" y="${y.toFixed(1)}" width="${(bw - 6).toFixed(1)}" height="${h.toFixed(1)}" fill="#059669">
          <title>${esc(qv.name)}: q=${qv.q.toFixed(3)}, pulls=${qv.count}</title>
        </rect>
        <text x="${(x + bw / 2).toFixed(1)}" y="${H - PAD + 14}" text-anchor="middle" class="label">${esc(qv.name)}</text>
      </g>`;
    })
    .join("");
  return `<svg class="q-bars" viewBox="0 0 ${W} ${H}" role="img" aria-label="action values">
    <line x1="${PAD}" y1="${H - PAD}" x2="${W - PAD}" y2="${H - PAD}" stroke="#999"/>
    <text x="${PAD}" y="14" class="axis">q per action</text>
    ${bars}
  </svg>`;
}

export function actionTimelineHtml(metrics: MetricsView): string {
  const rows = metrics.action_history
    .map((entry) => {
      const name =
        entry.action == null
          ? "random start"
          : metrics.q_values?.find(
              (qv) => JSON.stringify(qv.action) === JSON.stringify(entry.action),
            )?.name ?? `(${entry.action.join(",")})`;
      const hist = metrics.history[entry.iteration - 1];
      const reward = hist?.reward == null ? "" : ` reward ${hist.reward.toFixed(2)}`;
      return `<li class="action-step">iter ${entry.iteration}: <strong>${esc(name)}</strong>${reward}</li>`;
    })
    .join("");
  return `<ol class="action-timeline">${rows}</ol>`;
}

export function metricsPanelHtml(metrics: MetricsView): string {
  const samp = metrics.sampling_rates.at(-1);
  const parts = [
    `<div class="metrics-summary">iteration ${metrics.iteration}` +
      (samp != null ? `, labeled ${samp.toFixed(2)}% of train` : "") +
      `</div>`,
  ];
  if (metrics.eer_curve) {
    parts.push(eerCurveSvg(metrics.eer_curve));
  }
  if (metrics.q_values) {
    parts.push(qBarsSvg(metrics.q_values));
  }
  parts.push(actionTimelineHtml(metrics));
  return parts.join("\n");
}

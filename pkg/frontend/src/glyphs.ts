// Feature glyphs stand in for patch imagery on datasets without image refs
// (synthetic sessions stay fully drivable).

export function featureGlyphSvg(features: number[], width = 120, height = 80): string {
  if (features.length === 0) {
    return `<svg class="glyph" viewBox="0 0 ${width} ${height}"></svg>`;
  }
  const maxAbs = Math.max(1e-9, ...features.map((v) => Math.abs(v)));
  const bw = width / features.length;
  const mid = height / 2;
  const bars = features
    .map((v, i) => {
      const h = (Math.abs(v) / maxAbs) * (mid - 4);
      const y = v >= 0 ? mid - h : mid;
      const fill = v >= 0 ? "#2563eb" : "#dc2626";
      return `<rect x="${(i * bw + 1).toFixed(1)}" y="${y.toFixed(1)}" width="${(bw - 2).toFixed(1)}" height="${Math.max(h, 0.5).toFixed(1)}" fill="${fill}"><title>f${i} = ${v.toFixed(3)}</title></rect>`;
    })
    .join("");
  return `<svg class="glyph" viewBox="0 0 ${width} ${height}" role="img" aria-label="feature glyph">
    <line x1="0" y1="${mid}" x2="${width}" y2="${mid}" stroke="#ccc"/>
    ${bars}
  </svg>`;
}

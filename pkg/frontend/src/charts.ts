/** SVG chart builders as pure string functions, so they unit-test without
 * a DOM and render by assignment to innerHTML. */

import type { BipartiteEdge, TrendPoint } from "./logic.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function trendChart(points: TrendPoint[], width = 520, height = 220): string {
  const pad = 36;
  const plotW = width - 2 * pad;
  const plotH = height - 2 * pad;
  const n = points.length;
  const x = (i: number) => pad + (n <= 1 ? plotW / 2 : (i / (n - 1)) * plotW);
  const y = (rate: number) => pad + (1 - rate) * plotH;

  const path = (key: "r_c" | "r_m") =>
    points.map((p, i) => `${i === 0 ? "M" : "L"}${x(i).toFixed(1)},${y(p[key]).toFixed(1)}`).join(" ");
  const dots = (key: "r_c" | "r_m", cls: string) =>
    points
      .map(
        (p, i) =>
          `<circle class="${cls}" cx="${x(i).toFixed(1)}" cy="${y(p[key]).toFixed(1)}" r="3.5">` +
          `<title>round ${p.round}: ${key}=${p[key]}</title></circle>`,
      )
      .join("");

  const gridlines = [0, 0.25, 0.5, 0.75, 1]
    .map(
      (g) =>
        `<line class="grid" x1="${pad}" y1="${y(g)}" x2="${width - pad}" y2="${y(g)}"/>` +
        `<text class="axis" x="${pad - 6}" y="${y(g) + 4}" text-anchor="end">${g}</text>`,
    )
    .join("");
  const labels = points
    .map((p, i) => `<text class="axis" x="${x(i)}" y="${height - pad + 16}" text-anchor="middle">${p.round}</text>`)
    .join("");

  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="coverage trend">` +
    gridlines +
    labels +
    (n > 1 ? `<path class="line-rc" d="${path("r_c")}"/><path class="line-rm" d="${path("r_m")}"/>` : "") +
    dots("r_c", "dot-rc") +
    dots("r_m", "dot-rm") +
    `<text class="legend line-rc-text" x="${pad}" y="16">r_c</text>` +
    `<text class="legend line-rm-text" x="${pad + 40}" y="16">r_m</text>` +
    `</svg>`
  );
}

export function bipartiteChart(edges: BipartiteEdge[], width = 680): string {
  const categories = [...new Set(edges.map((e) => e.category))];
  const modules = [...new Set(edges.map((e) => e.module))];
  const rowGap = 26;
  const pad = 20;
  const height = pad * 2 + Math.max(categories.length, modules.length, 1) * rowGap;
  const catY = (c: string) => pad + categories.indexOf(c) * rowGap + rowGap / 2;
  const modY = (m: string) => pad + modules.indexOf(m) * rowGap + rowGap / 2;
  const leftX = 170;
  const rightX = width - 170;

  const lines = edges
    .map(
      (e) =>
        `<line class="edge edge-${e.kind}" x1="${leftX}" y1="${catY(e.category)}" ` +
        `x2="${rightX}" y2="${modY(e.module)}"><title>${esc(e.category)} — ${esc(e.module)}</title></line>`,
    )
    .join("");
  const catLabels = categories
    .map((c) => `<text class="node" x="${leftX - 8}" y="${catY(c) + 4}" text-anchor="end">${esc(c)}</text>`)
    .join("");
  const modLabels = modules
    .map((m) => `<text class="node" x="${rightX + 8}" y="${modY(m) + 4}">${esc(m)}</text>`)
    .join("");

  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="category-module adjacency">` +
    lines +
    catLabels +
    modLabels +
    `</svg>`
  );
}

/**
 * Self-contained SVG line-chart renderer: one polyline per learner,
 * point markers at group means, vertical error bars of one standard
 * error each way, labeled axes, and a legend.
 *
 * Every point element carries data-learner/data-x/data-mean/data-se
 * attributes with full-precision values, so a rendered figure can be
 * audited against the source CSV without reparsing coordinates.
 */

import type { Series } from "./aggregate.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  title?: string;
}

const PALETTE = [
  "#2563eb",
  "#dc2626",
  "#059669",
  "#9333ea",
  "#d97706",
  "#0891b2",
];

const MARGIN = { top: 36, right: 168, bottom: 52, left: 68 };

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function formatTick(value: number): string {
  if (Number.isInteger(value)) {
    return String(value);
  }
  const rounded = Number(value.toPrecision(4));
  return String(rounded);
}

interface Scale {
  (value: number): number;
  domain: [number, number];
}

function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) =>
    r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

function yDomain(series: Series[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      lo = Math.min(lo, p.mean - p.se);
      hi = Math.max(hi, p.mean + p.se);
    }
  }
  if (lo >= 0 && hi <= 1) {
    return [0, 1]; // score-like data gets the full unit interval
  }
  const pad = (hi - lo || Math.abs(hi) || 1) * 0.08;
  return [lo - pad, hi + pad];
}

function yTicks(domain: [number, number]): number[] {
  const [lo, hi] = domain;
  const ticks = [];
  for (let i = 0; i <= 4; i++) {
    ticks.push(lo + ((hi - lo) * i) / 4);
  }
  return ticks;
}

export function renderSvg(
  series: Series[],
  xLabel: string,
  yLabel: string,
  options: RenderOptions = {},
): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot: no series with points");
  }
  const width = options.width ?? 680;
  const height = options.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = [...new Set(series.flatMap((s) => s.points.map((p) => p.x)))]
    .sort((a, b) => a - b);
  const xDom: [number, number] =
    xs.length > 1 ? [xs[0], xs[xs.length - 1]] : [xs[0] - 1, xs[0] + 1];
  const xPad = (xDom[1] - xDom[0]) * 0.04;
  const sx = linearScale([xDom[0] - xPad, xDom[1] + xPad], [
    MARGIN.left,
    MARGIN.left + plotW,
  ]);
  const yDom = yDomain(series);
  const sy = linearScale(yDom, [MARGIN.top + plotH, MARGIN.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}" ` +
      `font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (options.title) {
    parts.push(
      `<text x="${MARGIN.left + plotW / 2}" y="20" text-anchor="middle" ` +
        `font-size="14" fill="#111">${escapeXml(options.title)}</text>`,
    );
  }

  // gridlines and y ticks
  for (const tick of yTicks(yDom)) {
    const y = sy(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" ` +
        `y2="${y}" stroke="#e5e7eb" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" ` +
        `font-size="11" fill="#374151">${formatTick(tick)}</text>`,
    );
  }
  // x ticks at the observed values
  for (const x of xs) {
    const px = sx(x);
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top + plotH}" x2="${px}" ` +
        `y2="${MARGIN.top + plotH + 5}" stroke="#374151" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" ` +
        `font-size="11" fill="#374151">${formatTick(x)}</text>`,
    );
  }
  // axes
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#111" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top + plotH}" ` +
      `x2="${MARGIN.left + plotW}" y2="${MARGIN.top + plotH}" ` +
      `stroke="#111" stroke-width="1"/>`,
  );
  // axis labels
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" ` +
      `text-anchor="middle" font-size="12" fill="#111">` +
      `${escapeXml(xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `font-size="12" fill="#111" transform="rotate(-90 16 ` +
      `${MARGIN.top + plotH / 2})">${escapeXml(yLabel)}</text>`,
  );

  series.forEach((s, index) => {
    const color = PALETTE[index % PALETTE.length];
    const coords = s.points.map((p) => [sx(p.x), sy(p.mean)] as const);
    if (coords.length > 1) {
      const path = coords.map(([x, y]) => `${x},${y}`).join(" ");
      parts.push(
        `<polyline points="${path}" fill="none" stroke="${color}" ` +
          `stroke-width="2"/>`,
      );
    }
    s.points.forEach((p, i) => {
      const [px, py] = coords[i];
      if (p.se > 0) {
        const yLo = sy(p.mean - p.se);
        const yHi = sy(p.mean + p.se);
        parts.push(
          `<line x1="${px}" y1="${yLo}" x2="${px}" y2="${yHi}" ` +
            `stroke="${color}" stroke-width="1.5"/>`,
        );
        for (const yCap of [yLo, yHi]) {
          parts.push(
            `<line x1="${px - 4}" y1="${yCap}" x2="${px + 4}" ` +
              `y2="${yCap}" stroke="${color}" stroke-width="1.5"/>`,
          );
        }
      }
      parts.push(
        `<circle cx="${px}" cy="${py}" r="3.5" fill="${color}" ` +
          `data-learner="${escapeXml(s.learner)}" data-x="${p.x}" ` +
          `data-mean="${p.mean}" data-se="${p.se}" data-count="${p.count}"/>`,
      );
    });
    // legend entry
    const ly = MARGIN.top + 10 + index * 22;
    const lx = MARGIN.left + plotW + 16;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" ` +
        `stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<circle cx="${lx + 11}" cy="${ly}" r="3.5" fill="${color}"/>`,
    );
    parts.push(
      `<text x="${lx + 28}" y="${ly + 4}" font-size="12" fill="#111">` +
        `${escapeXml(s.learner)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}

/**
 * Dependency-free SVG rendering for line charts and histograms.
 *
 * Layout is fixed-size with simple linear scales; the point of the output
 * is comparability, not styling, so everything is deterministic.
 */

import { FigureData, Series } from "./figures.js";

const WIDTH = 720;
const HEIGHT = 440;
const MARGIN = { top: 48, right: 160, bottom: 56, left: 72 };

const PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

interface Scale {
  (value: number): number;
  ticks: number[];
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count * 1.5) ?? 10 * step;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi + 1e-12; t += chosen) {
    ticks.push(Number(t.toFixed(12)));
  }
  return ticks;
}

function linearScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const f = (value: number) =>
    rangeLo + ((value - lo) / (hi - lo)) * (rangeHi - rangeLo);
  const scale = f as Scale;
  scale.ticks = niceTicks(lo, hi);
  return scale;
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

function histogram(values: number[], bins = 24): { x0: number; x1: number; count: number }[] {
  const [lo, hi] = extent(values);
  const width = (hi - lo) / bins || 1;
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    const idx = Math.min(bins - 1, Math.floor((v - lo) / width));
    counts[idx] += 1;
  }
  return counts.map((count, i) => ({
    x0: lo + i * width,
    x1: lo + (i + 1) * width,
    count,
  }));
}

export function renderSvg(figure: FigureData): string {
  const body: string[] = [];
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  let xValues: number[];
  let yValues: number[];
  let bars: { x0: number; x1: number; count: number }[] | null = null;
  if (figure.bars) {
    bars = histogram(figure.series[0].y);
    xValues = bars.flatMap((b) => [b.x0, b.x1]);
    yValues = [0, ...bars.map((b) => b.count)];
  } else {
    xValues = figure.series.flatMap((s) => s.x);
    yValues = figure.series.flatMap((s) => s.y);
  }
  const [xLo, xHi] = extent(xValues);
  const [yLo, yHi] = extent(yValues);
  const pad = (yHi - yLo) * 0.05 || 0.5;
  const sx = linearScale(xLo, xHi, MARGIN.left, MARGIN.left + plotW);
  const sy = linearScale(yLo - pad, yHi + pad, MARGIN.top + plotH, MARGIN.top);

  // frame, grid, and axes
  body.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );
  for (const t of sx.ticks) {
    const x = sx(t);
    body.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + plotH}" stroke="#ddd"/>`,
      `<text x="${x}" y="${MARGIN.top + plotH + 18}" font-size="11" text-anchor="middle">${t}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const y = sy(t);
    body.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#ddd"/>`,
      `<text x="${MARGIN.left - 6}" y="${y + 4}" font-size="11" text-anchor="end">${t}</text>`,
    );
  }

  if (bars) {
    for (const bin of bars) {
      const x = sx(bin.x0);
      const w = Math.max(1, sx(bin.x1) - sx(bin.x0) - 1);
      const y = sy(bin.count);
      const h = sy(0) - y;
      body.push(
        `<rect x="${x}" y="${y}" width="${w}" height="${h}" fill="${PALETTE[0]}" fill-opacity="0.75"/>`,
      );
    }
  } else {
    figure.series.forEach((series, si) => {
      const colour = PALETTE[si % PALETTE.length];
      const points = series.x
        .map((x, i) => `${sx(x).toFixed(2)},${sy(series.y[i]).toFixed(2)}`)
        .join(" ");
      body.push(
        `<polyline points="${points}" fill="none" stroke="${colour}" stroke-width="1.8"/>`,
      );
      for (let i = 0; i < series.x.length; i++) {
        body.push(
          `<circle cx="${sx(series.x[i]).toFixed(2)}" cy="${sy(series.y[i]).toFixed(2)}" r="2.4" fill="${colour}"/>`,
        );
      }
    });
  }

  // legend and labels
  figure.series.forEach((series: Series, si: number) => {
    if (figure.bars) return;
    const y = MARGIN.top + 14 + si * 18;
    const x = MARGIN.left + plotW + 12;
    body.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${PALETTE[si % PALETTE.length]}" stroke-width="2"/>`,
      `<text x="${x + 28}" y="${y}" font-size="12">${escapeXml(series.name)}</text>`,
    );
  });
  body.push(
    `<text x="${WIDTH / 2}" y="24" font-size="14" text-anchor="middle">${escapeXml(figure.title)}</text>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" font-size="12" text-anchor="middle">${escapeXml(figure.xLabel)}</text>`,
    `<text x="20" y="${MARGIN.top + plotH / 2}" font-size="12" text-anchor="middle" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${escapeXml(figure.yLabel)}</text>`,
  );

  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    "</svg>",
  ].join("\n");
}

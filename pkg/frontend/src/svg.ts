/**
 * Deterministic SVG chart rendering.
 *
 * No timestamps, no randomness, fixed palette and number formatting: the
 * same table and spec always produce the same bytes, so charts can be
 * reviewed in diffs and regenerated idempotently.
 */

import {
  EmptyCsvError,
  ResultTable,
  CsvError,
  numericCell,
  requireColumn,
} from './csv';
import { ChartSpec } from './chartspec';

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { top: 48, right: 150, bottom: 56, left: 76 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const PALETTE = ['#1b6ca8', '#d1495b', '#2e8b57', '#e69f00', '#7b4b94', '#4b4b4b'];

function escapeXml(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

/** Fixed-precision coordinate: enough for crisp lines, stable across runs. */
function px(n: number): string {
  return n.toFixed(2);
}

function labelNumber(n: number): string {
  if (Number.isInteger(n)) return String(n);
  return String(Math.round(n * 1000) / 1000);
}

/** Byte counts on log axes read better as 64k / 1M than raw digits. */
function labelBytes(n: number): string {
  if (n >= 1048576 && Number.isInteger(n / 1048576)) return `${n / 1048576}M`;
  if (n >= 1024 && Number.isInteger(n / 1024)) return `${n / 1024}k`;
  return labelNumber(n);
}

/** Smallest "nice" value (1/2/2.5/5 x 10^k) at or above the data maximum. */
function niceCeil(value: number): number {
  if (value <= 0) return 1;
  const exp = Math.floor(Math.log10(value));
  const base = Math.pow(10, exp);
  for (const step of [1, 2, 2.5, 5, 10]) {
    if (value <= step * base + 1e-9 * base) return step * base;
  }
  return 10 * base;
}

interface SeriesData {
  label: string;
  points: { x: number; y: number; xLabel: string }[];
}

function firstAppearanceOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const order: string[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      order.push(v);
    }
  }
  return order;
}

function collectSeries(table: ResultTable, spec: ChartSpec, where: string): SeriesData[] {
  const order = firstAppearanceOrder(table.rows.map((r) => r[spec.seriesColumn]!));
  return order.map((label) => ({
    label,
    points: table.rows
      .filter((r) => r[spec.seriesColumn] === label)
      .map((r) => ({
        x: numericCell(r, spec.xColumn, where),
        y: numericCell(r, spec.yColumn, where),
        xLabel: r[spec.xColumn]!,
      })),
  }));
}

interface Scale {
  (value: number): number;
}

function xScaleOf(spec: ChartSpec, xs: number[], where: string): Scale {
  if (spec.xScale === 'log') {
    if (xs.some((x) => x <= 0)) {
      throw new CsvError(`${where}: log-scale x axis needs positive values`);
    }
    const lo = Math.log10(Math.min(...xs));
    const hi = Math.log10(Math.max(...xs));
    const span = hi - lo || 1;
    return (v) => MARGIN.left + ((Math.log10(v) - lo) / span) * PLOT_W;
  }
  const lo = Math.min(...xs, 0);
  const hi = Math.max(...xs);
  const span = hi - lo || 1;
  return (v) => MARGIN.left + ((v - lo) / span) * PLOT_W;
}

function header(spec: ChartSpec): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${px(WIDTH / 2)}" y="24" font-size="15" text-anchor="middle">${escapeXml(spec.title)}</text>`,
  ];
}

function axes(spec: ChartSpec, yMax: number): string[] {
  const out: string[] = [];
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  out.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x0 + PLOT_W)}" y2="${px(y0)}" stroke="#333333"/>`);
  out.push(`<line x1="${px(x0)}" y1="${px(MARGIN.top)}" x2="${px(x0)}" y2="${px(y0)}" stroke="#333333"/>`);
  for (let i = 0; i <= 5; i++) {
    const value = (yMax * i) / 5;
    const y = y0 - (PLOT_H * i) / 5;
    out.push(`<line x1="${px(x0)}" y1="${px(y)}" x2="${px(x0 + PLOT_W)}" y2="${px(y)}" stroke="#dddddd"/>`);
    out.push(`<text x="${px(x0 - 8)}" y="${px(y + 4)}" font-size="11" text-anchor="end">${labelNumber(value)}</text>`);
  }
  out.push(`<text x="${px(x0 + PLOT_W / 2)}" y="${px(HEIGHT - 12)}" font-size="12" text-anchor="middle">${escapeXml(spec.xLabel)}</text>`);
  out.push(`<text x="18" y="${px(MARGIN.top + PLOT_H / 2)}" font-size="12" text-anchor="middle" transform="rotate(-90 18 ${px(MARGIN.top + PLOT_H / 2)})">${escapeXml(spec.yLabel)}</text>`);
  return out;
}

function legend(series: SeriesData[]): string[] {
  const out: string[] = [];
  const lx = MARGIN.left + PLOT_W + 12;
  series.forEach((s, i) => {
    const y = MARGIN.top + 10 + i * 18;
    const color = PALETTE[i % PALETTE.length]!;
    out.push(`<rect x="${px(lx)}" y="${px(y - 8)}" width="12" height="12" fill="${color}"/>`);
    out.push(`<text x="${px(lx + 17)}" y="${px(y + 2)}" font-size="11">${escapeXml(s.label)}</text>`);
  });
  return out;
}

function renderLines(spec: ChartSpec, series: SeriesData[], where: string): string[] {
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const yMax = niceCeil(Math.max(...series.flatMap((s) => s.points.map((p) => p.y))));
  const sx = xScaleOf(spec, xs, where);
  const sy: Scale = (v) => MARGIN.top + PLOT_H - (v / yMax) * PLOT_H;
  const out = axes(spec, yMax);
  // x ticks at every distinct sweep value, labelled from the raw CSV text
  const seen = new Set<number>();
  for (const s of series) {
    for (const p of s.points) {
      if (seen.has(p.x)) continue;
      seen.add(p.x);
      const x = sx(p.x);
      const label = spec.xScale === 'log' ? labelBytes(p.x) : p.xLabel;
      out.push(`<line x1="${px(x)}" y1="${px(MARGIN.top + PLOT_H)}" x2="${px(x)}" y2="${px(MARGIN.top + PLOT_H + 5)}" stroke="#333333"/>`);
      out.push(`<text x="${px(x)}" y="${px(MARGIN.top + PLOT_H + 18)}" font-size="11" text-anchor="middle">${escapeXml(label)}</text>`);
    }
  }
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]!;
    const coords = s.points.map((p) => `${px(sx(p.x))},${px(sy(p.y))}`).join(' ');
    out.push(`<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (const p of s.points) {
      out.push(`<circle cx="${px(sx(p.x))}" cy="${px(sy(p.y))}" r="3" fill="${color}"/>`);
    }
  });
  return out.concat(legend(series));
}

function renderBars(spec: ChartSpec, series: SeriesData[]): string[] {
  const groups = firstAppearanceOrder(series.flatMap((s) => s.points.map((p) => p.xLabel)));
  const yMax = niceCeil(Math.max(...series.flatMap((s) => s.points.map((p) => p.y))));
  const out = axes(spec, yMax);
  const groupW = PLOT_W / groups.length;
  const barW = (groupW * 0.7) / series.length;
  groups.forEach((group, g) => {
    const center = MARGIN.left + groupW * (g + 0.5);
    out.push(`<text x="${px(center)}" y="${px(MARGIN.top + PLOT_H + 18)}" font-size="11" text-anchor="middle">${escapeXml(group)}</text>`);
    series.forEach((s, i) => {
      const point = s.points.find((p) => p.xLabel === group);
      if (point === undefined) return;
      const h = (point.y / yMax) * PLOT_H;
      const x = center - (series.length * barW) / 2 + i * barW;
      const color = PALETTE[i % PALETTE.length]!;
      out.push(`<rect x="${px(x)}" y="${px(MARGIN.top + PLOT_H - h)}" width="${px(barW - 2)}" height="${px(h)}" fill="${color}"/>`);
    });
  });
  return out.concat(legend(series));
}

/** Render one table under one spec; throws CsvError subtypes on bad input. */
export function renderChart(table: ResultTable, spec: ChartSpec, where = spec.scenario): string {
  for (const column of [spec.xColumn, spec.seriesColumn, spec.yColumn]) {
    requireColumn(table, column, where);
  }
  if (table.rows.length === 0) {
    throw new EmptyCsvError(where);
  }
  const series = collectSeries(table, spec, where);
  const body = spec.kind === 'bars' ? renderBars(spec, series) : renderLines(spec, series, where);
  return [...header(spec), ...body, '</svg>'].join('\n') + '\n';
}

/**
 * Deterministic SVG renderer: success fraction per axis value, one curve per
 * CSV, Wilson error bars, optional vertical threshold lines on z0 figures.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { SchemaError, SweepRow, parseSweepCsv, wilsonInterval } from "./csv.js";

export interface Curve {
  path: string;
  label: string;
}

export interface FigureSpec {
  curves: Curve[];
  /** vertical dotted threshold lines; only valid on z0-axis figures */
  thresholds?: number[];
  output: string;
  title?: string;
  width?: number;
  height?: number;
}

export interface PlottedPoint {
  x: number;
  y: number; // exactly successes / replicas
  low: number;
  high: number;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 40, right: 30, bottom: 50, left: 60 };

export function curvePoints(rows: SweepRow[]): PlottedPoint[] {
  return rows.map((r) => {
    const { low, high } = wilsonInterval(r.successes, r.replicas);
    return { x: r.value, y: r.successes / r.replicas, low, high };
  });
}

function fmt(v: number): string {
  return Number(v.toFixed(6)).toString();
}

export function renderSvg(spec: FigureSpec): string {
  if (spec.curves.length === 0) {
    throw new SchemaError("figure needs at least one input CSV");
  }
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const curves = spec.curves.map((c) => {
    const rows = parseSweepCsv(readFileSync(c.path, "utf8"));
    return { label: c.label, axis: rows[0].axis, points: curvePoints(rows) };
  });
  const axis = curves[0].axis;
  for (const c of curves) {
    if (c.axis !== axis) {
      throw new SchemaError(
        `curve "${c.label}" sweeps ${c.axis} but the figure axis is ${axis}`,
      );
    }
  }
  if (spec.thresholds?.length && axis !== "z0") {
    throw new SchemaError("threshold verticals are only valid on z0-axis figures");
  }

  const xs = curves.flatMap((c) => c.points.map((p) => p.x));
  const xMin = Math.min(...xs);
  const xMaxRaw = Math.max(...xs, ...(spec.thresholds ?? []));
  const xMax = xMaxRaw === xMin ? xMin + 1 : xMaxRaw;
  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const sy = (y: number) => MARGIN.top + (1 - y) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (spec.title) {
    parts.push(
      `<text x="${width / 2}" y="22" text-anchor="middle" font-size="15">${spec.title}</text>`,
    );
  }

  // axes and y gridlines at 0, 0.25, ..., 1
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const y = sy(tick);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${width - MARGIN.right}" ` +
        `y2="${fmt(y)}" stroke="#dddddd"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end">${tick}</text>`,
    );
  }
  const nXTicks = 6;
  for (let i = 0; i <= nXTicks; i++) {
    const x = xMin + ((xMax - xMin) * i) / nXTicks;
    parts.push(
      `<text x="${fmt(sx(x))}" y="${height - MARGIN.bottom + 18}" ` +
        `text-anchor="middle">${fmt(x)}</text>`,
    );
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${sy(0)}" x2="${width - MARGIN.right}" y2="${sy(0)}" stroke="black"/>`,
    `<line x1="${MARGIN.left}" y1="${sy(0)}" x2="${MARGIN.left}" y2="${sy(1)}" stroke="black"/>`,
    `<text x="${width / 2}" y="${height - 12}" text-anchor="middle">` +
      `${axis === "z0" ? "initial density z0" : "infection rate beta"}</text>`,
    `<text x="16" y="${height / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${height / 2})">success probability</text>`,
  );

  for (const t of spec.thresholds ?? []) {
    parts.push(
      `<line x1="${fmt(sx(t))}" y1="${sy(1)}" x2="${fmt(sx(t))}" y2="${sy(0)}" ` +
        `stroke="black" stroke-dasharray="2,4"/>`,
      `<text x="${fmt(sx(t) + 4)}" y="${MARGIN.top + 12}">${fmt(t)}</text>`,
    );
  }

  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const line = curve.points
      .map((p, i) => `${i === 0 ? "M" : "L"}${fmt(sx(p.x))},${fmt(sy(p.y))}`)
      .join(" ");
    parts.push(`<path d="${line}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const p of curve.points) {
      parts.push(
        `<line x1="${fmt(sx(p.x))}" y1="${fmt(sy(p.low))}" x2="${fmt(sx(p.x))}" ` +
          `y2="${fmt(sy(p.high))}" stroke="${color}"/>`,
        `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="3" fill="${color}" ` +
          `data-y="${p.y}"/>`,
      );
    }
    parts.push(
      `<rect x="${width - MARGIN.right - 150}" y="${MARGIN.top + 18 * ci}" ` +
        `width="10" height="10" fill="${color}"/>`,
      `<text x="${width - MARGIN.right - 134}" y="${MARGIN.top + 18 * ci + 9}">` +
        `${curve.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function render(spec: FigureSpec): string {
  const svg = renderSvg(spec);
  writeFileSync(spec.output, svg);
  return spec.output;
}

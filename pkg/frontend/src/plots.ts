/**
 * Figure rendering: log-scale decay overlays from diagnostics CSVs and
 * phase-space snapshot heatmaps reconstructed from checkpoints.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

import { readDiagnosticsCsv, requireColumn } from "./csv.js";
import { readCheckpoint } from "./checkpoint.js";
import { viridis } from "./colormap.js";
import { reconstructF } from "./hermite.js";
import { findRun, readManifest } from "./manifest.js";
import { BLACK, GREY, Raster, SERIES_COLORS, WHITE, type Color } from "./raster.js";

export interface DecayInput {
  csv: string;
  column: string;
  label?: string;
}

export interface DecaySpec {
  inputs: DecayInput[];
  out: string;
  title?: string;
  logY?: boolean;
  width?: number;
  height?: number;
}

export interface SnapshotSpec {
  manifest: string;
  epsilon: number;
  times: number[];
  outDir: string;
  vMin?: number;
  vMax?: number;
  nV?: number;
  width?: number;
  height?: number;
}

interface Series {
  label: string;
  color: Color;
  points: [number, number][];
}

function niceStep(range: number, target: number): number {
  const raw = range / Math.max(target, 1);
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (m * power >= raw) return m * power;
  }
  return 10 * power;
}

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    return value.toExponential(0).replace("e+", "e").replace("e-", "e-");
  }
  return Number(value.toPrecision(6)).toString();
}

export function plotDecay(spec: DecaySpec): string {
  const logY = spec.logY ?? true;
  const width = spec.width ?? 960;
  const height = spec.height ?? 600;
  const margin = { left: 78, right: 24, top: 40, bottom: 52 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const series: Series[] = [];
  for (const [index, input] of spec.inputs.entries()) {
    const table = readDiagnosticsCsv(input.csv);
    const t = requireColumn(table, "t", input.csv);
    const values = requireColumn(table, input.column, input.csv);
    const points: [number, number][] = [];
    for (let i = 0; i < table.rows; i++) {
      const x = t[i];
      const y = values[i];
      if (x === null || y === null) continue;
      if (logY && y <= 0) continue;
      points.push([x, logY ? Math.log10(y) : y]);
    }
    series.push({
      label: input.label ?? `${input.column}`,
      color: SERIES_COLORS[index % SERIES_COLORS.length],
      points,
    });
  }

  const canvas = new Raster(width, height, WHITE);
  canvas.textCentered(width / 2, 12, spec.title ?? "time evolution", BLACK, 2);

  const all = series.flatMap((s) => s.points);
  if (all.length === 0) {
    canvas.textCentered(width / 2, height / 2, "no data rows in input csv", BLACK, 2);
    mkdirSync(dirname(spec.out), { recursive: true });
    writeFileSync(spec.out, canvas.toPng());
    return spec.out;
  }

  let x0 = Math.min(...all.map((p) => p[0]));
  let x1 = Math.max(...all.map((p) => p[0]));
  let y0 = Math.min(...all.map((p) => p[1]));
  let y1 = Math.max(...all.map((p) => p[1]));
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const px = (x: number) => margin.left + ((x - x0) / (x1 - x0)) * plotW;
  const py = (y: number) => margin.top + (1 - (y - y0) / (y1 - y0)) * plotH;

  // y ticks: powers of ten in log mode, nice steps otherwise
  const yTicks: number[] = [];
  if (logY) {
    let stride = 1;
    while ((Math.ceil(y1) - Math.floor(y0)) / stride > 12) stride += 1;
    for (let p = Math.ceil(y0); p <= Math.floor(y1 + 1e-12); p += stride) yTicks.push(p);
  } else {
    const step = niceStep(y1 - y0, 8);
    for (let v = Math.ceil(y0 / step) * step; v <= y1 + 1e-12; v += step) yTicks.push(v);
  }
  for (const tick of yTicks) {
    const y = py(tick);
    canvas.line(margin.left, y, width - margin.right, y, GREY);
    const label = logY ? `1e${tick}` : formatTick(tick);
    canvas.text(margin.left - 8 - label.length * 6, y - 3, label, BLACK, 1);
  }
  const xStep = niceStep(x1 - x0, 8);
  for (let v = Math.ceil(x0 / xStep) * xStep; v <= x1 + 1e-12; v += xStep) {
    const x = px(v);
    canvas.line(x, margin.top, x, height - margin.bottom, GREY);
    canvas.textCentered(x, height - margin.bottom + 8, formatTick(v), BLACK, 1);
  }

  // frame
  canvas.line(margin.left, margin.top, margin.left, height - margin.bottom, BLACK);
  canvas.line(margin.left, height - margin.bottom, width - margin.right, height - margin.bottom, BLACK);
  canvas.textCentered(width / 2, height - 24, "t", BLACK, 2);

  for (const s of series) {
    for (let i = 1; i < s.points.length; i++) {
      canvas.line(
        px(s.points[i - 1][0]),
        py(s.points[i - 1][1]),
        px(s.points[i][0]),
        py(s.points[i][1]),
        s.color,
        2,
      );
    }
  }

  // legend, top right inside the frame
  let legendY = margin.top + 8;
  for (const s of series) {
    const xText = width - margin.right - 12 - s.label.length * 6;
    canvas.line(xText - 26, legendY + 3, xText - 6, legendY + 3, s.color, 3);
    canvas.text(xText, legendY, s.label, BLACK, 1);
    legendY += 14;
  }

  mkdirSync(dirname(spec.out), { recursive: true });
  writeFileSync(spec.out, canvas.toPng());
  return spec.out;
}

function linspace(lo: number, hi: number, n: number): number[] {
  return Array.from({ length: n }, (_, i) => lo + ((hi - lo) * i) / (n - 1));
}

export function plotSnapshots(spec: SnapshotSpec): string[] {
  const manifest = readManifest(spec.manifest);
  const run = findRun(manifest, spec.epsilon);
  const dt = run.dt;
  if (dt === undefined || run.checkpoints === undefined) {
    throw new Error(`run epsilon=${spec.epsilon} has no checkpoint records in the manifest`);
  }
  const baseDir = dirname(spec.manifest);
  const vMin = spec.vMin ?? -5;
  const vMax = spec.vMax ?? 5;
  const nV = spec.nV ?? 128;
  const vGrid = linspace(vMin, vMax, nV);
  const sqrtRho = manifest.equilibrium.sqrt_rho_inf;
  const T0 = manifest.equilibrium.T0;

  // reconstruct everything first so all panels share one color scale
  const panels = spec.times.map((time) => {
    const step = Math.round(time / dt);
    const rel = run.checkpoints![String(step)];
    if (rel === undefined) {
      const available = Object.keys(run.checkpoints!).join(", ");
      throw new Error(
        `no checkpoint at step ${step} (t=${time}) for epsilon=${spec.epsilon}; available steps: ${available}`,
      );
    }
    const checkpoint = readCheckpoint(join(baseDir, rel));
    return { time, f: reconstructF(checkpoint, sqrtRho, T0, vGrid) };
  });
  let fMax = 0;
  for (const panel of panels) {
    for (const row of panel.f) {
      for (const value of row) fMax = Math.max(fMax, value);
    }
  }
  if (fMax <= 0) fMax = 1;

  const width = spec.width ?? 720;
  const height = spec.height ?? 560;
  const margin = { left: 64, right: 86, top: 36, bottom: 48 };
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const nX = sqrtRho.length;
  const a = manifest.mesh.a;
  const b = manifest.mesh.b;

  mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const panel of panels) {
    const canvas = new Raster(width, height, WHITE);
    canvas.textCentered(width / 2, 10, `f(x,v) at t=${panel.time}`, BLACK, 2);
    for (let pxI = 0; pxI < plotW; pxI++) {
      const j = Math.min(nX - 1, Math.floor((pxI / plotW) * nX));
      for (let pyI = 0; pyI < plotH; pyI++) {
        // v increases upward
        const i = Math.min(nV - 1, Math.floor(((plotH - 1 - pyI) / plotH) * nV));
        const value = Math.max(0, panel.f[j][i]) / fMax;
        canvas.set(margin.left + pxI, margin.top + pyI, viridis(value));
      }
    }
    // color bar
    const barX = width - margin.right + 24;
    for (let pyI = 0; pyI < plotH; pyI++) {
      const value = (plotH - 1 - pyI) / (plotH - 1);
      for (let w = 0; w < 14; w++) canvas.set(barX + w, margin.top + pyI, viridis(value));
    }
    canvas.text(barX, margin.top - 12, formatTick(fMax), BLACK, 1);
    canvas.text(barX, margin.top + plotH + 4, "0", BLACK, 1);

    canvas.line(margin.left, margin.top, margin.left, margin.top + plotH, BLACK);
    canvas.line(margin.left, margin.top + plotH, margin.left + plotW, margin.top + plotH, BLACK);
    canvas.textCentered(margin.left + plotW / 2, height - 22, "x", BLACK, 2);
    canvas.text(8, margin.top + plotH / 2 - 4, "v", BLACK, 2);
    for (const [frac, value] of [
      [0, a],
      [0.5, (a + b) / 2],
      [1, b],
    ] as const) {
      const x = margin.left + frac * plotW;
      canvas.line(x, margin.top + plotH, x, margin.top + plotH + 4, BLACK);
      canvas.textCentered(x, margin.top + plotH + 8, formatTick(value), BLACK, 1);
    }
    for (const [frac, value] of [
      [0, vMax],
      [0.5, (vMin + vMax) / 2],
      [1, vMin],
    ] as const) {
      const y = margin.top + frac * plotH;
      canvas.line(margin.left - 4, y, margin.left, y, BLACK);
      canvas.text(margin.left - 8 - formatTick(value).length * 6, y - 3, formatTick(value), BLACK, 1);
    }

    const out = join(spec.outDir, `snapshot_t${panel.time}.png`);
    writeFileSync(out, canvas.toPng());
    written.push(out);
  }
  return written;
}

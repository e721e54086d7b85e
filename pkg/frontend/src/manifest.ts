/** Run manifest: configuration echo, equilibrium arrays and per-epsilon runs. */

import { readFileSync } from "node:fs";

export interface RunEntry {
  epsilon: number;
  tau?: number;
  csv?: string;
  checkpoints?: Record<string, string>;
  n_steps?: number;
  dt?: number;
  status: string;
}

export interface Manifest {
  format_version: number;
  config: Record<string, unknown>;
  mesh: { a: number; b: number; n_x: number; x_center: number[]; dx: number[] };
  equilibrium: { T0: number; sqrt_rho_inf: number[]; c0: number; total_mass: number };
  measured: Record<string, unknown>;
  runs: RunEntry[];
}

export function readManifest(path: string): Manifest {
  return JSON.parse(readFileSync(path, "ascii")) as Manifest;
}

export function findRun(manifest: Manifest, epsilon: number): RunEntry {
  const entry = manifest.runs.find(
    (run) => Math.abs(run.epsilon - epsilon) <= 1e-12 * Math.max(1, Math.abs(epsilon)),
  );
  if (entry === undefined) {
    const available = manifest.runs.map((run) => run.epsilon).join(", ");
    throw new Error(`no run with epsilon=${epsilon} in manifest (available: ${available})`);
  }
  return entry;
}

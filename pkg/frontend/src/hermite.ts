/**
 * Hermite-basis reconstruction of the distribution function from a
 * coefficient checkpoint.
 *
 * Psi_k(v) = H_k(v / sqrt(T0)) M(v) with the orthonormal three-term
 * recurrence run directly on Psi (the Gaussian factor rides along), and
 *
 *   f(x_j, v) = sum_k sqrt(rho_inf)_j D[k][j] Psi_k(v).
 */

import type { Checkpoint } from "./checkpoint.js";

/** Psi_k(v) for k = 0..kMax; result[k][i] = Psi_k(v[i]). */
export function hermiteFunctionValues(kMax: number, v: number[], T0: number): Float64Array[] {
  if (kMax < 0) {
    throw new Error(`kMax must be nonnegative, got ${kMax}`);
  }
  const n = v.length;
  const sqrtT0 = Math.sqrt(T0);
  const psi: Float64Array[] = [];
  const psi0 = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    psi0[i] = Math.exp(-(v[i] * v[i]) / (2 * T0)) / Math.sqrt(2 * Math.PI * T0);
  }
  psi.push(psi0);
  if (kMax >= 1) {
    const psi1 = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      psi1[i] = (v[i] / sqrtT0) * psi0[i];
    }
    psi.push(psi1);
  }
  for (let k = 1; k < kMax; k++) {
    const next = new Float64Array(n);
    const a = Math.sqrt(k);
    const b = Math.sqrt(k + 1);
    for (let i = 0; i < n; i++) {
      next[i] = ((v[i] / sqrtT0) * psi[k][i] - a * psi[k - 1][i]) / b;
    }
    psi.push(next);
  }
  return psi;
}

/** f(x_j, v_i) as row-major (nX x v.length). */
export function reconstructF(
  checkpoint: Checkpoint,
  sqrtRhoInf: number[],
  T0: number,
  vGrid: number[],
): Float64Array[] {
  const { nH, nX, data } = checkpoint;
  if (sqrtRhoInf.length !== nX) {
    throw new Error(`sqrt_rho_inf has ${sqrtRhoInf.length} cells, checkpoint has ${nX}`);
  }
  const psi = hermiteFunctionValues(nH - 1, vGrid, T0);
  const nV = vGrid.length;
  const f: Float64Array[] = [];
  for (let j = 0; j < nX; j++) {
    f.push(new Float64Array(nV));
  }
  for (let k = 0; k < nH; k++) {
    for (let j = 0; j < nX; j++) {
      const c = sqrtRhoInf[j] * data[k * nX + j];
      if (c === 0) continue;
      const row = f[j];
      const basis = psi[k];
      for (let i = 0; i < nV; i++) {
        row[i] += c * basis[i];
      }
    }
  }
  return f;
}

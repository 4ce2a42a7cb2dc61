/** Sparse ground-energy estimation for validating generated operators. */

import { eighSymmetric } from "./linalg.js";

export interface RealTerm {
  coeff: number;
  letters: string;
}

/** y += coeff * P x for one real Pauli string (even Y count assumed). */
function applyTerm(term: RealTerm, x: Float64Array, y: Float64Array, qubits: number): void {
  const dim = 1 << qubits;
  let flip = 0;
  const zyBits: number[] = [];
  let yCount = 0;
  for (let q = 0; q < qubits; q++) {
    const bitPos = qubits - 1 - q;
    const letter = term.letters[q];
    if (letter === "X" || letter === "Y") flip |= 1 << bitPos;
    if (letter === "Z" || letter === "Y") zyBits.push(bitPos);
    if (letter === "Y") yCount++;
  }
  if (yCount % 2 !== 0) throw new Error("odd Y count: operator not real");
  const ySign = yCount % 4 === 0 ? 1 : -1; // i^{yCount} for even counts
  for (let col = 0; col < dim; col++) {
    let parity = 0;
    for (const bit of zyBits) parity ^= (col >> bit) & 1;
    const sign = parity === 0 ? ySign : -ySign;
    y[col ^ flip] += term.coeff * sign * x[col];
  }
}

export function applyOperator(terms: RealTerm[], x: Float64Array, qubits: number): Float64Array {
  const y = new Float64Array(x.length);
  for (const term of terms) applyTerm(term, x, y, qubits);
  return y;
}

/**
 * Lanczos with full reorthogonalization from a deterministic start vector.
 * Enough accuracy (<1e-8) to validate ground energies of 10-qubit operators.
 */
export function groundEnergyLanczos(
  terms: RealTerm[],
  qubits: number,
  steps = 80,
  start?: Float64Array,
): number {
  const dim = 1 << qubits;
  let v = new Float64Array(dim);
  if (start) {
    v.set(start);
  } else {
    // deterministic pseudo-random start touching every amplitude
    for (let i = 0; i < dim; i++) v[i] = Math.sin(1 + 0.7 * i) + 0.3 * Math.cos(2.3 * i);
  }
  normalize(v);
  const basis: Float64Array[] = [v];
  const alphas: number[] = [];
  const betas: number[] = [];
  for (let k = 0; k < steps; k++) {
    let w = applyOperator(terms, basis[k], qubits);
    const alpha = dot(basis[k], w);
    alphas.push(alpha);
    for (let i = 0; i < basis.length; i++) {
      const overlap = dot(basis[i], w);
      axpy(w, basis[i], -overlap);
    }
    const beta = Math.sqrt(dot(w, w));
    if (beta < 1e-12) break;
    betas.push(beta);
    scale(w, 1 / beta);
    basis.push(w);
  }
  const m = alphas.length;
  const tri = Array.from({ length: m }, () => new Array<number>(m).fill(0));
  for (let i = 0; i < m; i++) {
    tri[i][i] = alphas[i];
    if (i + 1 < m) {
      tri[i][i + 1] = betas[i];
      tri[i + 1][i] = betas[i];
    }
  }
  return eighSymmetric(tri).values[0];
}

function dot(a: Float64Array, b: Float64Array): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

function axpy(y: Float64Array, x: Float64Array, factor: number): void {
  for (let i = 0; i < y.length; i++) y[i] += factor * x[i];
}

function scale(x: Float64Array, factor: number): void {
  for (let i = 0; i < x.length; i++) x[i] *= factor;
}

function normalize(x: Float64Array): void {
  scale(x, 1 / Math.sqrt(dot(x, x)));
}

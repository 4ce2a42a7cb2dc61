/**
 * Second-quantized electronic Hamiltonian over spin orbitals, determinant
 * construction, and full CI within a particle-number sector.
 *
 * Spin-orbital ordering is block-wise: modes 0..m-1 carry alpha spin on
 * spatial orbitals 0..m-1, modes m..2m-1 carry beta.  That ordering is
 * what makes the two tapered qubits of the parity encoding carry the
 * alpha-count and total-count parities.
 */

import { Matrix, eighSymmetric } from "./linalg.js";

export interface SpinOrbitalIntegrals {
  modes: number; // 2m
  h: number[][]; // one-body <p|h|q>
  // physicist-notation antisymmetrizable two-body <pq|rs> = (pr|qs) delta_spin
  g: number[][][][];
  enuc: number;
}

export function spinOrbitalIntegrals(
  hmo: Matrix,
  gmo: number[][][][],
  enuc: number,
): SpinOrbitalIntegrals {
  const m = hmo.length;
  const n = 2 * m;
  const spin = (p: number) => (p < m ? 0 : 1);
  const spatial = (p: number) => p % m;
  const h = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let p = 0; p < n; p++)
    for (let q = 0; q < n; q++)
      if (spin(p) === spin(q)) h[p][q] = hmo[spatial(p)][spatial(q)];
  const g = Array.from({ length: n }, () =>
    Array.from({ length: n }, () =>
      Array.from({ length: n }, () => new Array<number>(n).fill(0)),
    ),
  );
  for (let p = 0; p < n; p++)
    for (let q = 0; q < n; q++)
      for (let r = 0; r < n; r++)
        for (let s = 0; s < n; s++)
          if (spin(p) === spin(r) && spin(q) === spin(s))
            g[p][q][r][s] = gmo[spatial(p)][spatial(r)][spatial(q)][spatial(s)];
  return { modes: n, h, g, enuc };
}

const popcount = (x: number): number => {
  let count = 0;
  while (x) {
    x &= x - 1;
    count++;
  }
  return count;
};

/** Apply a_p to |mask>; returns null when annihilated. */
function annihilate(mask: number, p: number): { mask: number; sign: number } | null {
  if ((mask & (1 << p)) === 0) return null;
  const below = popcount(mask & ((1 << p) - 1));
  return { mask: mask & ~(1 << p), sign: below % 2 === 0 ? 1 : -1 };
}

function create(mask: number, p: number): { mask: number; sign: number } | null {
  if ((mask & (1 << p)) !== 0) return null;
  const below = popcount(mask & ((1 << p) - 1));
  return { mask: mask | (1 << p), sign: below % 2 === 0 ? 1 : -1 };
}

/**
 * H|mask> as a sparse map, H = sum h_pq a+_p a_q
 * + 1/2 sum <pq|rs> a+_p a+_q a_s a_r + E_nuc.
 */
export function applyHamiltonian(
  ints: SpinOrbitalIntegrals,
  mask: number,
): Map<number, number> {
  const out = new Map<number, number>();
  const add = (m: number, v: number) => {
    if (v === 0) return;
    out.set(m, (out.get(m) ?? 0) + v);
  };
  add(mask, ints.enuc);
  const n = ints.modes;
  for (let q = 0; q < n; q++) {
    const aq = annihilate(mask, q);
    if (!aq) continue;
    for (let p = 0; p < n; p++) {
      const hpq = ints.h[p][q];
      if (hpq === 0) continue;
      const cp = create(aq.mask, p);
      if (!cp) continue;
      add(cp.mask, hpq * aq.sign * cp.sign);
    }
  }
  for (let r = 0; r < n; r++) {
    const ar = annihilate(mask, r);
    if (!ar) continue;
    for (let s = 0; s < n; s++) {
      const as = annihilate(ar.mask, s);
      if (!as) continue;
      const sign1 = ar.sign * as.sign;
      for (let q = 0; q < n; q++) {
        const cq = create(as.mask, q);
        if (!cq) continue;
        for (let p = 0; p < n; p++) {
          const gpqrs = ints.g[p][q][r][s];
          if (gpqrs === 0) continue;
          const cp = create(cq.mask, p);
          if (!cp) continue;
          add(cp.mask, 0.5 * gpqrs * sign1 * cq.sign * cp.sign);
        }
      }
    }
  }
  return out;
}

function combinations(pool: number[], k: number): number[][] {
  if (k === 0) return [[]];
  if (pool.length < k) return [];
  const [head, ...rest] = pool;
  const withHead = combinations(rest, k - 1).map((c) => [head, ...c]);
  return withHead.concat(combinations(rest, k));
}

/** All determinants with the given alpha/beta occupation counts. */
export function sectorDeterminants(
  spatialCount: number,
  nAlpha: number,
  nBeta: number,
): number[] {
  const orbitals = Array.from({ length: spatialCount }, (_, i) => i);
  const masks: number[] = [];
  for (const alphaOcc of combinations(orbitals, nAlpha)) {
    const alphaMask = alphaOcc.reduce((m, p) => m | (1 << p), 0);
    for (const betaOcc of combinations(orbitals, nBeta)) {
      const betaMask = betaOcc.reduce((m, p) => m | (1 << (p + spatialCount)), 0);
      masks.push(alphaMask | betaMask);
    }
  }
  return masks.sort((a, b) => a - b);
}

export function sectorMatrix(ints: SpinOrbitalIntegrals, masks: number[]): Matrix {
  const index = new Map<number, number>();
  masks.forEach((m, i) => index.set(m, i));
  const dim = masks.length;
  const h = Array.from({ length: dim }, () => new Array<number>(dim).fill(0));
  for (let col = 0; col < dim; col++) {
    for (const [mask, value] of applyHamiltonian(ints, masks[col])) {
      const row = index.get(mask);
      if (row === undefined) {
        throw new Error("Hamiltonian leaves the particle sector");
      }
      h[row][col] += value;
    }
  }
  return h;
}

export interface FciResult {
  energy: number;
  dimension: number;
}

export function fciGroundEnergy(
  ints: SpinOrbitalIntegrals,
  spatialCount: number,
  nAlpha: number,
  nBeta: number,
): FciResult {
  const masks = sectorDeterminants(spatialCount, nAlpha, nBeta);
  const matrix = sectorMatrix(ints, masks);
  const { values } = eighSymmetric(matrix);
  return { energy: values[0], dimension: masks.length };
}

/** <D|H|D> for a single determinant (used for the Hartree-Fock check). */
export function determinantEnergy(ints: SpinOrbitalIntegrals, mask: number): number {
  const image = applyHamiltonian(ints, mask);
  return image.get(mask) ?? 0;
}

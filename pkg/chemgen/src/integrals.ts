/**
 * Molecular integrals for contracted s-type Gaussians (STO-3G hydrogen).
 *
 * Closed-form primitive integrals over s functions; the Boys function
 * F0 is evaluated by the downward-stable exponential series for small
 * and moderate arguments and the asymptotic form beyond.
 */

export const ANGSTROM_TO_BOHR = 1.8897259886;

// STO-3G hydrogen 1s: exponents and contraction coefficients for
// unit-normalized primitives.
export const H_EXPONENTS = [3.425250914, 0.6239137298, 0.1688554040];
export const H_COEFFS = [0.1543289673, 0.5353281423, 0.4446345422];

export type Vec3 = [number, number, number];

export interface Shell {
  center: Vec3;
  exponents: number[];
  coeffs: number[]; // contraction coefficients times primitive norms
}

export function hydrogenShell(center: Vec3): Shell {
  const coeffs = H_COEFFS.map(
    (d, i) => d * Math.pow((2 * H_EXPONENTS[i]) / Math.PI, 0.75),
  );
  return { center, exponents: H_EXPONENTS.slice(), coeffs };
}

export function linearChain(count: number, spacingAngstrom: number): Vec3[] {
  const d = spacingAngstrom * ANGSTROM_TO_BOHR;
  return Array.from({ length: count }, (_, i) => [0, 0, i * d] as Vec3);
}

function dist2(a: Vec3, b: Vec3): number {
  const dx = a[0] - b[0];
  const dy = a[1] - b[1];
  const dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

/** Boys function F0(t) = int_0^1 exp(-t x^2) dx. */
export function boysF0(t: number): number {
  if (t < 1e-13) return 1 - t / 3;
  if (t > 35) return 0.5 * Math.sqrt(Math.PI / t);
  // F0(t) = exp(-t) * sum_k (2t)^k / (2k+1)!!, all terms positive
  let term = 1;
  let sum = 1;
  for (let k = 1; k < 300; k++) {
    term *= (2 * t) / (2 * k + 1);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return Math.exp(-t) * sum;
}

function gaussianProductCenter(alpha: number, a: Vec3, beta: number, b: Vec3): Vec3 {
  const p = alpha + beta;
  return [
    (alpha * a[0] + beta * b[0]) / p,
    (alpha * a[1] + beta * b[1]) / p,
    (alpha * a[2] + beta * b[2]) / p,
  ];
}

export function overlap(sa: Shell, sb: Shell): number {
  const ab2 = dist2(sa.center, sb.center);
  let total = 0;
  for (let i = 0; i < sa.exponents.length; i++) {
    for (let j = 0; j < sb.exponents.length; j++) {
      const alpha = sa.exponents[i];
      const beta = sb.exponents[j];
      const p = alpha + beta;
      const mu = (alpha * beta) / p;
      total +=
        sa.coeffs[i] *
        sb.coeffs[j] *
        Math.pow(Math.PI / p, 1.5) *
        Math.exp(-mu * ab2);
    }
  }
  return total;
}

export function kinetic(sa: Shell, sb: Shell): number {
  const ab2 = dist2(sa.center, sb.center);
  let total = 0;
  for (let i = 0; i < sa.exponents.length; i++) {
    for (let j = 0; j < sb.exponents.length; j++) {
      const alpha = sa.exponents[i];
      const beta = sb.exponents[j];
      const p = alpha + beta;
      const mu = (alpha * beta) / p;
      total +=
        sa.coeffs[i] *
        sb.coeffs[j] *
        mu *
        (3 - 2 * mu * ab2) *
        Math.pow(Math.PI / p, 1.5) *
        Math.exp(-mu * ab2);
    }
  }
  return total;
}

/** Nuclear attraction of the (a|1/r_C|b) type for unit charges at centers. */
export function nuclearAttraction(sa: Shell, sb: Shell, nuclei: Vec3[]): number {
  const ab2 = dist2(sa.center, sb.center);
  let total = 0;
  for (let i = 0; i < sa.exponents.length; i++) {
    for (let j = 0; j < sb.exponents.length; j++) {
      const alpha = sa.exponents[i];
      const beta = sb.exponents[j];
      const p = alpha + beta;
      const mu = (alpha * beta) / p;
      const pref =
        sa.coeffs[i] *
        sb.coeffs[j] *
        ((2 * Math.PI) / p) *
        Math.exp(-mu * ab2);
      const center = gaussianProductCenter(alpha, sa.center, beta, sb.center);
      for (const nucleus of nuclei) {
        total -= pref * boysF0(p * dist2(center, nucleus));
      }
    }
  }
  return total;
}

/** Two-electron repulsion integral (ab|cd) in chemist notation. */
export function eri(sa: Shell, sb: Shell, sc: Shell, sd: Shell): number {
  const ab2 = dist2(sa.center, sb.center);
  const cd2 = dist2(sc.center, sd.center);
  let total = 0;
  for (let i = 0; i < sa.exponents.length; i++) {
    for (let j = 0; j < sb.exponents.length; j++) {
      const alpha = sa.exponents[i];
      const beta = sb.exponents[j];
      const p = alpha + beta;
      const muAB = (alpha * beta) / p;
      const expAB = Math.exp(-muAB * ab2);
      if (expAB < 1e-18) continue;
      const P = gaussianProductCenter(alpha, sa.center, beta, sb.center);
      const cij = sa.coeffs[i] * sb.coeffs[j] * expAB;
      for (let k = 0; k < sc.exponents.length; k++) {
        for (let l = 0; l < sd.exponents.length; l++) {
          const gamma = sc.exponents[k];
          const delta = sd.exponents[l];
          const q = gamma + delta;
          const muCD = (gamma * delta) / q;
          const expCD = Math.exp(-muCD * cd2);
          if (expCD < 1e-18) continue;
          const Q = gaussianProductCenter(gamma, sc.center, delta, sd.center);
          const rho = (p * q) / (p + q);
          total +=
            cij *
            sc.coeffs[k] *
            sd.coeffs[l] *
            expCD *
            ((2 * Math.pow(Math.PI, 2.5)) / (p * q * Math.sqrt(p + q))) *
            boysF0(rho * dist2(P, Q));
        }
      }
    }
  }
  return total;
}

export interface IntegralSet {
  nbf: number;
  s: number[][];
  hcore: number[][];
  eri: number[][][][]; // chemist notation (pq|rs)
  enuc: number;
}

export function computeIntegrals(centers: Vec3[]): IntegralSet {
  const shells = centers.map(hydrogenShell);
  const n = shells.length;
  const s = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  const hcore = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      s[i][j] = overlap(shells[i], shells[j]);
      hcore[i][j] =
        kinetic(shells[i], shells[j]) +
        nuclearAttraction(shells[i], shells[j], centers);
    }
  }
  const g: number[][][][] = Array.from({ length: n }, () =>
    Array.from({ length: n }, () =>
      Array.from({ length: n }, () => new Array<number>(n).fill(0)),
    ),
  );
  for (let p = 0; p < n; p++)
    for (let q = 0; q < n; q++)
      for (let r = 0; r < n; r++)
        for (let t = 0; t < n; t++)
          g[p][q][r][t] = eri(shells[p], shells[q], shells[r], shells[t]);
  let enuc = 0;
  for (let i = 0; i < n; i++)
    for (let j = i + 1; j < n; j++) enuc += 1 / Math.sqrt(dist2(centers[i], centers[j]));
  return { nbf: n, s, hcore, eri: g, enuc };
}

/** Closed-shell restricted Hartree-Fock over the computed integral set. */

import { IntegralSet } from "./integrals.js";
import { Matrix, eighSymmetric, inverseSqrt, matmul, transpose, zeros } from "./linalg.js";

export interface ScfResult {
  energy: number; // total (electronic + nuclear repulsion)
  electronic: number;
  orbitalEnergies: number[];
  coefficients: Matrix; // AO x MO, columns ascending in energy
  iterations: number;
  converged: boolean;
}

export function runRhf(ints: IntegralSet, nOcc: number, maxIter = 200): ScfResult {
  const n = ints.nbf;
  const x = inverseSqrt(ints.s);
  let density = zeros(n, n);
  let coeffs = zeros(n, n);
  let orbitalEnergies = new Array<number>(n).fill(0);
  let energy = 0;
  let converged = false;
  let iterations = 0;

  for (let iter = 1; iter <= maxIter; iter++) {
    iterations = iter;
    const fock = buildFock(ints, density);
    const fPrime = matmul(transpose(x), matmul(fock, x));
    const { values, vectors } = eighSymmetric(fPrime);
    coeffs = matmul(x, vectors);
    orbitalEnergies = values;
    const newDensity = zeros(n, n);
    for (let i = 0; i < n; i++)
      for (let j = 0; j < n; j++) {
        let sum = 0;
        for (let m = 0; m < nOcc; m++) sum += coeffs[i][m] * coeffs[j][m];
        newDensity[i][j] = 2 * sum;
      }
    let electronic = 0;
    for (let i = 0; i < n; i++)
      for (let j = 0; j < n; j++)
        electronic += 0.5 * newDensity[i][j] * (ints.hcore[i][j] + fock[i][j]);
    const newEnergy = electronic + ints.enuc;
    let dp = 0;
    for (let i = 0; i < n; i++)
      for (let j = 0; j < n; j++) dp = Math.max(dp, Math.abs(newDensity[i][j] - density[i][j]));
    density = newDensity;
    const de = Math.abs(newEnergy - energy);
    energy = newEnergy;
    if (iter > 1 && de < 1e-12 && dp < 1e-10) {
      converged = true;
      break;
    }
  }

  let electronic = energy - ints.enuc;
  return { energy, electronic, orbitalEnergies, coefficients: coeffs, iterations, converged };
}

function buildFock(ints: IntegralSet, density: Matrix): Matrix {
  const n = ints.nbf;
  const fock = ints.hcore.map((row) => row.slice());
  for (let i = 0; i < n; i++)
    for (let j = 0; j < n; j++) {
      let g = 0;
      for (let k = 0; k < n; k++)
        for (let l = 0; l < n; l++) {
          const p = density[k][l];
          if (p === 0) continue;
          g += p * (ints.eri[i][j][k][l] - 0.5 * ints.eri[i][k][j][l]);
        }
      fock[i][j] += g;
    }
  return fock;
}

/** Transform chemist-notation AO integrals into the MO basis. */
export function moIntegrals(ints: IntegralSet, coeffs: Matrix) {
  const n = ints.nbf;
  const hmo = matmul(transpose(coeffs), matmul(ints.hcore, coeffs));
  // naive four-index transform; n = 6 keeps this cheap
  const g = Array.from({ length: n }, () =>
    Array.from({ length: n }, () =>
      Array.from({ length: n }, () => new Array<number>(n).fill(0)),
    ),
  );
  for (let p = 0; p < n; p++)
    for (let q = 0; q < n; q++)
      for (let r = 0; r < n; r++)
        for (let s = 0; s < n; s++) {
          let sum = 0;
          for (let i = 0; i < n; i++) {
            const cip = coeffs[i][p];
            if (cip === 0) continue;
            for (let j = 0; j < n; j++) {
              const cjq = coeffs[j][q];
              if (cjq === 0) continue;
              for (let k = 0; k < n; k++) {
                const ckr = coeffs[k][r];
                if (ckr === 0) continue;
                for (let l = 0; l < n; l++) {
                  sum += cip * cjq * ckr * coeffs[l][s] * ints.eri[i][j][k][l];
                }
              }
            }
          }
          g[p][q][r][s] = sum;
        }
  return { hmo, gmo: g };
}

/**
 * Parity-encoded qubit Hamiltonian and the two-qubit symmetry reduction.
 *
 * With block spin ordering (alpha modes first), the parity qubit at the
 * end of the alpha block carries the alpha-electron count parity and the
 * last qubit carries the total count parity.  Both are conserved by a
 * spin- and number-conserving Hamiltonian, so every term acts on those
 * positions with I or Z only; fixing the target sector replaces the Z's
 * by their eigenvalues and the two qubits are removed.
 */

import { SpinOrbitalIntegrals } from "./fermion.js";
import {
  Complex,
  PauliMap,
  PauliTerm,
  cAbs,
  cScale,
  identity,
  ladder,
  multiplyMaps,
} from "./pauli.js";

export function parityHamiltonian(ints: SpinOrbitalIntegrals): PauliMap {
  const n = ints.modes;
  const total = new PauliMap(n);
  total.addAll(identity(n), { re: ints.enuc, im: 0 });

  const creators: PauliMap[] = [];
  const annihilators: PauliMap[] = [];
  for (let p = 0; p < n; p++) {
    creators.push(ladder(n, p, true));
    annihilators.push(ladder(n, p, false));
  }

  for (let p = 0; p < n; p++) {
    for (let q = 0; q < n; q++) {
      const hpq = ints.h[p][q];
      if (hpq === 0) continue;
      total.addAll(multiplyMaps(creators[p], annihilators[q]), { re: hpq, im: 0 });
    }
  }
  for (let p = 0; p < n; p++) {
    for (let q = 0; q < n; q++) {
      for (let r = 0; r < n; r++) {
        for (let s = 0; s < n; s++) {
          const gpqrs = ints.g[p][q][r][s];
          if (gpqrs === 0) continue;
          // 1/2 <pq|rs> a+_p a+_q a_s a_r
          const left = multiplyMaps(creators[p], creators[q]);
          const right = multiplyMaps(annihilators[s], annihilators[r]);
          total.addAll(multiplyMaps(left, right), { re: 0.5 * gpqrs, im: 0 });
        }
      }
    }
  }
  return total;
}

export interface ReducedHamiltonian {
  qubits: number;
  terms: { coeff: number; letters: string }[];
}

/**
 * Remove the two parity qubits given the (nAlpha, nTotal) sector.
 * Positions removed: spatialCount-1 (alpha-block parity) and 2*spatialCount-1.
 */
export function reduceParityQubits(
  hamiltonian: PauliMap,
  spatialCount: number,
  nAlpha: number,
  nTotal: number,
): ReducedHamiltonian {
  const n = hamiltonian.qubits;
  const alphaPos = spatialCount - 1;
  const totalPos = n - 1;
  const alphaEigen = nAlpha % 2 === 0 ? 1 : -1;
  const totalEigen = nTotal % 2 === 0 ? 1 : -1;

  const reduced = new PauliMap(n - 2);
  for (const { coeff, letters } of hamiltonian.compact(1e-12)) {
    const la = letters[alphaPos];
    const lt = letters[totalPos];
    if ((la !== "I" && la !== "Z") || (lt !== "I" && lt !== "Z")) {
      throw new Error(
        `term ${letters} does not commute with the parity symmetries`,
      );
    }
    let factor = 1;
    if (la === "Z") factor *= alphaEigen;
    if (lt === "Z") factor *= totalEigen;
    const stripped =
      letters.slice(0, alphaPos) +
      letters.slice(alphaPos + 1, totalPos) +
      letters.slice(totalPos + 1);
    reduced.add(stripped, cScale(coeff, factor));
  }

  const terms: { coeff: number; letters: string }[] = [];
  for (const { coeff, letters } of reduced.compact(1e-12)) {
    if (Math.abs(coeff.im) > 1e-9 * Math.max(1, cAbs(coeff))) {
      throw new Error(`reduced term ${letters} has imaginary coefficient ${coeff.im}`);
    }
    terms.push({ coeff: coeff.re, letters });
  }
  return { qubits: n - 2, terms };
}

/** Parity-transform an occupation vector and drop the two tapered qubits. */
export function parityReferenceBits(
  occupations: number[],
  spatialCount: number,
): string {
  const n = occupations.length;
  const bits: number[] = [];
  let parity = 0;
  for (let j = 0; j < n; j++) {
    parity = (parity + occupations[j]) % 2;
    bits.push(parity);
  }
  const alphaPos = spatialCount - 1;
  const totalPos = n - 1;
  return bits.filter((_, j) => j !== alphaPos && j !== totalPos).join("");
}

/** Dense real-symmetric matrix of a Pauli term list (for validation). */
export function denseMatrix(
  terms: PauliTerm[] | { coeff: number | Complex; letters: string }[],
  qubits: number,
): number[][] {
  const dim = 1 << qubits;
  const out = Array.from({ length: dim }, () => new Array<number>(dim).fill(0));
  for (const term of terms) {
    const coeff = typeof term.coeff === "number" ? { re: term.coeff, im: 0 } : term.coeff;
    for (let col = 0; col < dim; col++) {
      let row = col;
      let phaseRe = 1;
      let phaseIm = 0;
      for (let q = 0; q < qubits; q++) {
        const bitPos = qubits - 1 - q; // qubit 0 is the most significant bit
        const bit = (col >> bitPos) & 1;
        const letter = term.letters[q];
        if (letter === "I") continue;
        if (letter === "Z") {
          if (bit === 1) {
            phaseRe = -phaseRe;
            phaseIm = -phaseIm;
          }
        } else if (letter === "X") {
          row ^= 1 << bitPos;
        } else {
          // Y: flips the bit with phase i(-1)^bit
          row ^= 1 << bitPos;
          const sign = bit === 1 ? -1 : 1;
          const re = -phaseIm * sign;
          const im = phaseRe * sign;
          phaseRe = re;
          phaseIm = im;
        }
      }
      const re = coeff.re * phaseRe - coeff.im * phaseIm;
      const im = coeff.re * phaseIm + coeff.im * phaseRe;
      if (Math.abs(im) > 1e-9) {
        throw new Error("dense matrix expected to be real");
      }
      out[row][col] += re;
    }
  }
  return out;
}

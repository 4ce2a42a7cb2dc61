/**
 * Sparse Pauli-sum algebra with complex coefficients.
 *
 * Strings are plain arrays over "IXYZ", one letter per qubit, index 0
 * being qubit 0 (leftmost in the serialized form, matching the consumer
 * convention of qubit 0 as the most significant bit).
 */

export interface Complex {
  re: number;
  im: number;
}

export const cAdd = (a: Complex, b: Complex): Complex => ({
  re: a.re + b.re,
  im: a.im + b.im,
});
export const cMul = (a: Complex, b: Complex): Complex => ({
  re: a.re * b.re - a.im * b.im,
  im: a.re * b.im + a.im * b.re,
});
export const cScale = (a: Complex, s: number): Complex => ({ re: a.re * s, im: a.im * s });
export const cAbs = (a: Complex): number => Math.hypot(a.re, a.im);

// i^k for k = 0..3
const I_POWERS: Complex[] = [
  { re: 1, im: 0 },
  { re: 0, im: 1 },
  { re: -1, im: 0 },
  { re: 0, im: -1 },
];

type Letter = "I" | "X" | "Y" | "Z";

// single-qubit products: LETTER_PRODUCT[a][b] = (phase power of i, letter)
const LETTER_PRODUCT: Record<Letter, Record<Letter, [number, Letter]>> = {
  I: { I: [0, "I"], X: [0, "X"], Y: [0, "Y"], Z: [0, "Z"] },
  X: { I: [0, "X"], X: [0, "I"], Y: [1, "Z"], Z: [3, "Y"] },
  Y: { I: [0, "Y"], X: [3, "Z"], Y: [0, "I"], Z: [1, "X"] },
  Z: { I: [0, "Z"], X: [1, "Y"], Y: [3, "X"], Z: [0, "I"] },
};

export interface PauliTerm {
  coeff: Complex;
  letters: string;
}

/** Terms keyed by letter string for cancellation-aware accumulation. */
export class PauliMap {
  readonly qubits: number;
  private terms = new Map<string, Complex>();

  constructor(qubits: number) {
    this.qubits = qubits;
  }

  add(letters: string, coeff: Complex): void {
    if (letters.length !== this.qubits) {
      throw new Error(`term ${letters} has wrong length`);
    }
    const existing = this.terms.get(letters);
    this.terms.set(letters, existing ? cAdd(existing, coeff) : coeff);
  }

  addAll(other: PauliMap, scale: Complex = { re: 1, im: 0 }): void {
    for (const [letters, coeff] of other.terms) this.add(letters, cMul(coeff, scale));
  }

  entries(): [string, Complex][] {
    return [...this.terms.entries()];
  }

  /** Drop terms below the cutoff and return a sorted array view. */
  compact(cutoff = 1e-12): PauliTerm[] {
    const out: PauliTerm[] = [];
    for (const [letters, coeff] of this.terms) {
      if (cAbs(coeff) >= cutoff) out.push({ coeff, letters });
    }
    out.sort((a, b) => (a.letters < b.letters ? -1 : a.letters > b.letters ? 1 : 0));
    return out;
  }
}

export function multiplyStrings(
  a: string,
  b: string,
): { phasePower: number; letters: string } {
  let phase = 0;
  let letters = "";
  for (let i = 0; i < a.length; i++) {
    const [p, letter] = LETTER_PRODUCT[a[i] as Letter][b[i] as Letter];
    phase = (phase + p) % 4;
    letters += letter;
  }
  return { phasePower: phase, letters };
}

export function multiplyMaps(a: PauliMap, b: PauliMap): PauliMap {
  const out = new PauliMap(a.qubits);
  for (const [sa, ca] of a.entries()) {
    for (const [sb, cb] of b.entries()) {
      const { phasePower, letters } = multiplyStrings(sa, sb);
      out.add(letters, cMul(cMul(ca, cb), I_POWERS[phasePower]));
    }
  }
  return out;
}

export function identity(qubits: number): PauliMap {
  const map = new PauliMap(qubits);
  map.add("I".repeat(qubits), { re: 1, im: 0 });
  return map;
}

function withLetter(qubits: number, position: number, letter: Letter): string {
  const chars = new Array<string>(qubits).fill("I");
  chars[position] = letter;
  return chars.join("");
}

/**
 * Parity-encoded ladder operators.  Qubit j stores the parity of modes
 * 0..j, so creation flips every qubit from j upward, picks up the sign
 * of the modes below j from Z_{j-1}, and projects onto n_j = 0:
 *
 *   a+_j = 1/2 * X_{j+1..n-1} (X_j Z_{j-1} - i Y_j)
 *   a_j  = 1/2 * X_{j+1..n-1} (X_j Z_{j-1} + i Y_j)
 */
export function ladder(qubits: number, mode: number, dagger: boolean): PauliMap {
  const map = new PauliMap(qubits);
  const chars = new Array<string>(qubits).fill("I");
  for (let k = mode + 1; k < qubits; k++) chars[k] = "X";
  const xTerm = chars.slice();
  xTerm[mode] = "X";
  if (mode > 0) xTerm[mode - 1] = "Z";
  const yTerm = chars.slice();
  yTerm[mode] = "Y";
  map.add(xTerm.join(""), { re: 0.5, im: 0 });
  map.add(yTerm.join(""), { re: 0, im: dagger ? -0.5 : 0.5 });
  return map;
}

export function numberOperator(qubits: number, mode: number): PauliMap {
  // n_j = 1/2 (1 - Z_j Z_{j-1}); n_0 = 1/2 (1 - Z_0)
  const map = new PauliMap(qubits);
  map.add("I".repeat(qubits), { re: 0.5, im: 0 });
  const chars = new Array<string>(qubits).fill("I");
  chars[mode] = "Z";
  if (mode > 0) chars[mode - 1] = "Z";
  map.add(chars.join(""), { re: -0.5, im: 0 });
  return map;
}

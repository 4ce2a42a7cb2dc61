/** Dense symmetric linear algebra: just enough for SCF and FCI. */

export type Matrix = number[][];

export function zeros(n: number, m: number): Matrix {
  return Array.from({ length: n }, () => new Array<number>(m).fill(0));
}

export function matmul(a: Matrix, b: Matrix): Matrix {
  const n = a.length;
  const k = b.length;
  const m = b[0].length;
  const out = zeros(n, m);
  for (let i = 0; i < n; i++) {
    for (let l = 0; l < k; l++) {
      const ail = a[i][l];
      if (ail === 0) continue;
      const row = b[l];
      const orow = out[i];
      for (let j = 0; j < m; j++) orow[j] += ail * row[j];
    }
  }
  return out;
}

export function transpose(a: Matrix): Matrix {
  const n = a.length;
  const m = a[0].length;
  const out = zeros(m, n);
  for (let i = 0; i < n; i++) for (let j = 0; j < m; j++) out[j][i] = a[i][j];
  return out;
}

export interface EigResult {
  values: number[]; // ascending
  vectors: Matrix; // columns are eigenvectors
}

/**
 * Cyclic Jacobi eigensolver for real symmetric matrices.
 * Deterministic and accurate to ~1e-13 relative; O(n^3) per sweep.
 */
export function eighSymmetric(input: Matrix, maxSweeps = 64): EigResult {
  const n = input.length;
  const a = input.map((row) => row.slice());
  const v = zeros(n, n);
  for (let i = 0; i < n; i++) v[i][i] = 1;

  for (let sweep = 0; sweep < maxSweeps; sweep++) {
    let off = 0;
    for (let p = 0; p < n; p++)
      for (let q = p + 1; q < n; q++) off += a[p][q] * a[p][q];
    if (Math.sqrt(off) < 1e-14 * (1 + frobenius(a))) break;
    for (let p = 0; p < n - 1; p++) {
      for (let q = p + 1; q < n; q++) {
        const apq = a[p][q];
        if (Math.abs(apq) < 1e-300) continue;
        const app = a[p][p];
        const aqq = a[q][q];
        const tau = (aqq - app) / (2 * apq);
        const t =
          tau >= 0
            ? 1 / (tau + Math.sqrt(1 + tau * tau))
            : -1 / (-tau + Math.sqrt(1 + tau * tau));
        const c = 1 / Math.sqrt(1 + t * t);
        const s = t * c;
        for (let k = 0; k < n; k++) {
          const akp = a[k][p];
          const akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (let k = 0; k < n; k++) {
          const apk = a[p][k];
          const aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (let k = 0; k < n; k++) {
          const vkp = v[k][p];
          const vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  const order = Array.from({ length: n }, (_, i) => i).sort(
    (i, j) => a[i][i] - a[j][j],
  );
  const values = order.map((i) => a[i][i]);
  const vectors = zeros(n, n);
  for (let col = 0; col < n; col++)
    for (let row = 0; row < n; row++) vectors[row][col] = v[row][order[col]];
  return { values, vectors };
}

function frobenius(a: Matrix): number {
  let s = 0;
  for (const row of a) for (const x of row) s += x * x;
  return Math.sqrt(s);
}

/** X = U diag(e^-1/2) U^T for a positive-definite symmetric matrix. */
export function inverseSqrt(a: Matrix): Matrix {
  const { values, vectors } = eighSymmetric(a);
  const n = a.length;
  const scaled = zeros(n, n);
  for (let col = 0; col < n; col++) {
    if (values[col] <= 0) {
      throw new Error(`matrix not positive definite: eigenvalue ${values[col]}`);
    }
    const w = 1 / Math.sqrt(values[col]);
    for (let row = 0; row < n; row++) scaled[row][col] = vectors[row][col] * w;
  }
  return matmul(scaled, transpose(vectors));
}

/**
 * End-to-end generation of the 10-qubit hydrogen-chain Hamiltonian file:
 * integrals -> RHF -> MO spin-orbital integrals -> FCI (determinant
 * basis) -> parity-encoded Pauli operator -> two-qubit reduction ->
 * serialized Pauli-sum file plus an energies sidecar.
 */

import { computeIntegrals, linearChain, Vec3 } from "./integrals.js";
import {
  determinantEnergy,
  fciGroundEnergy,
  spinOrbitalIntegrals,
  SpinOrbitalIntegrals,
} from "./fermion.js";
import {
  parityHamiltonian,
  parityReferenceBits,
  ReducedHamiltonian,
  reduceParityQubits,
} from "./parity.js";
import { moIntegrals, runRhf } from "./scf.js";

export interface GenerationResult {
  reduced: ReducedHamiltonian;
  referenceBits: string;
  hfEnergy: number;
  hfDeterminantEnergy: number;
  fciEnergy: number;
  fciDimension: number;
  geometry: Vec3[];
  bondLength: number;
  scfIterations: number;
  spinOrbitals: SpinOrbitalIntegrals;
}

export const ATOM_COUNT = 6;
export const OCCUPIED_PAIRS = 3;

export function generateHydrogenChain(bondLengthAngstrom = 1.5): GenerationResult {
  const geometry = linearChain(ATOM_COUNT, bondLengthAngstrom);
  const ints = computeIntegrals(geometry);
  const scf = runRhf(ints, OCCUPIED_PAIRS);
  if (!scf.converged) {
    throw new Error(`SCF did not converge in ${scf.iterations} iterations`);
  }
  const { hmo, gmo } = moIntegrals(ints, scf.coefficients);
  const so = spinOrbitalIntegrals(hmo, gmo, ints.enuc);

  // Hartree-Fock determinant: lowest orbitals of each spin block.
  const occupations = new Array<number>(2 * ATOM_COUNT).fill(0);
  let hfMask = 0;
  for (let i = 0; i < OCCUPIED_PAIRS; i++) {
    occupations[i] = 1;
    occupations[i + ATOM_COUNT] = 1;
    hfMask |= (1 << i) | (1 << (i + ATOM_COUNT));
  }
  const hfDeterminantEnergy = determinantEnergy(so, hfMask);
  if (Math.abs(hfDeterminantEnergy - scf.energy) > 1e-8) {
    throw new Error(
      `HF determinant energy ${hfDeterminantEnergy} disagrees with SCF ${scf.energy}`,
    );
  }

  const fci = fciGroundEnergy(so, ATOM_COUNT, OCCUPIED_PAIRS, OCCUPIED_PAIRS);

  const qubitOperator = parityHamiltonian(so);
  const reduced = reduceParityQubits(
    qubitOperator,
    ATOM_COUNT,
    OCCUPIED_PAIRS,
    2 * OCCUPIED_PAIRS,
  );
  const referenceBits = parityReferenceBits(occupations, ATOM_COUNT);

  return {
    reduced,
    referenceBits,
    hfEnergy: scf.energy,
    hfDeterminantEnergy,
    fciEnergy: fci.energy,
    fciDimension: fci.dimension,
    geometry,
    bondLength: bondLengthAngstrom,
    scfIterations: scf.iterations,
    spinOrbitals: so,
  };
}

/** Pauli-sum file format of the consumer: count line, # ref comment, terms. */
export function serializePauliFile(result: GenerationResult): string {
  const lines = [String(result.reduced.qubits)];
  lines.push(`# ref: ${result.referenceBits}`);
  for (const { coeff, letters } of result.reduced.terms) {
    lines.push(`${coeff} ${letters}`);
  }
  return lines.join("\n") + "\n";
}

export function serializeMeta(result: GenerationResult): string {
  return (
    JSON.stringify(
      {
        n_qubits: result.reduced.qubits,
        hf_energy: result.hfEnergy,
        fci_energy: result.fciEnergy,
        fci_dimension: result.fciDimension,
        bond_length_angstrom: result.bondLength,
        geometry: result.geometry,
        geometry_units: "bohr",
        n_terms: result.reduced.terms.length,
        reference_bits: result.referenceBits,
      },
      null,
      2,
    ) + "\n"
  );
}

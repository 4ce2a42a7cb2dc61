#!/usr/bin/env node
/** chemgen --bond-length 1.5 --out h6.pauli */

import { writeFileSync } from "node:fs";
import { generateHydrogenChain, serializeMeta, serializePauliFile } from "./generate.js";

function parseArgs(argv: string[]): { bondLength: number; out: string } {
  let bondLength = 1.5;
  let out = "h6.pauli";
  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--bond-length":
        bondLength = Number(argv[++i]);
        if (!Number.isFinite(bondLength) || bondLength <= 0) {
          throw new Error("--bond-length expects a positive number (angstrom)");
        }
        break;
      case "--out":
        out = argv[++i];
        if (!out) throw new Error("--out expects a path");
        break;
      case "--help":
        console.log("usage: chemgen [--bond-length 1.5] [--out h6.pauli]");
        process.exit(0);
        break;
      default:
        throw new Error(`unknown argument ${argv[i]}`);
    }
  }
  return { bondLength, out };
}

function metaPath(out: string): string {
  return out.endsWith(".pauli") ? out.slice(0, -".pauli".length) + ".meta.json" : out + ".meta.json";
}

function main(): void {
  const { bondLength, out } = parseArgs(process.argv.slice(2));
  const result = generateHydrogenChain(bondLength);
  writeFileSync(out, serializePauliFile(result), "utf-8");
  writeFileSync(metaPath(out), serializeMeta(result), "utf-8");
  console.log(
    `wrote ${out} (${result.reduced.qubits} qubits, ${result.reduced.terms.length} terms)`,
  );
  console.log(
    `HF ${result.hfEnergy.toFixed(10)} Ha, FCI ${result.fciEnergy.toFixed(10)} Ha ` +
      `(dim ${result.fciDimension}), reference ${result.referenceBits}`,
  );
}

main();

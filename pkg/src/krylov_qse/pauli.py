"""Weighted Pauli-string operators and the disordered Heisenberg ring.

Every Hamiltonian in the package is a :class:`PauliSum`: a real-weighted,
canonically merged list of Pauli strings on ``n`` qubits.  The module also
owns the plain-text Hamiltonian file format used to ingest externally
generated operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

PAULI_LETTERS = "IXYZ"

# Merged terms with |coefficient| below this are dropped.
COEFF_CUTOFF = 1e-14


class PauliFormatError(ValueError):
    """Raised for malformed Pauli-sum documents or invalid operator data."""


@dataclass(frozen=True)
class PauliString:
    """A single tensor product of Pauli letters, one per qubit."""

    n: int
    letters: str

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise PauliFormatError(f"qubit count must be positive, got {self.n}")
        if len(self.letters) != self.n:
            raise PauliFormatError(
                f"string {self.letters!r} has length {len(self.letters)}, expected {self.n}"
            )
        bad = set(self.letters) - set(PAULI_LETTERS)
        if bad:
            raise PauliFormatError(f"invalid Pauli letters {sorted(bad)} in {self.letters!r}")


@dataclass(frozen=True)
class PauliSum:
    """Hermitian operator as a merged, sorted tuple of (coefficient, string).

    Instances are immutable and hashable, so they can key caches and be
    shared across workers.  Use :meth:`from_terms` to build one; it merges
    duplicate strings, drops negligible coefficients and fixes the term
    order (lexicographic in the letters).
    """

    n: int
    terms: tuple[tuple[float, PauliString], ...]

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[float, str | PauliString]]) -> "PauliSum":
        merged: dict[str, float] = {}
        for coeff, string in terms:
            if isinstance(string, PauliString):
                if string.n != n:
                    raise PauliFormatError(
                        f"term on {string.n} qubits in a {n}-qubit operator"
                    )
                letters = string.letters
            else:
                letters = string
                PauliString(n, letters)  # validate
            coeff = float(coeff)
            merged[letters] = merged.get(letters, 0.0) + coeff
        kept = tuple(
            (c, PauliString(n, s))
            for s, c in sorted(merged.items())
            if abs(c) >= COEFF_CUTOFF
        )
        return cls(n=n, terms=kept)

    @property
    def num_terms(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class DisorderSpec:
    """On-site field configuration for the spin ring.

    Either ``fields`` gives explicit values h_i, or ``seed`` selects a
    reproducible draw of each h_i from the open interval (-h, h).
    """

    J: float
    h: float
    fields: Optional[tuple[float, ...]] = None
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.fields is None and self.seed is None:
            raise ValueError("DisorderSpec needs explicit fields or a seed")
        if self.fields is not None and self.seed is not None:
            raise ValueError("give either explicit fields or a seed, not both")
        if self.seed is not None and self.h <= 0:
            raise ValueError("disorder bound h must be > 0 when fields are drawn")


def resolve_fields(spec: DisorderSpec, n: int) -> tuple[float, ...]:
    """Return the n on-site fields, drawing them when given a seed.

    Drawing uses numpy's PCG64 generator seeded with ``spec.seed`` and a
    uniform draw over (-h, h); the generator choice is fixed so disorder
    instances reproduce across machines.
    """
    if spec.fields is not None:
        if len(spec.fields) != n:
            raise ValueError(f"expected {n} fields, got {len(spec.fields)}")
        return tuple(float(f) for f in spec.fields)
    rng = np.random.default_rng(spec.seed)
    fields = rng.uniform(-spec.h, spec.h, size=n)
    # uniform() is half-open at the top; reject the measure-zero endpoints
    # so every h_i lies strictly inside (-h, h).
    while np.any(np.abs(fields) >= spec.h):
        bad = np.abs(fields) >= spec.h
        fields[bad] = rng.uniform(-spec.h, spec.h, size=int(bad.sum()))
    return tuple(float(f) for f in fields)


def build_spin_ring(n: int, spec: DisorderSpec) -> PauliSum:
    """Periodic Heisenberg ring with a random longitudinal field.

    H = sum_i J (X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}) + sum_i h_i Z_i,
    with site n+1 identified with site 1.  Rings with n < 3 are rejected:
    at n = 2 the literal periodic sum visits the single bond twice.
    """
    if n < 3:
        raise ValueError(f"spin ring needs n >= 3, got {n}")
    fields = resolve_fields(spec, n)
    terms: list[tuple[float, str]] = []
    for i in range(n):
        j = (i + 1) % n
        for letter in "XYZ":
            s = ["I"] * n
            s[i] = letter
            s[j] = letter
            terms.append((spec.J, "".join(s)))
    for i, hi in enumerate(fields):
        s = ["I"] * n
        s[i] = "Z"
        terms.append((hi, "".join(s)))
    return PauliSum.from_terms(n, terms)


def field_only_ground_bits(fields: Sequence[float]) -> str:
    """Ground-state bitstring of the pure-field Hamiltonian sum_i h_i Z_i.

    Z|1> = -|1>, so h_i <Z_i> is minimised by bit 1 whenever h_i > 0.
    Ties (h_i = 0) resolve to 0.
    """
    return "".join("1" if hi > 0 else "0" for hi in fields)


def parse_pauli_sum(text: str) -> PauliSum:
    """Parse the plain-text Pauli-sum format into a canonical PauliSum."""
    operator, _ = parse_pauli_document(text)
    return operator


def parse_pauli_document(text: str) -> tuple[PauliSum, Optional[str]]:
    """Parse a Pauli-sum document, returning the operator and any ``# ref:``
    reference bitstring carried in the comments."""
    lines = text.split("\n")
    n: Optional[int] = None
    ref_bits: Optional[str] = None
    terms: list[tuple[float, str]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("ref:"):
                candidate = body[len("ref:"):].strip()
                if n is None or len(candidate) != n or set(candidate) - {"0", "1"}:
                    raise PauliFormatError(
                        f"line {lineno}: reference bitstring {candidate!r} invalid"
                    )
                ref_bits = candidate
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError as exc:
                raise PauliFormatError(f"line {lineno}: expected qubit count, got {line!r}") from exc
            if n <= 0:
                raise PauliFormatError(f"line {lineno}: qubit count must be positive")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise PauliFormatError(f"line {lineno}: expected '<coefficient> <string>', got {line!r}")
        try:
            coeff = float(parts[0])
        except ValueError as exc:
            raise PauliFormatError(f"line {lineno}: bad coefficient {parts[0]!r}") from exc
        if not np.isfinite(coeff):
            raise PauliFormatError(f"line {lineno}: non-finite coefficient {parts[0]!r}")
        string = parts[1]
        if len(string) != n:
            raise PauliFormatError(
                f"line {lineno}: string length {len(string)} != declared n = {n}"
            )
        if set(string) - set(PAULI_LETTERS):
            raise PauliFormatError(f"line {lineno}: invalid letters in {string!r}")
        terms.append((coeff, string))
    if n is None:
        raise PauliFormatError("document declares no qubit count")
    return PauliSum.from_terms(n, terms), ref_bits


def serialize_pauli_sum(operator: PauliSum, ref_bits: Optional[str] = None) -> str:
    """Render a PauliSum in the file format (canonical term order, LF endings)."""
    lines = [str(operator.n)]
    if ref_bits is not None:
        if len(ref_bits) != operator.n or set(ref_bits) - {"0", "1"}:
            raise PauliFormatError(f"reference bitstring {ref_bits!r} invalid")
        lines.append(f"# ref: {ref_bits}")
    for coeff, string in operator.terms:
        lines.append(f"{coeff!r} {string.letters}")
    return "\n".join(lines) + "\n"


def load_pauli_file(path: str) -> tuple[PauliSum, Optional[str]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_pauli_document(fh.read())

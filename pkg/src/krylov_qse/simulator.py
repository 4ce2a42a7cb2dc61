"""Exact dense statevector backend.

Stand-in for the quantum computer: applies Pauli-sum operators without
materializing dense matrices, diagonalizes exactly (the truth oracle),
and evolves states in real time via a cached eigendecomposition.

Bit convention, fixed package-wide: qubit 0 maps to the MOST significant
bit of the amplitude index, so ``basis_state("10")`` puts amplitude 1 at
index 2.  All modules go through :func:`basis_state` rather than touching
raw indices.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum

# Dense diagonalization ceiling: 2^14 = 16384 keeps matrices within memory.
MAX_DENSE_QUBITS = 14


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the 2^n computational basis states."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        if self.amplitudes.shape != (2**self.n,):
            raise ValueError(
                f"amplitude vector has shape {self.amplitudes.shape}, expected ({2**self.n},)"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Full eigenspectrum summary produced by exact diagonalization."""

    eigenvalues: np.ndarray
    ground_energy: float
    ground_state: StateVector
    spectral_norm: float


# PauliSum -> (eigenvalues ascending, eigenvector columns); single-writer
# insertion under the lock, lock-free reads of the immutable entries.
_EIG_CACHE: dict[PauliSum, tuple[np.ndarray, np.ndarray]] = {}
_EIG_LOCK = threading.Lock()


def basis_state(bits: str) -> StateVector:
    """Computational basis state for a bitstring, qubit 0 leftmost."""
    if not bits:
        raise ValueError("empty bitstring: zero qubits")
    if set(bits) - {"0", "1"}:
        raise ValueError(f"bitstring {bits!r} has characters outside 0/1")
    n = len(bits)
    amplitudes = np.zeros(2**n, dtype=np.complex128)
    amplitudes[int(bits, 2)] = 1.0
    return StateVector(n=n, amplitudes=amplitudes)


def _string_action(n: int, letters: str) -> tuple[int, np.ndarray]:
    """Decompose one Pauli string into an index flip mask and per-index phases.

    P|b> = phase(b) |b XOR flip| with flip set on X/Y qubits and
    phase(b) = i^{#Y} * (-1)^{popcount(b AND yz_mask)}.
    """
    dim = 1 << n
    idx = np.arange(dim)
    flip = 0
    parity = np.zeros(dim, dtype=np.int64)
    num_y = 0
    for qubit, letter in enumerate(letters):
        bitpos = n - 1 - qubit  # qubit 0 <-> most significant bit
        if letter == "I":
            continue
        if letter in "XY":
            flip |= 1 << bitpos
        if letter in "YZ":
            parity += (idx >> bitpos) & 1
        if letter == "Y":
            num_y += 1
    phases = (1j**num_y) * np.where(parity % 2 == 0, 1.0, -1.0)
    return flip, phases.astype(np.complex128)


# PauliSum -> [(coeff, flip, phases)]; same discipline as the eigencache.
_ACTION_CACHE: dict[PauliSum, list[tuple[float, int, np.ndarray]]] = {}


def _term_actions(operator: PauliSum) -> list[tuple[float, int, np.ndarray]]:
    cached = _ACTION_CACHE.get(operator)
    if cached is not None:
        return cached
    actions = [
        (coeff, *_string_action(operator.n, string.letters))
        for coeff, string in operator.terms
    ]
    with _EIG_LOCK:
        return _ACTION_CACHE.setdefault(operator, actions)


def apply_pauli_sum(operator: PauliSum, state: StateVector) -> StateVector:
    """Compute H|v> term by term; never builds the dense matrix."""
    if operator.n != state.n:
        raise ValueError(f"operator on {operator.n} qubits, state on {state.n}")
    dim = 1 << state.n
    out = np.zeros(dim, dtype=np.complex128)
    idx = np.arange(dim)
    for coeff, flip, phases in _term_actions(operator):
        src = idx ^ flip
        out += coeff * phases[src] * state.amplitudes[src]
    return StateVector(n=state.n, amplitudes=out)


def dense_matrix(operator: PauliSum) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the operator (bounded by the qubit ceiling)."""
    if operator.n > MAX_DENSE_QUBITS:
        raise ValueError(
            f"n = {operator.n} exceeds the dense ceiling of {MAX_DENSE_QUBITS} qubits"
        )
    dim = 1 << operator.n
    mat = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim)
    for coeff, string in operator.terms:
        flip, phases = _string_action(operator.n, string.letters)
        mat[idx ^ flip, idx] += coeff * phases
    return mat


def _eigendecomposition(operator: PauliSum) -> tuple[np.ndarray, np.ndarray]:
    cached = _EIG_CACHE.get(operator)
    if cached is not None:
        return cached
    evals, evecs = np.linalg.eigh(dense_matrix(operator))
    with _EIG_LOCK:
        return _EIG_CACHE.setdefault(operator, (evals, evecs))


def exact_ground(operator: PauliSum) -> Spectrum:
    """Full Hermitian eigendecomposition; the truth oracle for every metric.

    On ground-state degeneracy the solver's first eigenvector is returned.
    """
    evals, evecs = _eigendecomposition(operator)
    ground = StateVector(n=operator.n, amplitudes=evecs[:, 0].copy())
    return Spectrum(
        eigenvalues=evals,
        ground_energy=float(evals[0]),
        ground_state=ground,
        spectral_norm=float(max(abs(evals[0]), abs(evals[-1]))),
    )


def evolve_state(operator: PauliSum, state: StateVector, t: float) -> StateVector:
    """Return e^{-iHt}|v>, computed via the cached eigendecomposition."""
    if operator.n != state.n:
        raise ValueError(f"operator on {operator.n} qubits, state on {state.n}")
    evals, evecs = _eigendecomposition(operator)
    coeffs = evecs.conj().T @ state.amplitudes
    evolved = evecs @ (np.exp(-1j * evals * t) * coeffs)
    return StateVector(n=state.n, amplitudes=evolved)


def state_overlap(u: StateVector, v: StateVector) -> complex:
    """<u|v> with conjugation on the first argument."""
    if u.n != v.n:
        raise ValueError(f"states on {u.n} and {v.n} qubits")
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def expectation(operator: PauliSum, state: StateVector) -> float:
    """<v|H|v> / <v|v>; real for Hermitian operators."""
    norm_sq = np.vdot(state.amplitudes, state.amplitudes).real
    if norm_sq == 0.0:
        raise ValueError("expectation of the zero vector is undefined")
    value = state_overlap(state, apply_pauli_sum(operator, state)) / norm_sq
    scale = max(1.0, abs(value))
    if abs(value.imag) > 1e-10 * scale:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)

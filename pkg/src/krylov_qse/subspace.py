"""Quantum-derived raw data for subspace expansion.

Two data products feed the solvers: Hamiltonian moments <phi0|H^k|phi0>
for the power basis, and the (S, H, H^2) matrix-element tensors for the
basis generated by real time evolution.  Both are computed exactly on the
statevector backend; moments follow the same forward data path a hardware
run would feed (repeated operator application, no spectral shortcuts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum
from .simulator import StateVector, apply_pauli_sum, evolve_state, exact_ground, state_overlap

# Abort moment recursion beyond this magnitude; callers can rescale H.
MOMENT_OVERFLOW = 1e290

_UNIT_NORM_TOL = 1e-10


class MomentOverflowError(RuntimeError):
    """Moments exceeded the floating-point safety ceiling."""


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """mu_k = <phi0|H^k|phi0> for k = 0..K, stored as a real vector."""

    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("moment sequence must be a non-empty vector")

    @property
    def max_power(self) -> int:
        return self.values.size - 1

    def truncated(self, K: int) -> "MomentSequence":
        if K > self.max_power:
            raise ValueError(f"only {self.max_power} moments available, need {K}")
        return MomentSequence(values=self.values[: K + 1].copy())


@dataclass(frozen=True, eq=False)
class SubspaceProblem:
    """Paired (H, S) matrices of a generalized eigenvalue problem."""

    hmat: np.ndarray
    smat: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        expected = (self.dim, self.dim)
        if self.hmat.shape != expected or self.smat.shape != expected:
            raise ValueError(
                f"matrix shapes {self.hmat.shape}, {self.smat.shape} != {expected}"
            )


@dataclass(frozen=True, eq=False)
class RteTensors:
    """Matrix elements over the real-time-evolution basis |psi_j> = e^{-i j dt H}|phi0>.

    s[i, j]  = <psi_i|psi_j>
    h1[i, j] = <psi_i|H|psi_j>
    h2[i, j] = <psi_i|H^2|psi_j>   (needed for the variance criterion)
    """

    s: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    dt: float
    order: int

    def leading(self, R: int) -> "RteTensors":
        if R > self.order:
            raise ValueError(f"tensors cover order {self.order}, need {R}")
        return RteTensors(
            s=self.s[:R, :R].copy(),
            h1=self.h1[:R, :R].copy(),
            h2=self.h2[:R, :R].copy(),
            dt=self.dt,
            order=R,
        )


def _check_reference(phi0: StateVector) -> None:
    if abs(phi0.norm - 1.0) > _UNIT_NORM_TOL:
        raise ValueError(f"reference state norm {phi0.norm} deviates from 1")


def compute_moments(operator: PauliSum, phi0: StateVector, K: int) -> MomentSequence:
    """Forward recursion mu_k = <phi0|H^k|phi0>, k matrix applications total."""
    if K < 0:
        raise ValueError("K must be >= 0")
    _check_reference(phi0)
    values = np.empty(K + 1, dtype=np.float64)
    values[0] = 1.0
    vec = phi0
    for k in range(1, K + 1):
        vec = apply_pauli_sum(operator, vec)
        mu = state_overlap(phi0, vec)
        if abs(mu) > MOMENT_OVERFLOW or not math.isfinite(abs(mu)):
            raise MomentOverflowError(
                f"|mu_{k}| = {abs(mu):.3e} exceeds {MOMENT_OVERFLOW:.0e}; "
                "consider the spectral rescale option (H -> H/||H||)"
            )
        values[k] = mu.real
    return MomentSequence(values=values)


def hankel_matrices(moments: MomentSequence, R: int) -> SubspaceProblem:
    """Hankel pair S_ij = mu_{i+j}, H_ij = mu_{i+j+1} for a basis of order R."""
    if R < 1:
        raise ValueError("order must be >= 1")
    if moments.max_power < 2 * R - 1:
        raise ValueError(
            f"need moments through index {2 * R - 1}, have {moments.max_power}"
        )
    mu = moments.values
    idx = np.add.outer(np.arange(R), np.arange(R))
    return SubspaceProblem(hmat=mu[idx + 1].copy(), smat=mu[idx].copy(), dim=R)


def default_timestep(operator: PauliSum) -> float:
    """RTE timestep pi / ||H|| (spectral norm)."""
    return math.pi / exact_ground(operator).spectral_norm


def rte_tensors(operator: PauliSum, phi0: StateVector, R: int, dt: float) -> RteTensors:
    """Exact (S, H, H^2) tensors over the first R evolution times j*dt."""
    if R < 1:
        raise ValueError("order must be >= 1")
    if dt <= 0:
        raise ValueError("dt must be positive")
    _check_reference(phi0)
    states = [phi0]
    for _ in range(R - 1):
        states.append(evolve_state(operator, states[-1], dt))
    h_states = [apply_pauli_sum(operator, psi) for psi in states]

    s = np.eye(R, dtype=np.complex128)
    h1 = np.zeros((R, R), dtype=np.complex128)
    h2 = np.zeros((R, R), dtype=np.complex128)
    for i in range(R):
        h1[i, i] = state_overlap(states[i], h_states[i]).real
        h2[i, i] = state_overlap(h_states[i], h_states[i]).real
        for j in range(i + 1, R):
            s[i, j] = state_overlap(states[i], states[j])
            s[j, i] = s[i, j].conjugate()
            h1[i, j] = state_overlap(states[i], h_states[j])
            h1[j, i] = h1[i, j].conjugate()
            h2[i, j] = state_overlap(h_states[i], h_states[j])
            h2[j, i] = h2[i, j].conjugate()
    return RteTensors(s=s, h1=h1, h2=h2, dt=dt, order=R)

"""Generalized Hermitian eigensolver with overlap thresholding.

The solver reduces H c = E S c by canonical orthogonalization: diagonalize
S, keep eigendirections above the threshold, whiten, diagonalize, and map
coefficients back.  Plain QSE is the tau = 0 case, which keeps every
strictly positive overlap eigenvalue; near-zero positive eigenvalues are
still inverted, deliberately preserving the instability that thresholding
and partitioning exist to fix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .subspace import SubspaceProblem


class SubspaceCollapseError(RuntimeError):
    """Thresholding removed every overlap eigendirection (or numerics broke)."""


class ScanFailedError(RuntimeError):
    """Every grid point of a threshold scan was unsolvable."""


@dataclass(frozen=True, eq=False)
class GevpSolution:
    """Solution of a (possibly thresholded) generalized eigenvalue problem.

    ``ground_coeffs`` lives in the original, un-projected basis (length =
    input dimension, confined to the image of the retained subspace).
    """

    energies: np.ndarray
    ground_coeffs: np.ndarray
    retained_dim: int
    dropped_eigenvalues: np.ndarray

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])


@dataclass(frozen=True)
class ThresholdPolicy:
    """How to pick tau: none (tau = 0), fixed(tau), or scaled(a) with
    tau = 10^-a * sqrt(||dH||^2 + ||dS||^2)."""

    mode: str
    tau: float = 0.0
    a: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in ("none", "fixed", "scaled"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")
        if self.mode == "fixed" and self.tau < 0:
            raise ValueError("fixed threshold must be >= 0")

    @classmethod
    def none(cls) -> "ThresholdPolicy":
        return cls(mode="none")

    @classmethod
    def fixed(cls, tau: float) -> "ThresholdPolicy":
        return cls(mode="fixed", tau=tau)

    @classmethod
    def scaled(cls, a: float) -> "ThresholdPolicy":
        return cls(mode="scaled", a=a)


def solve_gevp(problem: SubspaceProblem, tau: float = 0.0) -> GevpSolution:
    """Solve H c = E S c keeping overlap eigenvalues above max(tau, 0).

    Ground selection: lowest eigenvalue, first index on ties.  Raises
    :class:`SubspaceCollapseError` when nothing is retained.
    """
    if tau < 0:
        raise ValueError("threshold must be >= 0")
    svals, svecs = np.linalg.eigh(problem.smat)
    keep = svals > max(tau, 0.0)
    retained = int(np.sum(keep))
    if retained == 0:
        raise SubspaceCollapseError(
            f"no overlap eigenvalue above tau = {tau:.3e} (dim {problem.dim})"
        )
    dropped = svals[~keep].copy()
    whitener = svecs[:, keep] / np.sqrt(svals[keep])
    reduced = whitener.conj().T @ problem.hmat @ whitener
    if not np.all(np.isfinite(reduced)):
        raise SubspaceCollapseError("whitened problem is not finite")
    reduced = 0.5 * (reduced + reduced.conj().T)
    energies, vecs = np.linalg.eigh(reduced)
    coeffs = whitener @ vecs[:, 0]
    return GevpSolution(
        energies=energies,
        ground_coeffs=coeffs,
        retained_dim=retained,
        dropped_eigenvalues=dropped,
    )


def scaled_threshold(delta_h: np.ndarray, delta_s: np.ndarray, a: float) -> float:
    """tau = 10^-a * sqrt(eta_H^2 + eta_S^2) from the exact perturbation norms.

    The perturbations are known exactly because noise is simulated; eta is
    the spectral (2-) norm of each.
    """
    if delta_h.shape != delta_s.shape or delta_h.shape[0] != delta_h.shape[1]:
        raise ValueError("perturbations must be square matrices of equal dimension")
    eta_h = np.linalg.norm(delta_h, 2)
    eta_s = np.linalg.norm(delta_s, 2)
    return float(10.0 ** (-a) * np.hypot(eta_h, eta_s))


def resolve_threshold(
    policy: ThresholdPolicy, delta_h: Optional[np.ndarray], delta_s: Optional[np.ndarray]
) -> float:
    if policy.mode == "none":
        return 0.0
    if policy.mode == "fixed":
        return policy.tau
    if delta_h is None or delta_s is None:
        raise ValueError("scaled threshold needs the perturbation matrices")
    return scaled_threshold(delta_h, delta_s, policy.a)


def default_a_grid() -> np.ndarray:
    """50 evenly spaced threshold-scale values over [-0.5, 5]."""
    return np.linspace(-0.5, 5.0, 50)


@dataclass(frozen=True, eq=False)
class TqseScanResult:
    best_a: float
    solution: GevpSolution
    best_error: float
    attempted: int
    solved: int


def tqse_scan(
    noisy: SubspaceProblem,
    delta_h: np.ndarray,
    delta_s: np.ndarray,
    truth: float,
    grid: Optional[Sequence[float]] = None,
) -> TqseScanResult:
    """Threshold scan: solve at every a, keep the a with smallest relative
    energy error against the exact ground energy.

    Unsolvable grid points are skipped; ties resolve to the smallest a.
    This mirrors the best-case protocol in which the exact solution and the
    exact perturbations are available to tune the threshold.
    """
    if truth == 0:
        raise ValueError("scan needs a nonzero true ground energy")
    a_values = default_a_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if a_values.size == 0:
        raise ValueError("threshold scan grid is empty")
    best: Optional[tuple[float, float, GevpSolution]] = None
    solved = 0
    for a in np.sort(a_values):
        tau = scaled_threshold(delta_h, delta_s, float(a))
        try:
            sol = solve_gevp(noisy, tau)
        except SubspaceCollapseError:
            continue
        solved += 1
        err = abs((sol.ground_energy - truth) / truth)
        if best is None or err < best[0]:
            best = (err, float(a), sol)
    if best is None:
        raise ScanFailedError("every grid point of the threshold scan was unsolvable")
    return TqseScanResult(
        best_a=best[1],
        solution=best[2],
        best_error=best[0],
        attempted=int(a_values.size),
        solved=solved,
    )

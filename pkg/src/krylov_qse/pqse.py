"""Partitioned subspace expansion engine.

One large Krylov problem of order R is replaced by a sequence of smaller
ones: each iteration diagonalizes the Hamiltonian in a low-order Krylov
space grown from the previous iterate's ground state, and a variance
criterion picks the sub-order.  No new quantum data is needed beyond the
order-R matrix elements: the iterate is tracked classically through

  * inner-product coefficients o_m (power basis), which express iterate
    matrix elements as combinations of reference-state moments, and
  * reconstruction coefficients b_m (any basis), which express the iterate
    as sum_m b_m A^m |phi0> for observable evaluation.

Both updates are discrete convolutions of the optimal sub-problem
coefficients with the previous coefficient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .gevp import SubspaceCollapseError, solve_gevp
from .pauli import PauliSum
from .simulator import StateVector, apply_pauli_sum, evolve_state
from .subspace import MomentSequence, RteTensors, SubspaceProblem

_IMAG_TOL = 1e-12


class DegenerateCandidateError(RuntimeError):
    """Candidate state has no trustworthy positive norm under the data.

    Covers both non-positive norms and norms smaller than the floating-point
    cancellation bar of their own accumulation: the solver guarantees
    c^dag S c = 1 in exact arithmetic, so a norm that cannot be resolved
    against the gross magnitude of the sum is numerical junk, not physics.
    """


# Norm must exceed this multiple of eps times the gross (unsigned) sum.
_CANCEL_GUARD = 256 * np.finfo(np.float64).eps


def _check_norm(norm: float, gross: float) -> None:
    if not np.isfinite(norm) or norm <= _CANCEL_GUARD * gross:
        raise DegenerateCandidateError(
            f"candidate norm^2 = {norm:.3e} not positive beyond the "
            f"cancellation bar {_CANCEL_GUARD * gross:.3e}"
        )


class PqseError(RuntimeError):
    """The partition loop could not start (no solvable candidate)."""


def partition_order(sequence: Sequence[int]) -> int:
    """Order of a partition sequence: O(r_1..r_P) = 1 - P + sum r_k."""
    if len(sequence) == 0:
        raise ValueError("partition sequence is empty")
    if any(r < 1 for r in sequence):
        raise ValueError(f"sub-orders must be >= 1, got {tuple(sequence)}")
    return 1 - len(sequence) + int(sum(sequence))


def outer_coeffs(c: Sequence[complex]) -> np.ndarray:
    """o_y = sum_{k+l=y} conj(c_k) c_l; real by conjugate symmetry."""
    vec = np.asarray(c, dtype=np.complex128)
    if vec.size == 0:
        raise ValueError("coefficient vector is empty")
    out = np.convolve(np.conj(vec), vec)
    scale = max(1.0, float(np.max(np.abs(out))))
    residue = float(np.max(np.abs(out.imag)))
    if residue > _IMAG_TOL * scale:
        raise ValueError(f"inner-product coefficients have imaginary residue {residue:.3e}")
    return out.real.copy()


def convolve_coeffs(o_old: Sequence[float], o_step: Sequence[float]) -> np.ndarray:
    """Full discrete convolution; the coefficient-update rule."""
    a = np.asarray(o_old)
    b = np.asarray(o_step)
    if a.size == 0 or b.size == 0:
        raise ValueError("coefficient vectors must be non-empty")
    return np.convolve(a, b)


def b_update(b_old: Sequence[complex], c: Sequence[complex]) -> np.ndarray:
    """Fold new optimal sub-problem coefficients into the reconstruction
    coefficients: full convolution, length grows by len(c) - 1."""
    a = np.asarray(b_old, dtype=np.complex128)
    b = np.asarray(c, dtype=np.complex128)
    if a.size == 0 or b.size == 0:
        raise ValueError("coefficient vectors must be non-empty")
    return np.convolve(b, a)


def _weighted_moments(o: np.ndarray, mu: np.ndarray, count: int) -> np.ndarray:
    """w[m'] = sum_m o_m mu_{m + m'} for m' = 0..count-1."""
    L = o.size
    out = np.empty(count, dtype=np.float64)
    for shift in range(count):
        out[shift] = float(np.dot(o, mu[shift : shift + L]))
    return out


def sub_matrices_power(
    o: Sequence[float], moments: MomentSequence, q: int
) -> SubspaceProblem:
    """Sub-problem matrices in the power basis:
    S_ij = sum_m o_m mu_{i+j+m},  H_ij = sum_m o_m mu_{i+j+m+1}.

    Hankel by construction; with o = (1,) this is the plain order-q problem.
    """
    ovec = np.asarray(o, dtype=np.float64)
    if ovec.size == 0:
        raise ValueError("inner-product coefficients are empty")
    if q < 1:
        raise ValueError("candidate order must be >= 1")
    top = 2 * (q - 1) + (ovec.size - 1) + 1
    if moments.max_power < top:
        raise ValueError(f"need moments through index {top}, have {moments.max_power}")
    w = _weighted_moments(ovec, moments.values, 2 * q)
    idx = np.add.outer(np.arange(q), np.arange(q))
    return SubspaceProblem(hmat=w[idx + 1].copy(), smat=w[idx].copy(), dim=q)


def candidate_statistics(
    o: Sequence[float], moments: MomentSequence
) -> tuple[float, float]:
    """(energy, variance) of the state described by inner-product coefficients.

    Noisy variances may come out negative and are returned raw; only their
    ordering is consumed.  Raises :class:`DegenerateCandidateError` when the
    norm is not positive beyond its own cancellation error bar.
    """
    norm, energy, variance = _power_statistics(o, moments)
    return energy, variance


def _power_norm(ovec: np.ndarray, mu: np.ndarray) -> float:
    norm = float(np.dot(ovec, mu[: ovec.size]))
    gross = float(np.dot(np.abs(ovec), np.abs(mu[: ovec.size])))
    _check_norm(norm, gross)
    return norm


def _power_statistics(
    o: Sequence[float], moments: MomentSequence
) -> tuple[float, float, float]:
    ovec = np.asarray(o, dtype=np.float64)
    if ovec.size == 0:
        raise ValueError("inner-product coefficients are empty")
    top = ovec.size - 1 + 2
    if moments.max_power < top:
        raise ValueError(f"need moments through index {top}, have {moments.max_power}")
    norm = _power_norm(ovec, moments.values)
    w = _weighted_moments(ovec, moments.values, 3)
    energy = w[1] / norm
    variance = w[2] / norm - energy**2
    return norm, energy, variance


def sub_matrices_rte(
    b: Sequence[complex], tensors: RteTensors, q: int
) -> SubspaceProblem:
    """Sub-problem matrices over the RTE basis via bilinear forms of the
    reconstruction coefficients on shifted tensor blocks."""
    bvec = np.asarray(b, dtype=np.complex128)
    if bvec.size == 0:
        raise ValueError("reconstruction coefficients are empty")
    if q < 1:
        raise ValueError("candidate order must be >= 1")
    L = bvec.size
    if L - 1 + q - 1 > tensors.order - 1:
        raise ValueError(
            f"tensor coverage exceeded: need index {L + q - 2}, have {tensors.order - 1}"
        )
    smat = np.empty((q, q), dtype=np.complex128)
    hmat = np.empty((q, q), dtype=np.complex128)
    for i in range(q):
        for j in range(q):
            smat[i, j] = bvec.conj() @ tensors.s[i : i + L, j : j + L] @ bvec
            hmat[i, j] = bvec.conj() @ tensors.h1[i : i + L, j : j + L] @ bvec
    return SubspaceProblem(hmat=hmat, smat=smat, dim=q)


def rte_statistics(b: Sequence[complex], tensors: RteTensors) -> tuple[float, float]:
    """(energy, variance) of the state sum_m b_m |psi_m> from the tensors."""
    norm, energy, variance = _rte_statistics(b, tensors)
    return energy, variance


def _rte_statistics(
    b: Sequence[complex], tensors: RteTensors
) -> tuple[float, float, float]:
    bvec = np.asarray(b, dtype=np.complex128)
    L = bvec.size
    if L > tensors.order:
        raise ValueError(f"tensor coverage exceeded: need order {L}, have {tensors.order}")
    norm = float((bvec.conj() @ tensors.s[:L, :L] @ bvec).real)
    babs = np.abs(bvec)
    gross = float(babs @ np.abs(tensors.s[:L, :L]) @ babs)
    _check_norm(norm, gross)
    energy = float((bvec.conj() @ tensors.h1[:L, :L] @ bvec).real) / norm
    h2 = float((bvec.conj() @ tensors.h2[:L, :L] @ bvec).real) / norm
    return norm, energy, h2 - energy**2


@dataclass
class PartitionState:
    """Mutable engine state across iterations.

    ``var_history`` holds the accepted acceptance scores (variance
    magnitudes, or squared energies for terminating candidates under the
    economical criterion); it is non-increasing by construction.  Raw
    signed variances live in the iteration logs.
    """

    sequence: list[int]
    o: Optional[np.ndarray]
    b: np.ndarray
    r_max: int
    e_g: float
    var_history: list[float]
    order: int


@dataclass(frozen=True, eq=False)
class IterationLog:
    """One selection round: every candidate's acceptance metric and outcome."""

    step: int
    candidate_qs: tuple[int, ...]
    candidate_metrics: tuple[float, ...]
    chosen_q: int
    accepted: bool
    energy: float
    variance: float
    order_after: int
    coeff_count: int


@dataclass(frozen=True, eq=False)
class PqseResult:
    """Outcome of a partition run.

    ``final_variance`` is the raw (signed) variance estimate of the last
    accepted iterate; ``var_history`` is the non-increasing history of
    acceptance scores including the reference state's.
    """

    e_g: float
    sequence: tuple[int, ...]
    terminated_early: bool
    final_variance: float
    b: np.ndarray
    o: Optional[np.ndarray]
    order: int
    var_history: tuple[float, ...]
    iterations: tuple[IterationLog, ...]
    op_count: Optional[int] = None


def pqse_run(
    data: Union[MomentSequence, RteTensors],
    R: int,
    criterion: str = "variance",
    force_sequence: Optional[Sequence[int]] = None,
    debug: bool = False,
) -> PqseResult:
    """Run the partition loop on noisy data up to maximum order R.

    Each iteration scores the candidate sub-orders q = 2..r_max by the
    magnitude of their estimated energy variance (criterion "variance";
    "energy_squared" substitutes the squared energy for candidates whose
    basis reaches the terminating power, which spares the highest moment).
    Candidates whose score does not exceed the previously accepted score
    form the admissible pool, and the deepest of them is accepted; the
    loop ends when the pool is empty or the order budget is reached.

    Scoring by magnitude, not signed value: the variance is non-negative
    in exact arithmetic, so a large negative estimate is noise
    inconsistency, and under sampling noise ill-conditioned candidates
    produce arbitrarily negative estimates that a signed argmin would
    always select.  The pool rule makes the accepted score history
    non-increasing by construction, which is the acceptance test of the
    signed formulation folded into selection.  The unit candidate q = 1
    reproduces the previous iterate and cannot grow the order, so it is
    never selected; a round where only it would qualify terminates the
    loop as converged.

    ``force_sequence`` bypasses selection and acceptance (a diagnostic
    hook): the listed sub-orders are applied verbatim.  The returned
    energy always belongs to the last accepted iterate.
    """
    if criterion not in ("variance", "energy_squared"):
        raise ValueError(f"unknown criterion {criterion!r}")
    if R < 1:
        raise ValueError("R must be >= 1")
    power = isinstance(data, MomentSequence)
    if power:
        needed = 2 * R if criterion == "variance" else 2 * R - 1
        if data.max_power < needed:
            raise ValueError(f"need moments through index {needed}, have {data.max_power}")
    else:
        if data.order < R:
            raise ValueError(f"need tensors of order {R}, have {data.order}")
    if force_sequence is not None:
        forced = [int(q) for q in force_sequence]
        if partition_order(forced) > R:
            raise ValueError(f"forced sequence {forced} exceeds order {R}")
    else:
        forced = None

    ops = 0
    b = np.array([1.0 + 0.0j])
    o: Optional[np.ndarray] = np.array([1.0]) if power else None
    if power:
        assert isinstance(data, MomentSequence)
        _, e_ref, var_ref = _power_statistics(o, data)
    else:
        assert isinstance(data, RteTensors)
        _, e_ref, var_ref = _rte_statistics(b, data)
    state = PartitionState(
        sequence=[], o=o, b=b, r_max=R, e_g=e_ref, var_history=[abs(var_ref)], order=1
    )
    final_raw_variance = var_ref
    prev_metric = abs(var_ref)
    logs: list[IterationLog] = []
    step = 0

    def evaluate(q: int):
        """Build, solve and score one candidate; returns None when skipped."""
        nonlocal ops
        new_order = state.order + q - 1
        if power:
            assert state.o is not None and isinstance(data, MomentSequence)
            top = 2 * (q - 1) + (state.o.size - 1) + 1
            assert top <= 2 * R - 1, "moment index bound violated"
            problem = sub_matrices_power(state.o, data, q)
            ops += 2 * (2 * q) * state.o.size
        else:
            assert isinstance(data, RteTensors)
            assert state.b.size - 1 + q - 1 <= R - 1, "tensor index bound violated"
            problem = sub_matrices_rte(state.b, data, q)
            ops += 2 * q * q * state.b.size**2
        try:
            sol = solve_gevp(problem, 0.0)
        except SubspaceCollapseError:
            return None
        c = sol.ground_coeffs
        new_b = b_update(state.b, c)
        ops += state.b.size * c.size
        try:
            if power:
                new_o = convolve_coeffs(state.o, outer_coeffs(c))
                ops += c.size**2 + state.o.size * (2 * c.size - 1)
                if criterion == "energy_squared" and new_order == R:
                    # Terminating candidates avoid the top moment: score by E^2.
                    assert new_o.size - 1 + 1 <= 2 * R - 1, "moment index bound violated"
                    norm = _power_norm(new_o, data.values)
                    w = _weighted_moments(new_o, data.values, 2)
                    energy = w[1] / norm
                    variance = np.nan
                    metric = energy**2
                else:
                    assert new_o.size - 1 + 2 <= 2 * R, "moment index bound violated"
                    norm, energy, variance = _power_statistics(new_o, data)
                    metric = abs(variance)
            else:
                new_o = None
                norm, energy, variance = _rte_statistics(new_b, data)
                metric = (
                    energy**2
                    if criterion == "energy_squared" and new_order == R
                    else abs(variance)
                )
        except DegenerateCandidateError:
            return None
        if not np.isfinite(metric) or not np.isfinite(energy):
            return None
        return {
            "q": q,
            "metric": float(metric),
            "energy": float(energy),
            "gevp_energy": sol.ground_energy,
            "variance": float(variance) if np.isfinite(variance) else float("nan"),
            "norm": float(norm),
            "c": c,
            "new_o": new_o,
            "new_b": new_b,
            "new_order": new_order,
        }

    while state.order < R:
        step += 1
        if forced is not None:
            if len(state.sequence) >= len(forced):
                break
            q_list = [forced[len(state.sequence)]]
        else:
            q_list = list(range(2, state.r_max + 1))
        evaluated = []
        metrics: list[float] = []
        for q in q_list:
            cand = evaluate(q)
            evaluated.append(cand)
            metrics.append(cand["metric"] if cand is not None else float("inf"))
        if forced is not None:
            if evaluated[0] is None:
                raise PqseError(f"forced sub-order {q_list[0]} is unsolvable")
            best = evaluated[0]
        else:
            pool = [c for c in evaluated if c is not None and c["metric"] <= prev_metric]
            if not pool:
                if step == 1 and not any(c is not None for c in evaluated):
                    raise PqseError("no candidate solvable at the first iteration")
                # No admissible extension: the q = 1 candidate (the current
                # state itself) would be selected, which terminates the loop.
                logs.append(
                    IterationLog(
                        step=step,
                        candidate_qs=tuple(q_list),
                        candidate_metrics=tuple(metrics),
                        chosen_q=1,
                        accepted=False,
                        energy=state.e_g,
                        variance=final_raw_variance,
                        order_after=state.order,
                        coeff_count=state.b.size,
                    )
                )
                break
            best = max(pool, key=lambda cand: cand["q"])
        norm = best["norm"]
        state.sequence.append(best["q"])
        state.order = best["new_order"]
        state.r_max -= best["q"] - 1
        state.b = best["new_b"] / np.sqrt(norm)
        if power:
            state.o = best["new_o"] / norm
        state.e_g = best["gevp_energy"]
        state.var_history.append(best["metric"])
        final_raw_variance = best["variance"]
        prev_metric = best["metric"]
        logs.append(
            IterationLog(
                step=step,
                candidate_qs=tuple(q_list),
                candidate_metrics=tuple(metrics),
                chosen_q=best["q"],
                accepted=True,
                energy=state.e_g,
                variance=best["variance"],
                order_after=state.order,
                coeff_count=state.b.size,
            )
        )

    return PqseResult(
        e_g=state.e_g,
        sequence=tuple(state.sequence),
        terminated_early=state.order < R,
        final_variance=final_raw_variance,
        b=state.b,
        o=state.o,
        order=state.order,
        var_history=tuple(state.var_history),
        iterations=tuple(logs),
        op_count=ops if debug else None,
    )


def reconstruct_state(
    b: Sequence[complex],
    operator: PauliSum,
    phi0: StateVector,
    basis: str = "power",
    dt: Optional[float] = None,
) -> StateVector:
    """Materialize sum_m b_m A^m |phi0> in the full space (unnormalized).

    A = H for the power basis, A = e^{-iH dt} for the RTE basis.
    """
    bvec = np.asarray(b, dtype=np.complex128)
    if bvec.size == 0:
        raise ValueError("reconstruction coefficients are empty")
    if basis == "power":
        acc = bvec[0] * phi0.amplitudes
        vec = phi0
        for m in range(1, bvec.size):
            vec = apply_pauli_sum(operator, vec)
            acc = acc + bvec[m] * vec.amplitudes
        return StateVector(n=phi0.n, amplitudes=acc)
    if basis == "rte":
        if dt is None or dt <= 0:
            raise ValueError("RTE reconstruction needs a positive dt")
        acc = bvec[0] * phi0.amplitudes
        vec = phi0
        for m in range(1, bvec.size):
            vec = evolve_state(operator, vec, dt)
            acc = acc + bvec[m] * vec.amplitudes
        return StateVector(n=phi0.n, amplitudes=acc)
    raise ValueError(f"unknown basis {basis!r}")

"""Shared test utilities: independent dense-matrix oracles and random systems.

Everything here is deliberately written against numpy/scipy primitives
rather than the package internals, so tests compare two genuinely
different computational paths.
"""

from __future__ import annotations

import numpy as np

from krylov_qse import PauliSum, StateVector

_SINGLE = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def kron_matrix(operator: PauliSum) -> np.ndarray:
    """Dense matrix by explicit Kronecker products, qubit 0 leftmost."""
    dim = 2**operator.n
    total = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, string in operator.terms:
        acc = np.array([[1.0]], dtype=np.complex128)
        for letter in string.letters:
            acc = np.kron(acc, _SINGLE[letter])
        total += coeff * acc
    return total


def random_pauli_sum(rng: np.random.Generator, n: int, num_terms: int) -> PauliSum:
    """Random Hermitian operator: real coefficients on random strings."""
    terms = []
    for _ in range(num_terms):
        letters = "".join(rng.choice(list("IXYZ")) for _ in range(n))
        terms.append((float(rng.normal()), letters))
    return PauliSum.from_terms(n, terms)


def random_state(rng: np.random.Generator, n: int) -> StateVector:
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    amps /= np.linalg.norm(amps)
    return StateVector(n=n, amplitudes=amps)


def assert_close(actual, expected, tol: float, scale: float | None = None) -> None:
    """|actual - expected| <= tol * max(1, scale); scale defaults to |expected|."""
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    if scale is None:
        scale = float(np.max(np.abs(expected))) if expected.size else 1.0
    bound = tol * max(1.0, scale)
    diff = float(np.max(np.abs(actual - expected)))
    assert diff <= bound, f"max deviation {diff:.3e} exceeds {bound:.3e}"


def random_partition(rng: np.random.Generator, R: int) -> list[int]:
    """Random partition sequence with order 1 - P + sum r_k <= R."""
    sequence = []
    r_max = R
    while r_max >= 2:
        q = int(rng.integers(2, r_max + 1))
        sequence.append(q)
        r_max -= q - 1
        if rng.random() < 0.3:
            break
    return sequence or [min(2, R)]


def forced_partition_trace(op, phi0, R, sequence, basis="power", dt=None):
    """Drive a forced partition through the coefficient algebra and through
    explicit full-space states in parallel; return per-step comparisons.

    The algebra path works on scalar moment/tensor data exactly as the
    engine does; the oracle path carries the 2^n iterate and builds every
    sub-problem from explicit inner products.
    """
    import krylov_qse as kq
    from krylov_qse.pqse import (
        b_update,
        candidate_statistics,
        convolve_coeffs,
        outer_coeffs,
        rte_statistics,
        sub_matrices_power,
        sub_matrices_rte,
    )

    from krylov_qse import DegenerateCandidateError

    power = basis == "power"
    if power:
        mu = kq.compute_moments(op, phi0, 2 * R)
        o = np.array([1.0])
    else:
        tensors = kq.rte_tensors(op, phi0, R, dt)
    b = np.array([1.0 + 0.0j])
    psi = phi0
    steps = []
    for q in sequence:
        if power:
            prob = sub_matrices_power(o, mu, q)
            basis_vecs = [psi]
            for _ in range(q):
                basis_vecs.append(kq.apply_pauli_sum(op, basis_vecs[-1]))
            s_full = np.array(
                [[kq.state_overlap(basis_vecs[i], basis_vecs[j]) for j in range(q)] for i in range(q)]
            )
            h_full = np.array(
                [[kq.state_overlap(basis_vecs[i], basis_vecs[j + 1]) for j in range(q)] for i in range(q)]
            )
        else:
            prob = sub_matrices_rte(b, tensors, q)
            basis_vecs = [psi]
            for _ in range(q - 1):
                basis_vecs.append(kq.evolve_state(op, basis_vecs[-1], dt))
            h_vecs = [kq.apply_pauli_sum(op, w) for w in basis_vecs]
            s_full = np.array(
                [[kq.state_overlap(basis_vecs[i], basis_vecs[j]) for j in range(q)] for i in range(q)]
            )
            h_full = np.array(
                [[kq.state_overlap(basis_vecs[i], h_vecs[j]) for j in range(q)] for i in range(q)]
            )
        sol = kq.solve_gevp(prob, 0.0)
        c = sol.ground_coeffs
        new_b = b_update(b, c)
        try:
            if power:
                new_o = convolve_coeffs(o, outer_coeffs(c))
                energy_alg, var_alg = candidate_statistics(new_o, mu)
            else:
                energy_alg, var_alg = rte_statistics(new_b, tensors)
        except DegenerateCandidateError:
            # the engine skips such candidates; stop the trace here
            break
        # explicit full-space candidate
        amps = sum(ci * w.amplitudes for ci, w in zip(c, basis_vecs[: len(c)]))
        psi_new = kq.StateVector(n=phi0.n, amplitudes=amps)
        norm_sq = float(np.vdot(amps, amps).real)
        h_psi = kq.apply_pauli_sum(op, psi_new)
        energy_full = float(kq.state_overlap(psi_new, h_psi).real) / norm_sq
        var_full = float(kq.state_overlap(h_psi, h_psi).real) / norm_sq - energy_full**2
        steps.append(
            {
                "q": q,
                "alg_smat": prob.smat,
                "alg_hmat": prob.hmat,
                "full_smat": s_full,
                "full_hmat": h_full,
                "energy": (energy_alg, energy_full),
                "variance": (var_alg, var_full),
                "gevp_energy": sol.ground_energy,
            }
        )
        # renormalize both paths and continue
        psi = kq.StateVector(n=phi0.n, amplitudes=amps / np.sqrt(norm_sq))
        if power:
            w0 = float(np.dot(new_o, mu.values[: new_o.size]))
            o = new_o / w0
            b = new_b / np.sqrt(w0)
        else:
            from krylov_qse.pqse import _rte_statistics

            w0, _, _ = _rte_statistics(new_b, tensors)
            b = new_b / np.sqrt(w0)
    return steps

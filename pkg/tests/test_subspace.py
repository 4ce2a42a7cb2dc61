import numpy as np
import pytest

from krylov_qse import (
    DisorderSpec,
    MomentOverflowError,
    PauliSum,
    basis_state,
    build_spin_ring,
    compute_moments,
    default_timestep,
    exact_ground,
    hankel_matrices,
    rte_tensors,
    solve_gevp,
)
from krylov_qse.simulator import StateVector

from helpers import assert_close, random_pauli_sum, random_state


def plus_plus() -> StateVector:
    return StateVector(n=2, amplitudes=np.full(4, 0.5, dtype=np.complex128))


def zz() -> PauliSum:
    return PauliSum.from_terms(2, [(1.0, "ZZ")])


def test_moments_of_zz_in_plus_plus():
    mu = compute_moments(zz(), plus_plus(), 4)
    assert_close(mu.values, [1.0, 0.0, 1.0, 0.0, 1.0], 1e-14)


def test_moments_of_eigenstate_are_powers():
    z = PauliSum.from_terms(1, [(1.0, "Z")])
    mu = compute_moments(z, basis_state("0"), 3)
    assert_close(mu.values, [1.0, 1.0, 1.0, 1.0], 1e-14)


def test_moments_k_zero():
    mu = compute_moments(zz(), plus_plus(), 0)
    assert mu.values.tolist() == [1.0]


def test_moments_reject_unnormalised_reference():
    bad = StateVector(n=2, amplitudes=np.array([1.0, 1.0, 0, 0], dtype=np.complex128))
    with pytest.raises(ValueError, match="norm"):
        compute_moments(zz(), bad, 2)


def test_moment_overflow_guard():
    big = PauliSum.from_terms(1, [(1e60, "Z")])
    with pytest.raises(MomentOverflowError, match="rescale"):
        compute_moments(big, basis_state("0"), 5)


def test_hankel_matrices_from_zz_moments():
    mu = compute_moments(zz(), plus_plus(), 3)
    problem = hankel_matrices(mu, 2)
    assert_close(problem.smat, np.eye(2), 1e-14)
    assert_close(problem.hmat, np.array([[0.0, 1.0], [1.0, 0.0]]), 1e-14)


def test_hankel_order_one():
    mu = compute_moments(zz(), plus_plus(), 1)
    problem = hankel_matrices(mu, 1)
    assert problem.smat.tolist() == [[1.0]]
    assert problem.hmat.tolist() == [[0.0]]


def test_hankel_insufficient_moments():
    mu = compute_moments(zz(), plus_plus(), 2)
    with pytest.raises(ValueError, match="moments"):
        hankel_matrices(mu, 2)


def test_hankel_antidiagonal_and_positivity():
    rng = np.random.default_rng(21)
    for _ in range(10):
        op = random_pauli_sum(rng, 4, 6)
        # bounded-norm operator keeps moments O(1) for the PSD check
        norm = exact_ground(op).spectral_norm
        op = PauliSum.from_terms(4, [(c / norm, s.letters) for c, s in op.terms])
        v = random_state(rng, 4)
        mu = compute_moments(op, v, 9)
        problem = hankel_matrices(mu, 5)
        for i in range(5):
            for j in range(5):
                assert problem.smat[i, j] == mu.values[i + j]
                assert problem.hmat[i, j] == mu.values[i + j + 1]
        assert np.linalg.eigvalsh(problem.smat).min() >= -1e-10


def test_noiseless_krylov_nesting():
    ring = build_spin_ring(4, DisorderSpec(J=0.5, h=1.0, seed=5))
    fields = [c for c, s in ring.terms if s.letters.count("Z") == 1]
    phi0 = basis_state("".join("1" if f > 0 else "0" for f in fields))
    mu = compute_moments(ring, phi0, 15)
    previous = None
    for R in range(1, 8):
        problem = hankel_matrices(mu, R)
        if np.linalg.cond(problem.smat) > 1e12:
            break
        energy = solve_gevp(problem, 0.0).ground_energy
        if previous is not None:
            assert energy <= previous + 1e-9
        previous = energy


def test_default_timestep_of_zz():
    assert abs(default_timestep(zz()) - np.pi) < 1e-12


def test_rte_tensors_structure():
    rng = np.random.default_rng(22)
    op = random_pauli_sum(rng, 3, 5)
    phi0 = random_state(rng, 3)
    dt = default_timestep(op)
    t = rte_tensors(op, phi0, 5, dt)
    assert t.s[0, 0] == 1.0
    assert np.all(np.diag(t.s) == 1.0)
    for mat in (t.s, t.h1, t.h2):
        assert_close(mat, mat.conj().T, 1e-12, scale=float(np.max(np.abs(mat))))
    # Toeplitz in the exact noiseless case: entries depend on j - i only
    for mat in (t.s, t.h1, t.h2):
        for i in range(4):
            for j in range(4):
                assert abs(mat[i, j] - mat[i + 1, j + 1]) < 1e-10
    # reference-column variance is non-negative
    assert t.h2[0, 0].real - t.h1[0, 0].real ** 2 >= -1e-10


def test_rte_tensors_match_explicit_evolution():
    from krylov_qse import apply_pauli_sum, evolve_state, state_overlap

    rng = np.random.default_rng(23)
    op = random_pauli_sum(rng, 3, 5)
    phi0 = random_state(rng, 3)
    dt = 0.7
    t = rte_tensors(op, phi0, 4, dt)
    states = [phi0]
    for j in range(1, 4):
        states.append(evolve_state(op, phi0, j * dt))
    for i in range(4):
        for j in range(4):
            s_ij = state_overlap(states[i], states[j])
            h_ij = state_overlap(states[i], apply_pauli_sum(op, states[j]))
            h2_ij = state_overlap(
                apply_pauli_sum(op, states[i]), apply_pauli_sum(op, states[j])
            )
            assert abs(t.s[i, j] - s_ij) < 1e-11
            assert abs(t.h1[i, j] - h_ij) < 1e-11
            assert abs(t.h2[i, j] - h2_ij) < 1e-11

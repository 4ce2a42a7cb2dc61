import numpy as np
import pytest

from krylov_qse import (
    PauliSum,
    apply_pauli_sum,
    basis_state,
    evolve_state,
    exact_ground,
    expectation,
    state_overlap,
)
from krylov_qse.simulator import StateVector, dense_matrix

from helpers import assert_close, kron_matrix, random_pauli_sum, random_state


def plus_plus() -> StateVector:
    return StateVector(n=2, amplitudes=np.full(4, 0.5, dtype=np.complex128))


def test_basis_state_indexing_convention():
    assert basis_state("00").amplitudes[0] == 1.0
    assert basis_state("10").amplitudes[2] == 1.0  # qubit 0 is the high bit
    assert basis_state("01").amplitudes[1] == 1.0


def test_basis_state_rejects_empty_and_junk():
    with pytest.raises(ValueError):
        basis_state("")
    with pytest.raises(ValueError):
        basis_state("012")


def test_apply_zz_on_plus_plus_gives_minus_minus():
    zz = PauliSum.from_terms(2, [(1.0, "ZZ")])
    out = apply_pauli_sum(zz, plus_plus())
    minus_minus = np.array([0.5, -0.5, -0.5, 0.5], dtype=np.complex128)
    assert_close(out.amplitudes, minus_minus, 1e-15)


def test_apply_zz_fixes_computational_states():
    zz = PauliSum.from_terms(2, [(1.0, "ZZ")])
    v = basis_state("00")
    assert_close(apply_pauli_sum(zz, v).amplitudes, v.amplitudes, 1e-15)


def test_apply_empty_operator_gives_zero():
    empty = PauliSum.from_terms(2, [])
    out = apply_pauli_sum(empty, plus_plus())
    assert np.all(out.amplitudes == 0)


def test_apply_dimension_mismatch():
    zz = PauliSum.from_terms(2, [(1.0, "ZZ")])
    with pytest.raises(ValueError):
        apply_pauli_sum(zz, basis_state("000"))


def test_apply_matches_dense_matvec_on_random_systems():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        op = random_pauli_sum(rng, n, int(rng.integers(1, 9)))
        v = random_state(rng, n)
        expected = kron_matrix(op) @ v.amplitudes
        assert_close(apply_pauli_sum(op, v).amplitudes, expected, 1e-12)


def test_dense_matrix_matches_kron_oracle():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        op = random_pauli_sum(rng, n, 5)
        assert_close(dense_matrix(op), kron_matrix(op), 1e-13)


def test_exact_ground_zz():
    zz = PauliSum.from_terms(2, [(1.0, "ZZ")])
    spectrum = exact_ground(zz)
    assert spectrum.ground_energy == -1.0
    assert spectrum.spectral_norm == 1.0


def test_exact_ground_single_z():
    z = PauliSum.from_terms(1, [(1.0, "Z")])
    spectrum = exact_ground(z)
    assert_close(spectrum.eigenvalues, [-1.0, 1.0], 1e-15)


def test_exact_ground_rejects_large_n():
    op = PauliSum.from_terms(15, [(1.0, "Z" * 15)])
    with pytest.raises(ValueError, match="ceiling"):
        exact_ground(op)


def test_spectral_norm_equals_dense_two_norm():
    rng = np.random.default_rng(9)
    for _ in range(5):
        op = random_pauli_sum(rng, 4, 6)
        expected = np.linalg.norm(kron_matrix(op), 2)
        assert abs(exact_ground(op).spectral_norm - expected) < 1e-10 * max(1, expected)


def test_variational_bound_on_random_states():
    rng = np.random.default_rng(10)
    op = random_pauli_sum(rng, 4, 8)
    ground = exact_ground(op).ground_energy
    for _ in range(100):
        v = random_state(rng, 4)
        assert expectation(op, v) >= ground - 1e-10


def test_evolve_identity_at_zero_time():
    rng = np.random.default_rng(11)
    op = random_pauli_sum(rng, 3, 5)
    v = random_state(rng, 3)
    assert_close(evolve_state(op, v, 0.0).amplitudes, v.amplitudes, 1e-14)


def test_evolve_eigenstate_picks_up_phase():
    z = PauliSum.from_terms(1, [(1.0, "Z")])
    out = evolve_state(z, basis_state("0"), 1.3)
    assert_close(out.amplitudes[0], np.exp(-1.3j), 1e-14)
    assert out.amplitudes[1] == 0


def test_evolve_is_unitary_and_composes():
    rng = np.random.default_rng(12)
    for _ in range(5):
        op = random_pauli_sum(rng, 3, 6)
        v = random_state(rng, 3)
        t1, t2 = float(rng.uniform(0, 2)), float(rng.uniform(0, 2))
        once = evolve_state(op, v, t1 + t2)
        twice = evolve_state(op, evolve_state(op, v, t1), t2)
        assert abs(once.norm - 1.0) < 1e-12
        assert_close(twice.amplitudes, once.amplitudes, 1e-10)


def test_overlap_and_expectation_basics():
    v = plus_plus()
    assert abs(state_overlap(v, v) - 1.0) < 1e-14
    zz = PauliSum.from_terms(2, [(1.0, "ZZ")])
    assert abs(expectation(zz, v)) < 1e-14  # <++|--> = 0
    # (|++> - |-->)/sqrt(2) is an eigenstate with eigenvalue -1
    minus = np.array([0.5, -0.5, -0.5, 0.5])
    eig = StateVector(n=2, amplitudes=(v.amplitudes - minus) / np.sqrt(2))
    assert abs(expectation(zz, eig) + 1.0) < 1e-12


def test_expectation_rejects_zero_vector():
    zz = PauliSum.from_terms(2, [(1.0, "ZZ")])
    with pytest.raises(ValueError):
        expectation(zz, StateVector(n=2, amplitudes=np.zeros(4, dtype=np.complex128)))

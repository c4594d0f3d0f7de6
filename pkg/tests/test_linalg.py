import numpy as np
import pytest

from imprecise_witness import linalg
from imprecise_witness.linalg import Measurement

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_kron_examples():
    assert np.allclose(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(linalg.kron(X, X) @ phi, phi)
    assert np.allclose(linalg.kron(Z, Z), np.diag([1, -1, -1, 1]))


def test_kron_mixed_product(rng):
    for _ in range(20):
        a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
        lhs = linalg.kron(a, b) @ linalg.kron(c, d)
        assert np.abs(lhs - linalg.kron(a @ c, b @ d)).max() < 1e-10


def test_eigh_examples(rng):
    w, v = linalg.eigh(Z)
    assert np.allclose(w, [-1, 1])
    assert np.allclose(np.abs(v[:, 0]), [0, 1]) and np.allclose(np.abs(v[:, 1]), [1, 0])
    assert abs(linalg.max_eig(linalg.kron(X, X) + linalg.kron(Z, Z)) - 2) < 1e-12
    for _ in range(100):
        h = linalg.random_hermitian(int(rng.integers(2, 7)), rng)
        w, v = linalg.eigh(h)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) <= 1e-10
        assert np.abs(v.conj().T @ v - np.eye(len(w))).max() <= 1e-10
        assert abs(w.sum() - np.trace(h).real) <= 1e-10


def test_eigh_symmetrises():
    h = X + 1e-14j * np.eye(2)
    assert linalg.is_hermitian(linalg.hermitian(h), tol=1e-15)


def test_trace_product():
    assert linalg.trace_product(X, X) == pytest.approx(2)
    assert linalg.trace_product(X, Z) == pytest.approx(0)
    with pytest.raises(ValueError):
        linalg.trace_product(X, np.eye(3))
    with pytest.raises(ValueError):
        linalg.trace_product(X, np.array([[0, 1j], [0, 0]]))


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        linalg.as_matrix(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ValueError):
        linalg.as_matrix(np.zeros(3))


def test_haar_unitary(rng):
    u = linalg.haar_random_unitary(1, rng)
    assert abs(abs(u[0, 0]) - 1) < 1e-12
    for _ in range(100):
        u = linalg.haar_random_unitary(4, rng)
        assert np.abs(u.conj().T @ u - np.eye(4)).max() < 1e-10
    vals = [abs(linalg.haar_random_unitary(3, rng)[0, 0]) ** 2 for _ in range(10000)]
    assert abs(np.mean(vals) - 1 / 3) < 0.02


def test_haar_reproducible():
    a = linalg.haar_random_unitary(3, np.random.default_rng(5))
    b = linalg.haar_random_unitary(3, np.random.default_rng(5))
    assert np.array_equal(a, b)


def test_random_states_and_measurements(rng):
    for _ in range(100):
        psi = linalg.random_pure_state(3, rng)
        assert abs(np.linalg.norm(psi) - 1) < 1e-12
        m = linalg.random_povm(3, 3, rng)
        assert m.is_povm(1e-10)
        assert all(np.linalg.eigvalsh(e).min() > -1e-10 for e in m.effects)
        p = linalg.random_projective_measurement(4, 2, rng)
        assert p.is_projective(1e-10)
    m = linalg.random_projective_measurement(2, 2, rng, rank_one=True)
    assert m.is_projective()
    assert np.allclose([np.trace(e).real for e in m.effects], [1, 1])
    with pytest.raises(ValueError):
        linalg.random_projective_measurement(2, 3, rng, rank_one=True)


def test_two_outcome_rank_distribution(rng):
    ranks = {int(round(np.trace(linalg.random_projective_measurement(3, 2, rng).effects[0]).real))
             for _ in range(200)}
    assert ranks == {0, 1, 2, 3}


def test_measurement_validation():
    with pytest.raises(ValueError):
        Measurement(np.zeros((2, 2, 3)))
    m = Measurement(np.stack([np.eye(2), np.zeros((2, 2))]))
    assert m.is_projective() and m.outcomes == 2 and m.dim == 2
    assert not Measurement(np.stack([np.eye(2), np.eye(2)])).is_povm()
    with pytest.raises(ValueError):
        m.effects[0, 0, 0] = 3


def test_measurement_from_observable():
    m = linalg.measurement_from_observable(X)
    assert m.is_projective()
    assert np.allclose(m.observable(), X)
    with pytest.raises(ValueError):
        linalg.measurement_from_observable(2 * X)


def test_repair_povm(rng):
    m = linalg.random_povm(3, 3, rng).effects
    bad = m + 1e-6 * linalg.random_hermitian(3, rng)
    fixed = Measurement(linalg.repair_povm(bad))
    assert fixed.is_povm(1e-10)


def test_density_matrix_checks():
    assert np.allclose(linalg.check_density_matrix(np.eye(2) / 2), np.eye(2) / 2)
    with pytest.raises(ValueError):
        linalg.check_density_matrix(np.eye(2))
    with pytest.raises(ValueError):
        linalg.check_density_matrix(np.diag([1.5, -0.5]))


def test_partial_contract(rng):
    a = linalg.random_hermitian(2, rng)
    b = linalg.random_hermitian(3, rng)
    v = linalg.random_pure_state(2, rng)
    w = linalg.random_pure_state(3, rng)
    op = linalg.kron(a, b)
    assert np.allclose(linalg.partial_contract(op, v, 0, (2, 3)), np.vdot(v, a @ v) * b)
    assert np.allclose(linalg.partial_contract(op, w, 1, (2, 3)), np.vdot(w, b @ w) * a)

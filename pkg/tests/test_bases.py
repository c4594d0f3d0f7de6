import numpy as np
import pytest

from imprecise_witness import bases, linalg

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def test_gell_mann_qubit_is_pauli():
    b = bases.gell_mann_basis(2)
    assert b.hermitian and len(b) == 3
    for el, p in zip(b.elements, (X, Y, Z)):
        assert np.allclose(el, p)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_gell_mann_normalisation(d):
    b = bases.gell_mann_basis(d)
    assert len(b) == d * d - 1
    assert np.abs(b.gram() - d * np.eye(len(b))).max() < 1e-10
    for el in b.elements:
        assert abs(np.trace(el)) < 1e-12
        assert np.allclose(el, el.conj().T)
    if d == 3:
        assert all(abs(linalg.trace_product(el, el) - 3) < 1e-12 for el in b.elements)


def test_gell_mann_rejects_small_d():
    with pytest.raises(ValueError):
        bases.gell_mann_basis(1)


def test_weyl_qubit():
    b = bases.weyl_heisenberg_basis(2)
    assert not b.hermitian
    assert np.allclose(b.elements[0], Z)
    assert np.allclose(b.elements[1], X)
    assert np.allclose(b.elements[2], X @ Z)
    assert np.allclose(X @ Z, -1j * Y)


@pytest.mark.parametrize("d", [3, 5])
def test_weyl_orthogonality(d):
    b = bases.weyl_heisenberg_basis(d)
    assert np.abs(b.gram() - d * np.eye(d * d - 1)).max() < 1e-12
    assert max(abs(np.trace(el)) for el in b.elements) < 1e-12


def test_weyl_index():
    x, z = bases.shift_clock(4)
    b = bases.weyl_heisenberg_basis(4)
    assert np.allclose(b.elements[bases.weyl_index(4, 2, 3)], np.linalg.matrix_power(x, 2) @ np.linalg.matrix_power(z, 3))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_weyl_completeness(d):
    b = bases.weyl_heisenberg_basis(d)
    lhs = sum(linalg.kron(el, el.conj()) for el in b.elements)
    phi = bases.maximally_entangled(d)
    assert np.abs(lhs - (d * d * np.outer(phi, phi.conj()) - np.eye(d * d))).max() < 1e-10


@pytest.mark.parametrize("d", [2, 5, 7])
def test_fourier_basis(d):
    f = bases.fourier_basis(d)
    assert np.abs(f.conj() @ f.T - np.eye(d)).max() < 1e-12
    assert np.allclose(np.abs(f) ** 2, 1 / d)
    assert np.allclose(f[1], bases.fourier_matrix(d) @ np.eye(d)[1])


def test_bloch_examples():
    for d in (2, 3):
        b = bases.gell_mann_basis(d)
        assert np.allclose(bases.bloch_decompose(np.eye(d) / d, b), 0)
    mu = bases.bloch_decompose(np.diag([1.0, 0.0]), bases.gell_mann_basis(2))
    assert np.allclose(mu, [0, 0, 1])
    with pytest.raises(ValueError):
        bases.bloch_decompose(np.eye(3) / 3, bases.gell_mann_basis(2))
    with pytest.raises(ValueError):
        bases.bloch_compose(np.zeros(2), bases.gell_mann_basis(2))


def test_bloch_round_trip_and_purity(rng):
    for basis in (bases.gell_mann_basis(3), bases.weyl_heisenberg_basis(3)):
        for _ in range(50):
            psi = linalg.random_pure_state(3, rng)
            rho = np.outer(psi, psi.conj())
            mu = bases.bloch_decompose(rho, basis)
            assert np.linalg.norm(bases.bloch_compose(mu, basis) - rho) <= 1e-10
            assert abs(np.sum(np.abs(mu) ** 2) - 2) < 1e-9
            mixed = 0.6 * rho + 0.4 * np.eye(3) / 3
            assert np.sum(np.abs(bases.bloch_decompose(mixed, basis)) ** 2) <= 2 + 1e-9


def test_compose_may_be_non_psd():
    rho = bases.bloch_compose(np.array([0, 0, 2.0]), bases.gell_mann_basis(2))
    assert np.linalg.eigvalsh(rho).min() < 0


def test_basis_arrays_are_read_only():
    with pytest.raises(ValueError):
        bases.gell_mann_basis(2).elements[0, 0, 0] = 5

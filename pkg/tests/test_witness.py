import math

import numpy as np
import pytest

from imprecise_witness import bases, linalg, witness
from imprecise_witness.linalg import basis_measurement, measurement_from_observable

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
PHI2 = bases.maximally_entangled(2)


def _product(rng, d):
    return linalg.kron(linalg.random_pure_state(d, rng), linalg.random_pure_state(d, rng))


def test_born_examples():
    comp = basis_measurement(np.eye(2))
    p = witness.born(PHI2, [comp], [comp]).p
    assert np.allclose(p[0, 0], np.eye(2) / 2)
    rng = np.random.default_rng(0)
    ms = [linalg.random_projective_measurement(2, 2, rng, rank_one=True) for _ in range(2)]
    assert np.allclose(witness.born(np.eye(4) / 4, ms, ms).p, 0.25)
    obs = [measurement_from_observable(X), measurement_from_observable(Z)]
    p = witness.born(PHI2, obs, obs).p
    for x in range(2):
        assert p[x, x, 0, 0] + p[x, x, 1, 1] - p[x, x, 0, 1] - p[x, x, 1, 0] == pytest.approx(1)


def test_born_rejects_mismatch():
    comp = basis_measurement(np.eye(2))
    with pytest.raises(ValueError):
        witness.born(np.eye(9) / 9, [comp], [comp])
    with pytest.raises(ValueError):
        witness.Correlation(np.full((1, 1, 2, 2), 0.3))


def test_pauli2_on_bell_state():
    spec = witness.pauli2()
    assert spec.ideal_sep == 1.0 and spec.ideal_ent == 2.0
    assert witness.witness_value(spec, PHI2, spec.targets_A, spec.targets_B) == pytest.approx(2)


def test_chsh_maximum():
    spec = witness.chsh()
    op = witness.bell_operator(spec, spec.targets_A, spec.targets_B)
    w, v = linalg.eigh(op)
    assert w[-1] == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    val = witness.witness_value(spec, v[:, -1], spec.targets_A, spec.targets_B)
    assert abs(val - 2 * math.sqrt(2)) < 1e-9


def test_bell_operator_matches_born(rng):
    specs = list(witness.builtin_specs(3, 4).values())
    for spec in specs:
        for _ in range(10):
            ma = [linalg.random_povm(spec.d, spec.o, rng) for _ in range(spec.nx)]
            mb = [linalg.random_povm(spec.d, spec.o, rng) for _ in range(spec.ny)]
            psi = linalg.random_pure_state(spec.d ** 2, rng)
            rho = np.outer(psi, psi.conj())
            op = witness.bell_operator(spec, ma, mb)
            assert np.abs(op - op.conj().T).max() < 1e-12
            assert abs(np.trace(op @ rho).real - witness.witness_value(spec, rho, ma, mb)) < 1e-10


@pytest.mark.parametrize("d", [2, 3, 4])
def test_conjugate_bases(d):
    spec = witness.conjugate_bases(d)
    assert spec.ideal_sep == pytest.approx(1 + 1 / d)
    assert spec.o == d
    val = witness.witness_value(spec, bases.maximally_entangled(d), spec.targets_A, spec.targets_B)
    assert val == pytest.approx(2)
    # the ideal separable bound is attained by a computational product state
    e0 = np.eye(d)[0]
    assert witness.witness_value(spec, linalg.kron(e0, e0), spec.targets_A, spec.targets_B) == pytest.approx(1 + 1 / d)


def test_builtin_separable_bounds(rng):
    for spec in witness.builtin_specs(3, 8).values():
        for _ in range(100):
            val = witness.witness_value(spec, _product(rng, spec.d), spec.targets_A, spec.targets_B)
            assert val <= spec.ideal_sep + 1e-9


def test_bloch_family_reads_gell_mann():
    d, n = 3, 8
    spec = witness.bloch_family(d, n)
    els = bases.gell_mann_basis(d).elements
    vals = spec.metadata["eigenvalues"]
    for i in range(n):
        obs = np.einsum("a,aij->ij", vals[i], spec.targets_A[i].effects)
        assert np.allclose(obs, els[i])
    phi = bases.maximally_entangled(d)
    assert witness.witness_value(spec, phi, spec.targets_A, spec.targets_B) == pytest.approx(n)
    with pytest.raises(ValueError):
        witness.bloch_family(2, 4)


def test_spec_validation():
    spec = witness.pauli2()
    with pytest.raises(ValueError):
        witness.WitnessSpec("bad", 2, np.zeros((2, 2, 2)), spec.targets_A, spec.targets_B, spec.budget)
    with pytest.raises(ValueError):
        witness.WitnessSpec("bad", 2, np.full((2, 2, 2, 2), np.inf), spec.targets_A, spec.targets_B, spec.budget)
    povm = linalg.random_povm(2, 2, np.random.default_rng(1))
    with pytest.raises(ValueError):
        witness.WitnessSpec("bad", 2, spec.coeffs, (povm, povm), spec.targets_B, spec.budget)
    with pytest.raises(KeyError):
        witness.get_spec("nope")


def test_with_eps_and_json_roundtrip():
    spec = witness.chsh().with_eps(0.02, (0.01, 0.03))
    assert spec.budget.eps_A == (0.02, 0.02) and spec.budget.eps_B == (0.01, 0.03)
    text = spec.dumps()
    back = witness.WitnessSpec.loads(text)
    assert back.dumps() == text
    assert np.array_equal(back.coeffs, spec.coeffs)
    assert np.allclose(back.targets_B[1].effects, spec.targets_B[1].effects)


def test_evaluate_shape_check():
    with pytest.raises(ValueError):
        witness.evaluate(witness.pauli2(), np.zeros((1, 2, 2, 2)))

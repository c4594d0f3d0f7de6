"""Dense complex linear algebra helpers and seeded random sampling.

Operators are plain ``numpy`` arrays. The helpers here validate and
normalise them (Hermitian symmetrisation, unit-norm states, POVM checks)
so the rest of the package can stay array-based.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
STATE_TOL = 1e-12
DENSITY_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Raised when an eigendecomposition fails to converge."""


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def hermitian(a) -> np.ndarray:
    """Return ``(a + a^dagger) / 2`` after checking ``a`` is square."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"hermitian operator must be square, got {m.shape}")
    return 0.5 * (m + m.conj().T)


def is_hermitian(a, tol=1e-10) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T, atol=tol, rtol=0)


def kron(*ops) -> np.ndarray:
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def eigh(h):
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    Raises
    ------
    ConvergenceError
        If LAPACK fails to converge.
    """
    h = hermitian(h)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigh failed on {h.shape[0]}x{h.shape[0]} input: {exc}") from exc
    return w, v


def max_eig(h) -> float:
    return float(np.linalg.eigvalsh(hermitian(h))[-1])


def trace_product(a, b, tol=1e-12) -> float:
    """Real part of ``Tr(a b)`` for Hermitian ``a`` and ``b``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    t = np.sum(a * b.T)
    scale = max(1.0, abs(t))
    if abs(t.imag) > tol * scale * max(1, a.shape[0]):
        raise ValueError(f"Tr(ab) has imaginary part {t.imag:.3e}; inputs not Hermitian?")
    return float(t.real)


def pure_state(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v)
    if not np.isfinite(nrm) or nrm == 0:
        raise ValueError("state vector has zero or non-finite norm")
    return v / nrm


def projector(psi) -> np.ndarray:
    v = pure_state(psi)
    return np.outer(v, v.conj())


def check_density_matrix(rho, tol=DENSITY_TOL) -> np.ndarray:
    rho = hermitian(rho)
    if abs(np.trace(rho).real - 1) > tol:
        raise ValueError(f"trace {np.trace(rho).real:.12f} differs from 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
    return rho


def psd_part(h) -> np.ndarray:
    """Projection of a Hermitian matrix onto the PSD cone."""
    w, v = eigh(h)
    return (v * np.clip(w, 0, None)) @ v.conj().T


def inv_sqrt_psd(h) -> np.ndarray:
    w, v = eigh(h)
    if w[0] <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return (v / np.sqrt(w)) @ v.conj().T


@dataclass(frozen=True, eq=False)
class Measurement:
    """An ordered list of POVM effects acting on one subsystem.

    ``effects`` has shape ``(outcomes, dim, dim)``.
    """

    effects: np.ndarray

    def __post_init__(self):
        e = np.array(self.effects, dtype=complex)
        if e.ndim != 3 or e.shape[1] != e.shape[2]:
            raise ValueError(f"effects must have shape (o, d, d), got {e.shape}")
        if not np.all(np.isfinite(e)):
            raise ValueError("effects contain non-finite entries")
        e = 0.5 * (e + e.conj().transpose(0, 2, 1))
        e.setflags(write=False)
        object.__setattr__(self, "effects", e)

    @property
    def outcomes(self) -> int:
        return self.effects.shape[0]

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    def __len__(self):
        return self.outcomes

    def __getitem__(self, a):
        return self.effects[a]

    def completeness_error(self) -> float:
        return float(np.abs(self.effects.sum(axis=0) - np.eye(self.dim)).max())

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.effects).min())

    def is_povm(self, tol=1e-10) -> bool:
        return self.completeness_error() <= tol and self.min_eigenvalue() >= -tol

    def is_projective(self, tol=1e-10) -> bool:
        if not self.is_povm(tol):
            return False
        e = self.effects
        prod = np.einsum("aij,bjk->abik", e, e)
        target = np.zeros_like(prod)
        idx = np.arange(self.outcomes)
        target[idx, idx] = e
        return float(np.abs(prod - target).max()) <= tol

    def observable(self, values=None) -> np.ndarray:
        """Return ``sum_a v_a E_a``; by default ``E_1 - E_2`` style +/-1 values."""
        if values is None:
            if self.outcomes != 2:
                raise ValueError("default observable needs a two-outcome measurement")
            values = (1.0, -1.0)
        values = np.asarray(values, dtype=float)
        return np.einsum("a,aij->ij", values, self.effects)

    def conj(self) -> "Measurement":
        return Measurement(self.effects.conj())


def measurement_from_observable(obs) -> Measurement:
    """Two-outcome measurement ``{(I+A)/2, (I-A)/2}`` for ``||A|| <= 1``."""
    a = hermitian(obs)
    if np.abs(np.linalg.eigvalsh(a)).max() > 1 + 1e-10:
        raise ValueError("observable has operator norm larger than one")
    eye = np.eye(a.shape[0])
    return Measurement(np.stack([(eye + a) / 2, (eye - a) / 2]))


def basis_measurement(vectors) -> Measurement:
    """Rank-one projective measurement onto the rows of ``vectors``."""
    vecs = np.asarray(vectors, dtype=complex)
    return Measurement(np.einsum("ai,aj->aij", vecs, vecs.conj()))


def repair_povm(effects, floor=0.0) -> np.ndarray:
    """Clip negative eigenvalues and renormalise so the effects sum to identity.

    Used on solver output, whose effects may be off by round-off.
    """
    e = np.asarray(effects, dtype=complex)
    e = 0.5 * (e + e.conj().transpose(0, 2, 1))
    w, v = np.linalg.eigh(e)
    w = np.clip(w, floor, None)
    e = np.einsum("aij,aj,akj->aik", v, w, v.conj())
    s = e.sum(axis=0)
    t = inv_sqrt_psd(s)
    e = np.einsum("ij,ajk,kl->ail", t, e, t)
    return 0.5 * (e + e.conj().transpose(0, 2, 1))


# --------------------------------------------------------------------------
# random sampling; every sampler takes an explicit numpy Generator

def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + g.conj().T)


def random_projective_measurement(dim: int, outcomes: int, rng: np.random.Generator,
                                  rank_one: bool = False) -> Measurement:
    """Random projective measurement in a Haar-random basis.

    With ``rank_one`` every outcome but the last receives one basis vector
    (needs ``outcomes <= dim``). Otherwise basis vectors are distributed at
    random over outcomes; for two outcomes the rank ``r`` of the first
    projector is uniform on ``{0, ..., dim}``.
    """
    u = haar_random_unitary(dim, rng)
    if rank_one:
        if outcomes > dim:
            raise ValueError("rank-one projective measurement needs outcomes <= dim")
        labels = np.minimum(np.arange(dim), outcomes - 1)
    elif outcomes == 2:
        r = rng.integers(0, dim + 1)
        labels = (np.arange(dim) >= r).astype(int)
    else:
        labels = rng.integers(0, outcomes, size=dim)
    effects = np.zeros((outcomes, dim, dim), dtype=complex)
    for k in range(dim):
        col = u[:, k]
        effects[labels[k]] += np.outer(col, col.conj())
    return Measurement(effects)


def random_povm(dim: int, outcomes: int, rng: np.random.Generator) -> Measurement:
    """Random full-rank POVM from normalised Wishart blocks."""
    g = rng.standard_normal((outcomes, dim, dim)) + 1j * rng.standard_normal((outcomes, dim, dim))
    p = g @ g.conj().transpose(0, 2, 1)
    t = inv_sqrt_psd(p.sum(axis=0))
    return Measurement(t @ p @ t)


def random_measurements(dim: int, outcomes: int, count: int, rng, kind="povm") -> list:
    if kind == "povm":
        return [random_povm(dim, outcomes, rng) for _ in range(count)]
    if kind == "projective":
        return [random_projective_measurement(dim, outcomes, rng) for _ in range(count)]
    raise ValueError(f"unknown measurement kind {kind!r}")


def partial_contract(op, vec, side: int, dims: Sequence[int]) -> np.ndarray:
    """Contract one tensor factor of a bipartite operator with a pure state.

    ``side=0`` returns ``(<v| x I) op (|v> x I)`` acting on the second factor,
    ``side=1`` the converse.
    """
    da, db = dims
    t = np.asarray(op).reshape(da, db, da, db)
    v = np.asarray(vec)
    if side == 0:
        return np.einsum("i,ijkl,k->jl", v.conj(), t, v)
    return np.einsum("j,ijkl,l->ik", v.conj(), t, v)

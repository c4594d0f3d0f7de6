"""Operator bases for qudits: Gell-Mann, Weyl-Heisenberg, Fourier.

All Bloch bases are normalised as ``Tr(l_i l_j^dagger) = d delta_ij`` so a
density matrix reads ``rho = (I + sum_i mu_i l_i) / d`` with
``mu_i = Tr(rho l_i^dagger)``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True, eq=False)
class BlochBasis:
    dim: int
    elements: np.ndarray  # shape (d*d - 1, d, d)
    hermitian: bool
    name: str = ""

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def subset(self, n: int) -> "BlochBasis":
        if not 1 <= n <= len(self):
            raise ValueError(f"n must be in [1, {len(self)}], got {n}")
        return BlochBasis(self.dim, self.elements[:n], self.hermitian, self.name)

    def gram(self) -> np.ndarray:
        """Matrix of ``Tr(l_i l_j^dagger)``."""
        e = self.elements
        return np.einsum("aij,bij->ab", e, e.conj())


def _frozen(a):
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _gell_mann(d: int) -> np.ndarray:
    sym, anti, diag = [], [], []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1
            sym.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            anti.append(m)
    for l in range(1, d):
        v = np.zeros(d)
        v[:l] = 1
        v[l] = -l
        diag.append(np.sqrt(2 / (l * (l + 1))) * np.diag(v).astype(complex))
    # standard normalisation is Tr = 2; rescale to Tr = d
    return _frozen(np.sqrt(d / 2) * np.array(sym + anti + diag))


def gell_mann_basis(d: int) -> BlochBasis:
    """Generalised Gell-Mann matrices: symmetric, antisymmetric, diagonal."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return BlochBasis(d, _gell_mann(d), True, "gell-mann")


def shift_clock(d: int):
    """Return the shift ``X|k> = |k+1>`` and clock ``Z|k> = w^k |k>``."""
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return x, z


@lru_cache(maxsize=None)
def _weyl(d: int) -> np.ndarray:
    x, z = shift_clock(d)
    els = []
    for u in range(d):
        xu = np.linalg.matrix_power(x, u)
        for v in range(d):
            if u == 0 and v == 0:
                continue
            els.append(xu @ np.linalg.matrix_power(z, v))
    return _frozen(np.array(els))


def weyl_heisenberg_basis(d: int) -> BlochBasis:
    """Unitary basis ``X^u Z^v`` with ``(u, v) != (0, 0)``, lexicographic order."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return BlochBasis(d, _weyl(d), False, "weyl-heisenberg")


def weyl_index(d: int, u: int, v: int) -> int:
    return (u % d) * d + (v % d) - 1


def fourier_matrix(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def fourier_basis(d: int) -> np.ndarray:
    """Rows are the states ``|f_i> = Omega |e_i>``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return fourier_matrix(d).T.copy()


def computational_basis(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def bloch_decompose(rho, basis: BlochBasis) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"state of shape {rho.shape} does not match basis dimension {basis.dim}")
    mu = np.einsum("ij,aji->a", rho, basis.elements.conj().transpose(0, 2, 1))
    return mu.real.copy() if basis.hermitian else mu


def bloch_compose(mu, basis: BlochBasis) -> np.ndarray:
    """``(I + sum_i mu_i l_i) / d``; the result need not be PSD."""
    mu = np.asarray(mu)
    if mu.shape != (len(basis),):
        raise ValueError(f"Bloch vector of length {mu.shape} does not match basis of size {len(basis)}")
    d = basis.dim
    return (np.eye(d) + np.einsum("a,aij->ij", mu, basis.elements)) / d


def maximally_entangled(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)

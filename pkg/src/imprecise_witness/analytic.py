"""Closed-form separable and entangled bounds under measurement inaccuracy.

All bounds are expressed in ``q = 1 - 2 eps``, the worst-case overlap
``Tr(A A~)/d`` of a lab observable with its target.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .bases import BlochBasis, bloch_compose, bloch_decompose, maximally_entangled, weyl_heisenberg_basis
from .linalg import kron, pure_state

ACTIVE = "active"
CLAMPED = "clamped-at-algebraic-max"

QUBIT_THRESHOLD = 0.5 - 1 / (2 * math.sqrt(2))
THREE_PAULI_THRESHOLD = (3 - math.sqrt(3)) / 6


@dataclass(frozen=True)
class AnalyticBound:
    value: float
    regime: str
    threshold_eps: float
    conjectured: bool = False

    def __float__(self):
        return self.value


def _check_eps(eps):
    eps = float(eps)
    if not 0.0 <= eps <= 1.0 or math.isnan(eps):
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    return eps


def _root(eps):
    return math.sqrt(eps * (1 - eps))


def simplest_qubit_sep_bound(eps) -> AnalyticBound:
    """Separable maximum of ``<XX> + <ZZ>`` with inaccurate qubit observables."""
    eps = _check_eps(eps)
    if eps > QUBIT_THRESHOLD:
        return AnalyticBound(2.0, CLAMPED, QUBIT_THRESHOLD)
    return AnalyticBound(1 + 4 * (1 - 2 * eps) * _root(eps), ACTIVE, QUBIT_THRESHOLD)


def three_pauli_sep_bound(eps) -> AnalyticBound:
    """Separable maximum of ``<XX> + <YY> + <ZZ>``."""
    eps = _check_eps(eps)
    if eps > THREE_PAULI_THRESHOLD:
        return AnalyticBound(3.0, CLAMPED, THREE_PAULI_THRESHOLD)
    q = 1 - 2 * eps
    val = 2 + 4 * math.sqrt(2) * q * _root(eps) - q * q
    return AnalyticBound(val, ACTIVE, THREE_PAULI_THRESHOLD)


def chsh_sep_model(eps) -> AnalyticBound:
    """Value of an explicit separable CHSH model.

    Only conjectured to be optimal, so this is a reference curve (a lower
    bound on the separable maximum), not a certified maximum.
    """
    eps = _check_eps(eps)
    if eps > QUBIT_THRESHOLD:
        return AnalyticBound(2.0, CLAMPED, QUBIT_THRESHOLD, conjectured=True)
    q = 1 - 2 * eps
    e = eps * (1 - eps)
    val = 4 * q * math.sqrt(e) + math.sqrt(max(0.0, 2 - 16 * e * q * q))
    return AnalyticBound(val, ACTIVE, QUBIT_THRESHOLD, conjectured=True)


def _check_dn(d, n):
    if d < 2 or not 1 <= n <= d * d - 1:
        raise ValueError(f"need d >= 2 and 1 <= n <= d^2-1, got d={d}, n={n}")


def highdim_threshold(n) -> float:
    """Inaccuracy at which the high-dimensional bound saturates (q = 1/sqrt(n))."""
    return (1 - 1 / math.sqrt(n)) / 2


def highdim_sep_bound(d: int, n: int, eps) -> AnalyticBound:
    """Separable maximum of ``sum_i <A_i x B_i>`` for ``n`` Bloch elements."""
    _check_dn(d, n)
    eps = _check_eps(eps)
    q = 1 - 2 * eps
    thr = highdim_threshold(n)
    if q < 1 / math.sqrt(n):
        return AnalyticBound(float(n * (d - 1)), CLAMPED, thr)
    val = (d - 1) * (q + math.sqrt(n - 1) * math.sqrt(1 - q * q)) ** 2
    return AnalyticBound(val, ACTIVE, thr)


def highdim_sep_bound_expanded(d: int, n: int, eps) -> float:
    """Expanded form of the active branch, for cross-checking."""
    _check_dn(d, n)
    q = 1 - 2 * _check_eps(eps)
    if q < 1 / math.sqrt(n):
        return float(n * (d - 1))
    return (d - 1) * (n - 1 - q * q * (n - 2) + 2 * q * math.sqrt(n - 1) * math.sqrt(1 - q * q))


def highdim_ent_bound(d: int, n: int) -> float:
    """Entangled bound when the Bloch basis is not fixed."""
    _check_dn(d, n)
    return min(math.sqrt(n * (d * d - 1)), n * (d - 1))


def fixed_basis_ent_bound(elements) -> float:
    """Top eigenvalue of ``sum_i l_i x conj(l_i)``."""
    els = np.asarray(elements.elements if isinstance(elements, BlochBasis) else elements, dtype=complex)
    op = sum(kron(l, l.conj()) for l in els)
    return float(np.linalg.eigvalsh(0.5 * (op + op.conj().T))[-1])


def max_entangled_value(d: int, n: int, basis: BlochBasis = None) -> float:
    """Value of ``sum_i <l_i x conj(l_i)>`` on the maximally entangled state.

    Equals ``n`` for any basis; computed by explicit trace.
    """
    _check_dn(d, n)
    if basis is None:
        from .bases import gell_mann_basis
        basis = gell_mann_basis(d)
    phi = maximally_entangled(d)
    return float(sum(np.vdot(phi, kron(l, l.conj()) @ phi).real for l in basis.elements[:n]))


def delta_ratio(d: int, w_sep) -> float:
    """Relative entangled-to-separable gap for the conjugate-bases witness."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return d / (d - 1) * (2 - float(w_sep))


@dataclass
class TightnessResult:
    state: np.ndarray
    observables_A: np.ndarray
    observables_B: np.ndarray
    witness_value: float
    validity: dict = field(default_factory=dict)


def tightness_construction(d: int, n: int, eps, basis: BlochBasis, fiducial,
                           forced_mu=None) -> TightnessResult:
    """Product-state strategy attaining the high-dimensional separable bound.

    Each observable mixes its own Bloch element (weight ``q``) with the other
    ``n - 1`` elements (equal weights), after aligning element phases with the
    local Bloch vector of ``fiducial``. The state is ``phi x conj(phi)`` and
    the B-side uses conjugated observables. ``forced_mu`` replaces the
    fiducial's Bloch components along the ``n`` elements (negative control).
    The report flags whether the local state is PSD and whether every
    observable has operator norm at most one; neither is enforced.
    """
    _check_dn(d, n)
    q = 1 - 2 * _check_eps(eps)
    if q < 1 / math.sqrt(n) - 1e-15:
        raise ValueError(f"q = {q} lies below the regime boundary 1/sqrt(n) = {1 / math.sqrt(n)}")
    if basis.dim != d or len(basis) < n:
        raise ValueError("basis does not match (d, n)")
    phi = pure_state(fiducial)
    if phi.shape != (d,):
        raise ValueError("fiducial has wrong dimension")
    els = basis.elements[:n]
    rho_loc = np.outer(phi, phi.conj())
    mu_full = bloch_decompose(rho_loc, basis)
    if forced_mu is not None:
        mu = np.asarray(forced_mu, dtype=complex)
        if mu.shape != (n,):
            raise ValueError("forced_mu must have length n")
        mu_full = np.array(mu_full, dtype=complex)
        mu_full[:n] = mu
        mu_full[n:] = 0
        rho_loc = bloch_compose(mu_full, basis)
        w, v = np.linalg.eigh(0.5 * (rho_loc + rho_loc.conj().T))
        phi = v[:, -1]
    # <l_i> on the local state; align phases so the overlaps become real
    overlaps = np.einsum("ij,aji->a", rho_loc, els)
    phases = np.exp(-1j * np.angle(overlaps))
    lam = phases[:, None, None] * els
    off = math.sqrt(1 - q * q) / math.sqrt(n - 1) if n > 1 else 0.0
    total = lam.sum(axis=0)
    obs_A = np.array([q * lam[i] + off * (total - lam[i]) for i in range(n)])
    obs_B = obs_A.conj()
    state = kron(rho_loc, rho_loc.conj())
    value = float(sum(np.trace(state @ kron(a, b)).real for a, b in zip(obs_A, obs_B)))
    mins = np.linalg.eigvalsh(0.5 * (rho_loc + rho_loc.conj().T))
    norms = [float(np.linalg.norm(a, 2)) for a in obs_A]
    hermitian = bool(all(np.allclose(a, a.conj().T, atol=1e-12) for a in obs_A))
    validity = {
        "state_psd": bool(mins[0] >= -1e-10),
        "state_min_eigenvalue": float(mins[0]),
        "observable_norms": norms,
        "observables_bounded": bool(max(norms) <= 1 + 1e-10),
        "observables_hermitian": hermitian,
        "bloch_overlaps": np.abs(overlaps),
    }
    return TightnessResult(state, obs_A, obs_B, value, validity)


def sic_check(d: int, fiducial, tol: float = 1e-8):
    """Check ``|<phi|X^u Z^v|phi>| = 1/sqrt(d+1)`` for all ``(u, v) != (0, 0)``.

    Returns ``(ok, max_deviation)``.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    phi = pure_state(fiducial)
    if phi.shape != (d,):
        raise ValueError("fiducial has wrong dimension")
    els = weyl_heisenberg_basis(d).elements
    vals = np.abs(np.einsum("i,aij,j->a", phi.conj(), els, phi))
    dev = float(np.abs(vals - 1 / math.sqrt(d + 1)).max())
    return dev <= tol, dev


def qubit_sic_fiducial() -> np.ndarray:
    """Eigenvector of ``(X + Y + Z)/sqrt(3)`` with eigenvalue +1."""
    from .bases import gell_mann_basis
    h = np.einsum("a,aij->ij", np.ones(3) / math.sqrt(3), gell_mann_basis(2).elements)
    return np.linalg.eigh(h)[1][:, -1]


def qutrit_sic_fiducial() -> np.ndarray:
    return np.array([0, 1, -1], dtype=complex) / math.sqrt(2)

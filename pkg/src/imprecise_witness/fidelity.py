"""Average fidelity between a lab measurement and its projective target."""
from dataclasses import dataclass

import numpy as np

from .linalg import Measurement, as_matrix


@dataclass(frozen=True)
class InaccuracyBudget:
    """Per-setting inaccuracies for both parties, each in ``[0, 1]``."""

    eps_A: tuple
    eps_B: tuple

    def __post_init__(self):
        for side in ("eps_A", "eps_B"):
            vals = tuple(float(e) for e in getattr(self, side))
            if any(not 0.0 <= e <= 1.0 for e in vals):
                raise ValueError(f"{side} entries must lie in [0, 1], got {vals}")
            object.__setattr__(self, side, vals)

    @classmethod
    def uniform(cls, eps: float, nx: int, ny: int) -> "InaccuracyBudget":
        return cls((eps,) * nx, (eps,) * ny)


def _check_pair(lab: Measurement, target: Measurement):
    if lab.dim != target.dim or lab.outcomes != target.outcomes:
        raise ValueError(
            f"lab ({lab.outcomes} outcomes, d={lab.dim}) and target "
            f"({target.outcomes} outcomes, d={target.dim}) do not match")
    if not target.is_projective():
        raise ValueError("target measurement must be projective")


def measurement_fidelity(lab: Measurement, target: Measurement) -> float:
    """``(1/d) sum_a Tr(lab_a target_a)``."""
    _check_pair(lab, target)
    f = np.einsum("aij,aji->", lab.effects, target.effects).real / lab.dim
    return float(f)


def min_epsilon(lab: Measurement, target: Measurement) -> float:
    """Smallest inaccuracy compatible with the pair, clamped to ``[0, 1]``."""
    return float(np.clip(1.0 - measurement_fidelity(lab, target), 0.0, 1.0))


def probe_fidelity(lab: Measurement, target: Measurement) -> float:
    """Fidelity from probing the lab device with target eigenstates.

    For every outcome ``a`` the lab measurement is fed each orthonormal vector
    spanning the range of the target projector ``a``; the probability of
    reading ``a`` is averaged with weight ``rank/d``.
    """
    _check_pair(lab, target)
    d = lab.dim
    total = 0.0
    for a in range(target.outcomes):
        w, v = np.linalg.eigh(target.effects[a])
        vecs = v[:, w > 0.5]
        rank = vecs.shape[1]
        if rank == 0:
            continue
        probs = [np.vdot(vecs[:, k], lab.effects[a] @ vecs[:, k]).real for k in range(rank)]
        total += (rank / d) * np.mean(probs)
    return float(total)


def observable_overlap(a, target) -> float:
    """``Tr(A target)`` for observables with operator norm at most one."""
    a = as_matrix(a)
    t = as_matrix(target)
    if a.shape != t.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {t.shape}")
    for name, m in (("observable", a), ("target", t)):
        if np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T))).max() > 1 + 1e-10:
            raise ValueError(f"{name} has operator norm larger than one")
    return float(np.trace(a @ t).real)


def overlap_to_epsilon(overlap: float, d: int) -> float:
    """Invert ``Tr(A target) = d (1 - 2 eps)``."""
    return float(np.clip((1 - overlap / d) / 2, 0.0, 1.0))

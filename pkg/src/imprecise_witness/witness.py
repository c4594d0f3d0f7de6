"""Witness scenarios: coefficient tensors, targets, Born rule and Bell operator.

Coefficient tensors are indexed ``c[x, y, a, b]`` and correlations
``p[x, y, a, b] = Tr[(A_{a|x} x B_{b|y}) rho]``.
"""
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .bases import fourier_basis, gell_mann_basis
from .fidelity import InaccuracyBudget
from .linalg import Measurement, basis_measurement, check_density_matrix, measurement_from_observable


@dataclass(frozen=True, eq=False)
class WitnessSpec:
    name: str
    d: int
    coeffs: np.ndarray
    targets_A: tuple
    targets_B: tuple
    budget: InaccuracyBudget
    ideal_sep: float = None
    ideal_ent: float = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 4:
            raise ValueError("coefficient tensor must have shape (nx, ny, o, o)")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "targets_A", tuple(self.targets_A))
        object.__setattr__(self, "targets_B", tuple(self.targets_B))
        nx, ny, oa, ob = c.shape
        for side, targets, n, o in (("A", self.targets_A, nx, oa), ("B", self.targets_B, ny, ob)):
            if len(targets) != n:
                raise ValueError(f"side {side}: {len(targets)} targets for {n} settings")
            for t in targets:
                if t.dim != self.d or t.outcomes != o:
                    raise ValueError(f"side {side}: target shape ({t.outcomes}, {t.dim}) does not match")
                if not t.is_projective():
                    raise ValueError(f"side {side}: targets must be projective")
        if len(self.budget.eps_A) != nx or len(self.budget.eps_B) != ny:
            raise ValueError("budget length does not match number of settings")

    @property
    def nx(self):
        return self.coeffs.shape[0]

    @property
    def ny(self):
        return self.coeffs.shape[1]

    @property
    def o(self):
        return self.coeffs.shape[2]

    def with_eps(self, eps_A, eps_B=None) -> "WitnessSpec":
        """Copy with a new budget; scalars are applied to every setting."""
        eps_B = eps_A if eps_B is None else eps_B
        ea = (eps_A,) * self.nx if np.isscalar(eps_A) else tuple(eps_A)
        eb = (eps_B,) * self.ny if np.isscalar(eps_B) else tuple(eps_B)
        return replace(self, budget=InaccuracyBudget(ea, eb))

    def target_effects(self, side):
        t = self.targets_A if side == 0 else self.targets_B
        return np.array([m.effects for m in t])

    # -- serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        def mats(ms):
            return [[_encode_matrix(e) for e in m.effects] for m in ms]

        return {
            "name": self.name, "d": self.d,
            "coeffs": self.coeffs.tolist(),
            "targets_A": mats(self.targets_A), "targets_B": mats(self.targets_B),
            "eps_A": list(self.budget.eps_A), "eps_B": list(self.budget.eps_B),
            "ideal_sep": self.ideal_sep, "ideal_ent": self.ideal_ent,
            "metadata": self.metadata,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data) -> "WitnessSpec":
        def meas(ms):
            return tuple(Measurement(np.array([_decode_matrix(e) for e in m])) for m in ms)

        return cls(data["name"], int(data["d"]), np.array(data["coeffs"], dtype=float),
                   meas(data["targets_A"]), meas(data["targets_B"]),
                   InaccuracyBudget(data["eps_A"], data["eps_B"]),
                   data.get("ideal_sep"), data.get("ideal_ent"), data.get("metadata", {}))

    @classmethod
    def loads(cls, text) -> "WitnessSpec":
        return cls.from_dict(json.loads(text))


def _encode_matrix(m):
    """Row-major list of ``[re, im]`` pairs."""
    m = np.asarray(m)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _decode_matrix(rows):
    a = np.asarray(rows, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError("matrix must be nested rows of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


@dataclass(frozen=True, eq=False)
class Correlation:
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 4:
            raise ValueError("correlation must have shape (nx, ny, oa, ob)")
        if p.min() < -1e-10 or p.max() > 1 + 1e-10:
            raise ValueError("probabilities outside [0, 1]")
        sums = p.sum(axis=(2, 3))
        if np.abs(sums - 1).max() > 1e-9:
            raise ValueError("probabilities are not normalised per setting pair")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


def _effects(meas):
    return np.array([m.effects if isinstance(m, Measurement) else np.asarray(m) for m in meas])


def born(rho, meas_A, meas_B) -> Correlation:
    ea, eb = _effects(meas_A), _effects(meas_B)
    d = ea.shape[-1]
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if rho.shape != (d * eb.shape[-1],) * 2:
        raise ValueError(f"state of shape {rho.shape} does not match local dimensions")
    rho = check_density_matrix(rho)
    r = rho.reshape(d, eb.shape[-1], d, eb.shape[-1])
    p = np.einsum("xaji,ybmk,ikjm->xyab", ea, eb, r).real
    return Correlation(p)


def evaluate(spec: WitnessSpec, corr) -> float:
    p = corr.p if isinstance(corr, Correlation) else np.asarray(corr)
    if p.shape != spec.coeffs.shape:
        raise ValueError(f"correlation shape {p.shape} does not match coefficients {spec.coeffs.shape}")
    return float(np.sum(spec.coeffs * p))


def bell_operator(spec: WitnessSpec, meas_A, meas_B) -> np.ndarray:
    """``sum c_abxy A_{a|x} x B_{b|y}`` as a ``d^2 x d^2`` Hermitian matrix."""
    ea, eb = _effects(meas_A), _effects(meas_B)
    if ea.shape[:2] != spec.coeffs.shape[::2] or eb.shape[:2] != spec.coeffs.shape[1::2]:
        raise ValueError("measurements do not match the coefficient tensor")
    da, db = ea.shape[-1], eb.shape[-1]
    op = np.einsum("xyab,xaij,ybkl->ikjl", spec.coeffs, ea, eb).reshape(da * db, da * db)
    return 0.5 * (op + op.conj().T)


def witness_value(spec, rho, meas_A, meas_B) -> float:
    return evaluate(spec, born(rho, meas_A, meas_B))


# ---------------------------------------------------------------------------
# built-in scenarios

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)


def _pauli_spec(name, paulis, signs, ideal_sep, ideal_ent, eps=0.0):
    meas = [measurement_from_observable(p) for p in paulis]
    n = len(meas)
    sgn = np.array([[1.0, -1.0], [-1.0, 1.0]])
    c = np.zeros((n, n, 2, 2))
    for x in range(n):
        for y in range(n):
            c[x, y] = signs[x][y] * sgn
    return WitnessSpec(name, 2, c, meas, meas,
                       InaccuracyBudget.uniform(eps, n, n), ideal_sep, ideal_ent)


def pauli2(eps=0.0) -> WitnessSpec:
    """``<XX> + <ZZ>``."""
    return _pauli_spec("pauli2", [_X, _Z], np.eye(2), 1.0, 2.0, eps)


def pauli3(eps=0.0) -> WitnessSpec:
    """``<XX> + <YY> + <ZZ>`` with identical targets on both sides."""
    return _pauli_spec("pauli3", [_X, _Y, _Z], np.eye(3), 1.0, 1.0, eps)


def chsh(eps=0.0) -> WitnessSpec:
    """``<X (X + Z)> + <Z (X - Z)>``."""
    return _pauli_spec("chsh", [_X, _Z], np.array([[1.0, 1.0], [1.0, -1.0]]),
                       math.sqrt(2), 2 * math.sqrt(2), eps)


def conjugate_bases(d: int, eps=0.0) -> WitnessSpec:
    """Computational and Fourier bases, B-side Fourier conjugated.

    Conjugating the B-side Fourier basis makes both bases perfectly
    correlated on the maximally entangled state, so the entangled value is 2.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    comp = basis_measurement(np.eye(d))
    four = basis_measurement(fourier_basis(d))
    c = np.zeros((2, 2, d, d))
    c[0, 0] = c[1, 1] = np.eye(d)
    return WitnessSpec(f"conjugate-bases-{d}", d, c, [comp, four], [comp, four.conj()],
                       InaccuracyBudget.uniform(eps, 2, 2), 1 + 1 / d, 2.0,
                       {"family": "conjugate-bases"})


def _spectral(op, outcomes):
    w, v = np.linalg.eigh(op)
    vals = []
    for x in w:
        if not vals or abs(x - vals[-1]) > 1e-9:
            vals.append(x)
    eff = np.zeros((outcomes, op.shape[0], op.shape[0]), dtype=complex)
    for k, x in enumerate(w):
        j = int(np.argmin([abs(x - u) for u in vals]))
        eff[j] += np.outer(v[:, k], v[:, k].conj())
    vals = vals + [0.0] * (outcomes - len(vals))
    return Measurement(eff), np.array(vals)


def bloch_family(d: int, n: int, eps=0.0) -> WitnessSpec:
    """``sum_i <l_i x conj(l_i)>`` over the first ``n`` Gell-Mann elements.

    Each element is measured through its full spectral decomposition (one
    outcome per distinct eigenvalue, padded with zero projectors) and the
    coefficients carry the eigenvalues, so ideal correlators equal
    ``<l_i x conj(l_i)>`` exactly.
    """
    if d < 2 or not 1 <= n <= d * d - 1:
        raise ValueError(f"need d >= 2 and 1 <= n <= d^2-1, got d={d}, n={n}")
    els = gell_mann_basis(d).elements[:n]
    o = max(len(set(np.round(np.linalg.eigvalsh(l), 9))) for l in els)
    ma, vals = zip(*(_spectral(l, o) for l in els))
    c = np.zeros((n, n, o, o))
    for i in range(n):
        c[i, i] = np.outer(vals[i], vals[i])
    return WitnessSpec(f"bloch-{d}-{n}", d, c, ma, [m.conj() for m in ma],
                       InaccuracyBudget.uniform(eps, n, n), float(d - 1), None,
                       {"family": "bloch", "n": n, "reading": "spectral",
                        "eigenvalues": [list(map(float, v)) for v in vals]})


def builtin_specs(d: int = 3, n: int = None) -> dict:
    """Named catalogue; ``d`` and ``n`` parametrise the qudit families."""
    n = d * d - 1 if n is None else n
    return {
        "pauli2": pauli2(),
        "pauli3": pauli3(),
        "chsh": chsh(),
        "conjugate-bases": conjugate_bases(d),
        "bloch-family": bloch_family(d, n),
    }


def get_spec(name: str, d: int = None, n: int = None, eps=0.0) -> WitnessSpec:
    if name == "pauli2":
        return pauli2(eps)
    if name == "pauli3":
        return pauli3(eps)
    if name == "chsh":
        return chsh(eps)
    if name in ("conjugate-bases", "conjugate"):
        return conjugate_bases(d or 2, eps)
    if name in ("bloch-family", "bloch"):
        d = d or 2
        return bloch_family(d, n or d * d - 1, eps)
    raise KeyError(f"unknown witness {name!r}")

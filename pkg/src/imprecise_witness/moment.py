"""Sampled tracial moment-matrix relaxations (upper bounds).

Words are products of the symbols ``rho`` (a pure global state), lab
effects ``A_{a|x}``, ``B_{b|y}`` and target effects. One-sided operators act
as ``O x I`` or ``I x O`` on ``C^d x C^d``. For a list of words the tracial
moment matrix is ``Gamma(u; v) = Tr(u v^dagger)``. Random ``d``-dimensional
strategies are drawn until their moment matrices stop spanning new
directions; the relaxation then optimises over affine combinations of the
samples that are PSD and satisfy the fidelity budgets.

Only the first ``o - 1`` effects per setting are symbols; the last one is
``I - sum`` of the others. Lab measurements are sampled projective, and the
canonical form of words uses the resulting identities (``AA = A``,
``A_a A_a' = 0`` for ``a != a'``, ``rho rho = rho``) along with the
commutation of the two parties' operators.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .analytic import simplest_qubit_sep_bound, three_pauli_sep_bound
from .linalg import haar_random_unitary, random_povm, random_projective_measurement, random_pure_state
from .witness import WitnessSpec, get_spec

log = logging.getLogger(__name__)

ENTANGLED = "entangled"
SEPARABLE = "separable"


class BasisIncomplete(RuntimeError):
    pass


@dataclass(frozen=True)
class Symbol:
    kind: str        # "rho", "lab" or "target"
    side: int = -1   # 0 = A, 1 = B
    x: int = 0
    a: int = 0
    group: int = 0   # target family (0 = the witness's own targets)

    @property
    def label(self):
        if self.kind == "rho":
            return "rho"
        p = "AB"[self.side]
        t = "~" * (self.kind == "target") + (str(self.group) if self.group else "")
        return f"{p}{t}[{self.a}|{self.x}]"


@dataclass
class OperatorList:
    d: int
    o: int
    nx: int
    ny: int
    symbols: list
    targets: list            # targets[group] = (effects_A, effects_B)
    labs: str = "rank-matched"
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {s: i for i, s in enumerate(self.symbols)}
        if len(self.index) != len(self.symbols):
            raise ValueError("symbols must be unique")
        if self.labs not in LAB_MODELS:
            raise ValueError(f"unknown lab model {self.labs!r}")

    @property
    def lab_projective(self):
        return self.labs != "povm"

    def sym(self, kind, side=-1, x=0, a=0, group=0) -> int:
        return self.index[Symbol(kind, side, x, a, group)]

    def local(self, side=None):
        return [i for i, s in enumerate(self.symbols) if s.kind != "rho" and (side is None or s.side == side)]


LAB_MODELS = ("povm", "projective", "rank-matched")


def operator_list(spec: WitnessSpec, extra_targets=(), labs="rank-matched") -> OperatorList:
    """Symbols for a witness; ``extra_targets`` adds ``(targets_A, targets_B)`` families.

    ``labs`` selects how lab measurements are sampled: generic POVMs,
    projective with random ranks, or projective with the targets' ranks.
    """
    o = spec.o
    fams = [(spec.target_effects(0), spec.target_effects(1))]
    for ta, tb in extra_targets:
        fams.append((np.array([m.effects for m in ta]), np.array([m.effects for m in tb])))
    syms = [Symbol("rho")]
    for side, n in ((0, spec.nx), (1, spec.ny)):
        for x in range(n):
            for a in range(o - 1):
                syms.append(Symbol("lab", side, x, a))
        for g in range(len(fams)):
            for x in range(n):
                for a in range(o - 1):
                    syms.append(Symbol("target", side, x, a, g))
    return OperatorList(spec.d, o, spec.nx, spec.ny, syms, fams, labs)


# ---------------------------------------------------------------------------
# words

def canonical(ops: OperatorList, word):
    """Canonical form of a word, or ``None`` if it is identically zero."""
    w = list(word)
    rho = ops.sym("rho")
    changed = True
    while changed:
        changed = False
        # A-side operators commute with B-side ones: sort each local run by side
        out, run = [], []
        for s in w + [rho]:
            if s == rho:
                out.extend(sorted(run, key=lambda i: ops.symbols[i].side))
                run = []
                out.append(s)
            else:
                run.append(s)
        out.pop()
        new = []
        for s in out:
            if new:
                p = new[-1]
                sp, ss = ops.symbols[p], ops.symbols[s]
                proj = sp.kind != "lab" or ops.lab_projective
                if p == s and proj:
                    changed = True
                    continue
                if (proj and sp.kind == ss.kind != "rho" and sp.side == ss.side and sp.x == ss.x
                        and sp.group == ss.group and sp.a != ss.a):
                    return None
            new.append(s)
        if new != w:
            changed = True
        w = new
    return tuple(w)


@dataclass
class MonomialList:
    level: int
    words: list
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {}
        for i, w in enumerate(self.words):
            self.index.setdefault(w, i)

    def __len__(self):
        return len(self.words)

    def find(self, word):
        try:
            return self.index[word]
        except KeyError:
            raise KeyError(f"word {word} is not in the monomial list") from None


def build_monomials(ops: OperatorList, k: int) -> MonomialList:
    """Nested word lists; every word at level ``k`` has degree at most ``k``.

    Level 2: identity, ``rho``, every local symbol ``s`` and ``rho s``.
    Level 3 adds cross-party products ``a b`` and ``rho a b``.
    Level 4 adds same-party products ``rho s t``.
    """
    if k < 2:
        raise ValueError("level must be >= 2")
    rho = ops.sym("rho")
    loc_a, loc_b = ops.local(0), ops.local(1)
    raw = [(), (rho,)]
    raw += [(s,) for s in loc_a + loc_b]
    raw += [(rho, s) for s in loc_a + loc_b]
    if k >= 3:
        cross = [(a, b) for a in loc_a for b in loc_b]
        raw += cross + [(rho,) + w for w in cross]
    if k >= 4:
        raw += [(rho, s, t) for side in (loc_a, loc_b) for s in side for t in side]
    words, seen = [], set()
    for w in raw:
        c = canonical(ops, w)
        if c is None or c in seen:
            continue
        seen.add(c)
        words.append(c)
    return MonomialList(k, words)


# ---------------------------------------------------------------------------
# sampling

def _embed(op, side, d):
    eye = np.eye(d)
    return np.kron(op, eye) if side == 0 else np.kron(eye, op)


def symbol_operators(ops: OperatorList, psi, labs_A, labs_B) -> list:
    """Operators on ``C^d x C^d`` for every symbol, given a strategy."""
    d = ops.d
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    out = []
    for s in ops.symbols:
        if s.kind == "rho":
            out.append(np.outer(psi, psi.conj()))
        elif s.kind == "lab":
            e = (labs_A if s.side == 0 else labs_B)[s.x][s.a]
            out.append(_embed(np.asarray(e), s.side, d))
        else:
            e = ops.targets[s.group][s.side][s.x][s.a]
            out.append(_embed(e, s.side, d))
    return out


def moment_matrix(ops: OperatorList, ml: MonomialList, psi, labs_A, labs_B) -> np.ndarray:
    """``Gamma(u; v) = Tr(u v^dagger)`` for an explicit strategy."""
    syms = symbol_operators(ops, psi, labs_A, labs_B)
    dim = ops.d * ops.d
    cache = {(): np.eye(dim, dtype=complex)}

    def op(w):
        if w not in cache:
            cache[w] = op(w[:-1]) @ syms[w[-1]]
        return cache[w]

    V = np.array([op(w).reshape(-1) for w in ml.words])
    G = V @ V.conj().T
    return 0.5 * (G + G.conj().T)


def _rank_matched(target, rng):
    d = target.shape[-1]
    ranks = np.rint(np.einsum("aii->a", target).real).astype(int)
    u = haar_random_unitary(d, rng)
    out, k = np.zeros_like(target), 0
    for a, r in enumerate(ranks):
        v = u[:, k:k + r]
        out[a] = v @ v.conj().T
        k += r
    return out


def sample_strategy(ops: OperatorList, rng):
    """Pure global state and lab measurements (effect arrays) per ``ops.labs``."""
    d, o = ops.d, ops.o
    psi = random_pure_state(d * d, rng)
    labs = []
    for side, n in ((0, ops.nx), (1, ops.ny)):
        ms = []
        for x in range(n):
            if ops.labs == "povm":
                ms.append(random_povm(d, o, rng).effects)
            elif ops.labs == "projective":
                ms.append(random_projective_measurement(d, o, rng).effects)
            else:
                ms.append(_rank_matched(ops.targets[0][side][x], rng))
        labs.append(ms)
    return psi, labs[0], labs[1]


def sample_moment_matrix(ops: OperatorList, ml: MonomialList, rng) -> np.ndarray:
    return moment_matrix(ops, ml, *sample_strategy(ops, rng))


def _hvec(G):
    """Real coordinates of a Hermitian matrix (upper triangle, re and im)."""
    iu = np.triu_indices(G.shape[0])
    off = iu[0] != iu[1]
    w = np.where(off, math.sqrt(2), 1.0)
    return np.concatenate([G[iu].real * w, G[iu].imag[off] * math.sqrt(2)])


def _hunvec(v, n):
    iu = np.triu_indices(n)
    off = iu[0] != iu[1]
    k = len(iu[0])
    w = np.where(off, 1 / math.sqrt(2), 1.0)
    G = np.zeros((n, n), dtype=complex)
    im = np.zeros(k)
    im[off] = v[k:] / math.sqrt(2)
    G[iu] = v[:k] * w + 1j * im
    return G + np.triu(G, 1).conj().T


@dataclass
class MomentBasis:
    gammas: list
    m: int
    complete: bool
    termination_residuals: list
    samples_drawn: int
    q: np.ndarray = field(repr=False, default=None)  # orthonormal rows spanning vec(gammas)


def build_basis(ops: OperatorList, ml: MonomialList, rng, max_samples: int = 20000,
                tol: float = 1e-7, patience: int = 3, anchors: int = 0) -> MomentBasis:
    """Sample moment matrices until ``patience`` consecutive draws are dependent.

    ``anchors`` extra draws use the targets as lab measurements.
    """
    gammas, rows, resid = [], [], []
    dep = 0
    drawn = 0
    Q = np.zeros((0, len(ml) ** 2))
    complete = False
    while drawn < max_samples:
        drawn += 1
        if drawn <= anchors:
            psi = random_pure_state(ops.d ** 2, rng)
            G = moment_matrix(ops, ml, psi, ops.targets[0][0], ops.targets[0][1])
        else:
            G = sample_moment_matrix(ops, ml, rng)
        v = _hvec(G)
        nv = np.linalg.norm(v)
        r = v - Q.T @ (Q @ v)
        r = r - Q.T @ (Q @ r)
        rel = np.linalg.norm(r) / nv
        if rel < tol:
            dep += 1
            resid.append(float(rel))
            if dep >= patience:
                complete = True
                break
            continue
        dep = 0
        resid = []
        gammas.append(G)
        Q = np.vstack([Q, r / np.linalg.norm(r)])
    if not complete:
        log.warning("moment basis incomplete after %d samples (m=%d)", drawn, len(gammas))
    return MomentBasis(gammas, len(gammas), complete, resid, drawn, Q)


# ---------------------------------------------------------------------------
# linear functionals on Gamma

def _effect_terms(ops, kind, side, x, a, group=0):
    if a < ops.o - 1:
        return [(1.0, (ops.sym(kind, side, x, a, group),))]
    return [(1.0, ())] + [(-1.0, (ops.sym(kind, side, x, b, group),)) for b in range(ops.o - 1)]


def _times(ops, t1, t2):
    out = []
    for c1, w1 in t1:
        for c2, w2 in t2:
            w = canonical(ops, w1 + w2)
            if w is not None:
                out.append((c1 * c2, w))
    return out


class Functional:
    """``Re sum c_uv Gamma[u, v]`` stored as a coefficient matrix."""

    def __init__(self, n):
        self.C = np.zeros((n, n), dtype=complex)

    def add(self, ml, u_terms, v_terms, scale=1.0):
        for cu, wu in u_terms:
            for cv, wv in v_terms:
                self.C[ml.find(wu), ml.find(wv)] += scale * cu * cv

    def __call__(self, G):
        return float(np.sum(self.C * G).real)

    def matrix(self):
        """Hermitian ``H`` with ``Re Tr(H G)`` equal to the functional."""
        return 0.5 * (self.C.T + self.C.conj())


def witness_functional(ops, ml, coeffs, target_group=None) -> Functional:
    """``sum c Gamma(rho A; B)``; with ``target_group`` the target effects are used."""
    f = Functional(len(ml))
    kind = "lab" if target_group is None else "target"
    g = target_group or 0
    rho = [(1.0, (ops.sym("rho"),))]
    nx, ny, oa, ob = coeffs.shape
    for x in range(nx):
        for y in range(ny):
            for a in range(oa):
                u = _times(ops, rho, _effect_terms(ops, kind, 0, x, a, g))
                for b in range(ob):
                    if coeffs[x, y, a, b] != 0:
                        f.add(ml, u, _effect_terms(ops, kind, 1, y, b, g), coeffs[x, y, a, b])
    return f


def fidelity_functional(ops, ml, side, x) -> Functional:
    """``(1/d^2) sum_a Gamma(lab_a; target_a)``."""
    f = Functional(len(ml))
    for a in range(ops.o):
        f.add(ml, _effect_terms(ops, "lab", side, x, a), _effect_terms(ops, "target", side, x, a),
              1.0 / ops.d ** 2)
    return f


# ---------------------------------------------------------------------------
# relaxation

@dataclass
class RelaxationOutcome:
    upper_bound: float
    status: str
    affine_weights: np.ndarray
    duality_gap: float
    gamma: np.ndarray = field(repr=False, default=None)
    formulation: str = ""
    reduced_dim: int = 0


@dataclass
class Relaxation:
    """Precomputed span data shared across budgets."""

    ops: OperatorList
    ml: MonomialList
    basis: MomentBasis
    P: np.ndarray          # range of the mean sample
    dir_full: np.ndarray   # (m-1, n, n) orthonormal directions of the span
    mean: np.ndarray


def prepare(ops: OperatorList, ml: MonomialList, basis: MomentBasis, rank_tol=1e-9) -> Relaxation:
    if not basis.complete:
        raise BasisIncomplete("moment basis flagged incomplete; bounds would not be valid")
    n = len(ml)
    G = np.array(basis.gammas)
    mean = G.mean(axis=0)
    w, v = np.linalg.eigh(mean)
    P = v[:, w > rank_tol * w[-1]]
    # directions: orthonormal basis of span{G_i - mean}
    diffs = np.array([_hvec(g - mean) for g in G])
    u, s, vt = np.linalg.svd(diffs, full_matrices=False)
    keep = s > 1e-9 * s[0] if len(s) else []
    D = vt[keep]
    dir_full = np.array([_hunvec(d, n) for d in D]) if len(D) else np.zeros((0, n, n))
    return Relaxation(ops, ml, basis, P, dir_full, mean)


def _affine_weights(rel: Relaxation, gamma):
    G = np.array([_hvec(g) for g in rel.basis.gammas])
    s, *_ = np.linalg.lstsq(G.T, _hvec(gamma), rcond=None)
    return s


def _restrict(C, D, P, K):
    """Impose ``Gamma k = 0`` for the columns of ``K`` on the affine span."""
    rhs = -(C @ K)
    A = np.einsum("jab,bk->jak", D, K).reshape(len(D), -1)
    A = np.concatenate([A.real, A.imag], axis=1).T
    b = np.concatenate([rhs.real.ravel(), rhs.imag.ravel()])
    t0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ t0 - b) > 1e-7 * max(1.0, np.linalg.norm(b)):
        raise BasisIncomplete("face does not meet the sampled span")
    u, s, vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if len(s) else 1.0)))
    C = C + np.einsum("j,jab->ab", t0, D)
    D = np.einsum("ij,jab->iab", vt[rank:], D)
    u, s, vt = np.linalg.svd(K.conj().T @ P)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if len(s) else 1.0)))
    return C, D, P @ vt[rank:].conj().T


def _exposing_vector(C, D, P, tol):
    """PSD ``Z`` (trace one) orthogonal to the reduced affine span, or ``None``."""
    r = P.shape[1]
    Cr = _herm(P.conj().T @ C @ P)
    Dr = _herm(np.einsum("ia,kij,jb->kab", P.conj(), D, P))
    V = np.array([_hvec(Cr)] + [_hvec(d) for d in Dr])
    u, s, vt = np.linalg.svd(V, full_matrices=False)
    V = vt[s > 1e-10 * s[0]]
    if len(V) >= r * r:
        return None
    p = sdp.SdpProblem()
    p.add_block("Z", r, "complex")
    for v in V:
        p.add_constraint({"Z": _coord_matrix(v, r)}, "==", 0.0)
    p.add_constraint({"Z": np.eye(r)}, "==", 1.0)
    sol = sdp.solve(p, tol=tol)
    if not sol.optimal:
        return None
    return sol.block_values["Z"]


def _face(rel: Relaxation, spec: WitnessSpec, tol=1e-8):
    """Span data restricted to the minimal face when some budget is zero.

    With projective labs, unit fidelity on a setting forces the moment-matrix
    rows of ``lab_a - target_a`` to vanish; imposing that and then reducing
    further with exposing PSD matrices restores strict feasibility. The
    fidelity constraint of such a setting holds with equality and is dropped.
    """
    ops, ml = rel.ops, rel.ml
    n = len(ml)
    ks, zero = [], set()
    for side, eps in ((0, spec.budget.eps_A), (1, spec.budget.eps_B)):
        for x, e in enumerate(eps):
            if e == 0 and ops.lab_projective:
                zero.add((side, x))
                for a in range(ops.o - 1):
                    k = np.zeros(n)
                    k[ml.find((ops.sym("lab", side, x, a),))] = 1
                    k[ml.find((ops.sym("target", side, x, a),))] = -1
                    ks.append(k)
    C, D, P = rel.mean, rel.dir_full, rel.P
    if not ks:
        return C, D, P, zero
    C, D, P = _restrict(C, D, P, np.array(ks).T)
    # feasible points used to clean numerically exposed directions
    rng = np.random.default_rng(1234)
    anchors = []
    for _ in range(2 * n):
        psi, la, lb = sample_strategy(ops, rng)
        for side, x in zero:
            (la if side == 0 else lb)[x] = ops.targets[0][side][x]
        anchors.append(moment_matrix(ops, ml, psi, la, lb))
    am = np.mean(anchors, axis=0)
    w, v = np.linalg.eigh(am)
    R = v[:, w > 1e-9 * w[-1]]
    for _ in range(n):
        Z = _exposing_vector(C, D, P, tol)
        if Z is None:
            break
        w, v = np.linalg.eigh(Z)
        kv = P @ v[:, w > 1e-6 * w[-1]]
        kv = kv - R @ (R.conj().T @ kv)
        u, sv, _ = np.linalg.svd(kv, full_matrices=False)
        kv = u[:, sv > 0.5]
        if kv.shape[1] == 0:
            break
        C, D, P = _restrict(C, D, P, kv)
    return C, D, P, zero


def upper_bound(spec: WitnessSpec, rel: Relaxation, mode: str = ENTANGLED, ideal_witnesses=None,
                tol: float = 1e-8, formulation: str = "auto") -> RelaxationOutcome:
    """Maximise the witness over the relaxed moment space.

    In separable mode every ``(coeffs, group, bound)`` of ``ideal_witnesses``
    adds ``sum c Gamma(rho A~; B~) <= bound``; by default the witness itself
    with its ideal separable bound.
    """
    ops, ml = rel.ops, rel.ml
    if mode not in (ENTANGLED, SEPARABLE):
        raise ValueError(f"unknown mode {mode!r}")
    if ops.labs == "rank-matched":
        worst = max(list(spec.budget.eps_A) + list(spec.budget.eps_B))
        if worst >= 1.0 / ops.d:
            raise ValueError(f"rank-matched lab model needs eps < 1/d (got {worst}); use labs='projective'")
    C, D, P, zero = _face(rel, spec)
    obj = witness_functional(ops, ml, spec.coeffs)
    lin = []  # (functional, rhs, sense)
    for side, eps in ((0, spec.budget.eps_A), (1, spec.budget.eps_B)):
        for x, e in enumerate(eps):
            if (side, x) not in zero:
                lin.append((fidelity_functional(ops, ml, side, x), 1 - e, ">="))
    if mode == SEPARABLE:
        if ideal_witnesses is None:
            ideal_witnesses = [(spec.coeffs, 0, spec.ideal_sep)]
        for coeffs, group, bound in ideal_witnesses:
            lin.append((witness_functional(ops, ml, np.asarray(coeffs), group), bound, "<="))
    r = P.shape[1]
    Cr = _herm(P.conj().T @ C @ P)
    Dr = _herm(np.einsum("ia,kij,jb->kab", P.conj(), D, P)) if len(D) else np.zeros((0, r, r))
    k = len(D)
    auto = formulation == "auto"
    if auto:
        formulation = "lmi" if k <= r * r - k else "primal"
    solvers = {"lmi": lambda: _solve_lmi(C, D, Cr, Dr, obj, lin, tol),
               "primal": lambda: _solve_primal(P, Cr, Dr, obj, lin, tol)}
    out = solvers[formulation]()
    if auto and out.status not in (sdp.OPTIMAL, sdp.INACCURATE):
        other = solvers["primal" if formulation == "lmi" else "lmi"]()
        if other.status in (sdp.OPTIMAL, sdp.INACCURATE):
            log.info("%s formulation returned %s; used %s", formulation, out.status, other.formulation)
            out = other
    out.affine_weights = _affine_weights(rel, out.gamma)
    out.reduced_dim = r
    return out


def _herm(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def _solve_lmi(C, D, Cr, Dr, obj, lin, tol):
    # maximise w0 + w.t  s.t.  Cr + sum t_j Dr_j >= 0,  g0 + G t >= 0
    w0 = obj(C)
    w = np.array([obj(d) for d in D])
    g0 = np.array([(1.0 if sense == ">=" else -1.0) * (f(C) - rhs) for f, rhs, sense in lin])
    Gm = np.array([[(1.0 if sense == ">=" else -1.0) * f(d) for d in D] for f, rhs, sense in lin])
    p = sdp.SdpProblem()
    p.add_block("G", Cr.shape[0], "complex")
    if len(lin):
        p.add_block("s", len(lin), "diag")
        p.add_objective("s", -g0)
    p.add_objective("G", -Cr)
    for j in range(len(D)):
        terms = {"G": Dr[j]}
        if len(lin):
            terms["s"] = Gm[:, j]
        p.add_constraint(terms, "==", -w[j])
    sol = sdp.solve(p, tol=tol)
    t = sol.duals
    gamma = C + np.einsum("k,kij->ij", t, D) if len(D) else C
    ub = w0 + max(-sol.objective_value, -sol.dual_value)
    return RelaxationOutcome(ub, sol.status, None, sol.duality_gap, gamma, "lmi")


def _solve_primal(P, Cr, Dr, obj, lin, tol):
    r = Cr.shape[0]
    Dv = np.array([_hvec(d) for d in Dr]).reshape(len(Dr), r * r)
    if len(Dv):
        u, s, vt = np.linalg.svd(Dv, full_matrices=True)
        N = vt[int(np.sum(s > 1e-10 * s[0])):]
    else:
        N = np.eye(r * r)
    c0 = _hvec(Cr)
    p = sdp.SdpProblem()
    p.add_block("G", r, "complex")
    red = lambda f: P.conj().T @ f.matrix() @ P
    p.add_objective("G", red(obj))
    for nv in N:
        # Re Tr(H G) reads the hvec coordinate when H = hunvec(e_k) with
        # off-diagonal entries halved
        p.add_constraint({"G": _coord_matrix(nv, r)}, "==", float(nv @ c0))
    for f, rhs, sense in lin:
        p.add_constraint({"G": red(f)}, sense, rhs)
    sol = sdp.solve(p, tol=tol)
    gamma = P @ sol.block_values["G"] @ P.conj().T
    ub = max(sol.objective_value, sol.dual_value)
    return RelaxationOutcome(ub, sol.status, None, sol.duality_gap, gamma, "primal")


def _coord_matrix(v, r):
    """Hermitian ``H`` with ``Re Tr(H G) = v . hvec(G)``."""
    iu = np.triu_indices(r)
    off = iu[0] != iu[1]
    k = len(iu[0])
    H = np.zeros((r, r), dtype=complex)
    im = np.zeros(k)
    im[off] = v[k:]
    # Re Tr(H G) = sum_ij H_ji G_ij; an upper entry (i, j) of G pairs with H_ji and H_ij
    vals = np.where(off, v[:k] / math.sqrt(2), v[:k]) - 1j * im / math.sqrt(2)
    H[iu[1], iu[0]] = vals
    H = H + np.tril(H, -1).conj().T
    return H


# ---------------------------------------------------------------------------
# experiments

ANALYTIC = {"pauli2": simplest_qubit_sep_bound, "pauli3": three_pauli_sep_bound}
TARGET_LENGTHS = {"pauli2": 46, "pauli3": 89}


@dataclass
class MomentConfig:
    level: int = 2
    max_samples: int = 20000
    seed: int = 0
    tol: float = 1e-8
    labs: str = "rank-matched"


def relaxation_for(spec: WitnessSpec, cfg: MomentConfig, extra_targets=()) -> Relaxation:
    ops = operator_list(spec, extra_targets, cfg.labs)
    ml = build_monomials(ops, cfg.level)
    basis = build_basis(ops, ml, np.random.default_rng(cfg.seed), cfg.max_samples)
    return prepare(ops, ml, basis)


def fig2_experiment(eps_grid, cfg: MomentConfig = None, witnesses=("pauli2", "pauli3")) -> list:
    """Separable upper bounds with the single ideal-witness constraint."""
    cfg = cfg or MomentConfig()
    rows = []
    for name in witnesses:
        spec = get_spec(name)
        rel = relaxation_for(spec, cfg)
        n = len(rel.ml)
        if name in TARGET_LENGTHS and n != TARGET_LENGTHS[name]:
            log.info("%s: monomial list has %d words (reference length %d)", name, n, TARGET_LENGTHS[name])
        for eps in eps_grid:
            out = upper_bound(spec.with_eps(float(eps)), rel, SEPARABLE, tol=cfg.tol)
            rows.append({
                "witness": name, "eps": float(eps), "level": cfg.level, "mode": SEPARABLE,
                "upper_bound": out.upper_bound, "duality_gap": out.duality_gap,
                "basis_size_m": rel.basis.m, "monomials_n": n, "status": out.status,
                "analytic": ANALYTIC[name](float(eps)).value if name in ANALYTIC else float("nan"),
            })
    return rows

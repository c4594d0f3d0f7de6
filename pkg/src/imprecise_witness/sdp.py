"""A small dense primal-dual interior-point SDP solver.

Problems are stated in a modelling form (:class:`SdpProblem`): maximise a
linear objective over PSD matrix blocks (real symmetric or complex
Hermitian), nonnegative vectors (``diag`` blocks) and free scalars, subject
to affine equalities and inequalities. Inequalities receive slack entries
in an internal ``diag`` block. The compiled standard form is the pair

    (P)  max <C, X> + c_f.f   s.t.  A(X) + F f = b,   X >= 0
    (D)  min b.y              s.t.  A^T(y) - C = Z >= 0,   F^T y = c_f

solved with a Mehrotra predictor-corrector method using the HKM search
direction. Complex blocks are handled natively with the real inner product
``Re Tr(A B)``; :meth:`SdpProblem.to_real` gives the equivalent real
symmetric embedding.
"""
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg as sla

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
MAX_ITERS = "max-iters"
INACCURATE = "inaccurate"  # stalled with every residual within INACCURATE_FACTOR * tol
INACCURATE_FACTOR = 1e3

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITERS = 200

_SLACK = "__slack__"


class SdpError(RuntimeError):
    """Raised for malformed problems."""


@dataclass(frozen=True)
class Block:
    name: str
    dim: int
    kind: str  # "real", "complex" or "diag"


@dataclass
class Constraint:
    terms: dict
    free: dict
    sense: str
    rhs: float


class SdpProblem:
    """Modelling front end: blocks, free scalars, objective and constraints.

    Coefficients on a ``complex`` block are Hermitian matrices ``H`` acting as
    ``Re Tr(H X)``; on a ``real`` block real symmetric matrices; on a ``diag``
    block plain vectors.
    """

    def __init__(self):
        self.blocks: list = []
        self.n_free = 0
        self.objective: dict = {}
        self.objective_free: dict = {}
        self.constraints: list = []
        self._index = {}

    # -- construction ------------------------------------------------------
    def add_block(self, name: str, dim: int, kind: str = "complex") -> str:
        if kind not in ("real", "complex", "diag"):
            raise SdpError(f"unknown block kind {kind!r}")
        if name in self._index or name == _SLACK:
            raise SdpError(f"duplicate block name {name!r}")
        if dim < 1:
            raise SdpError("block dimension must be positive")
        self._index[name] = len(self.blocks)
        self.blocks.append(Block(name, int(dim), kind))
        return name

    def add_free(self, count: int = 1) -> range:
        start = self.n_free
        self.n_free += count
        return range(start, self.n_free)

    def block(self, name) -> Block:
        try:
            return self.blocks[self._index[name]]
        except KeyError:
            raise SdpError(f"unknown block {name!r}") from None

    def _coef(self, name, coef):
        blk = self.block(name)
        if blk.kind == "diag":
            c = np.asarray(coef, dtype=float).reshape(-1)
            if c.shape != (blk.dim,):
                raise SdpError(f"coefficient for diag block {name!r} must have length {blk.dim}")
            return c
        c = np.asarray(coef, dtype=complex if blk.kind == "complex" else float)
        if c.shape != (blk.dim, blk.dim):
            raise SdpError(f"coefficient for block {name!r} must be {blk.dim}x{blk.dim}, got {c.shape}")
        if not np.allclose(c, c.conj().T, atol=1e-12 * max(1.0, np.abs(c).max())):
            raise SdpError(f"coefficient matrix for block {name!r} is not Hermitian")
        return 0.5 * (c + c.conj().T)

    def _free(self, free):
        if free is None:
            return {}
        if not isinstance(free, dict):
            free = {i: v for i, v in enumerate(np.asarray(free, dtype=float)) if v != 0}
        for i in free:
            if not 0 <= i < self.n_free:
                raise SdpError(f"free variable index {i} out of range")
        return {int(i): float(v) for i, v in free.items()}

    def add_objective(self, name: str, coef):
        c = self._coef(name, coef)
        self.objective[name] = self.objective.get(name, 0) + c

    def add_objective_free(self, coefs):
        for i, v in self._free(coefs).items():
            self.objective_free[i] = self.objective_free.get(i, 0.0) + v

    def add_constraint(self, terms: dict, sense: str, rhs: float, free=None) -> int:
        if sense not in ("==", "<=", ">="):
            raise SdpError(f"unknown constraint sense {sense!r}")
        t = {name: self._coef(name, c) for name, c in terms.items()}
        self.constraints.append(Constraint(t, self._free(free), sense, float(rhs)))
        return len(self.constraints) - 1

    # -- transforms --------------------------------------------------------
    def to_real(self) -> "SdpProblem":
        """Equivalent problem with complex blocks in the real embedding
        ``[[Re, -Im], [Im, Re]]`` of twice the dimension."""
        out = SdpProblem()
        out.n_free = self.n_free
        for b in self.blocks:
            out.add_block(b.name, 2 * b.dim if b.kind == "complex" else b.dim,
                          "real" if b.kind == "complex" else b.kind)

        def conv(name, c):
            return embed_real(c) / 2 if self.block(name).kind == "complex" else c

        for name, c in self.objective.items():
            out.objective[name] = conv(name, c)
        out.objective_free = dict(self.objective_free)
        for con in self.constraints:
            out.constraints.append(Constraint({n: conv(n, c) for n, c in con.terms.items()},
                                              dict(con.free), con.sense, con.rhs))
        return out

    def compile(self) -> "StandardForm":
        return StandardForm.from_problem(self)

    # -- serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        def trip(name, c):
            blk = self.block(name)
            if blk.kind == "diag":
                idx = np.nonzero(c)[0]
                return [[int(i), int(i), float(c[i]), 0.0] for i in idx]
            c = np.asarray(c)
            i, j = np.nonzero(np.triu(np.abs(c) > 0))
            return [[int(a), int(b), float(c[a, b].real), float(np.imag(c[a, b]))] for a, b in zip(i, j)]

        return {
            "format": "imprecise-witness-sdp/1",
            "sense": "maximize",
            "blocks": [{"name": b.name, "dim": b.dim, "kind": b.kind} for b in self.blocks],
            "free_vars": self.n_free,
            "objective": {"blocks": {n: trip(n, c) for n, c in self.objective.items()},
                          "free": {str(i): v for i, v in self.objective_free.items()}},
            "constraints": [{"blocks": {n: trip(n, c) for n, c in con.terms.items()},
                             "free": {str(i): v for i, v in con.free.items()},
                             "sense": con.sense, "rhs": con.rhs} for con in self.constraints],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SdpProblem":
        p = cls()
        for b in data["blocks"]:
            p.add_block(b["name"], b["dim"], b["kind"])
        p.n_free = int(data.get("free_vars", 0))

        def untrip(name, trips):
            blk = p.block(name)
            if blk.kind == "diag":
                c = np.zeros(blk.dim)
                for i, _, re, _ in trips:
                    c[i] += re
                return c
            c = np.zeros((blk.dim, blk.dim), dtype=complex)
            for i, j, re, im in trips:
                c[i, j] = re + 1j * im
                c[j, i] = re - 1j * im
            return c if blk.kind == "complex" else c.real

        for n, t in data["objective"]["blocks"].items():
            p.add_objective(n, untrip(n, t))
        p.add_objective_free({int(i): v for i, v in data["objective"].get("free", {}).items()})
        for con in data["constraints"]:
            p.add_constraint({n: untrip(n, t) for n, t in con["blocks"].items()}, con["sense"],
                             con["rhs"], {int(i): v for i, v in con.get("free", {}).items()})
        return p

    @classmethod
    def loads(cls, text: str) -> "SdpProblem":
        return cls.from_dict(json.loads(text))


def embed_real(h) -> np.ndarray:
    h = np.asarray(h)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def unembed_real(x) -> np.ndarray:
    n = x.shape[0] // 2
    return 0.5 * (x[:n, :n] + x[n:, n:]) + 0.5j * (x[n:, :n] - x[:n, n:])


# ---------------------------------------------------------------------------
# standard form

@dataclass
class _Group:
    """Stack of same-size PSD blocks."""

    n: int
    dtype: type
    names: list
    A: np.ndarray  # (m, nb, n, n)
    C: np.ndarray  # (nb, n, n)


@dataclass
class StandardForm:
    groups: list
    lp_names: list      # (block name or _SLACK, offset, length)
    A_lp: np.ndarray    # (m, k)
    c_lp: np.ndarray    # (k,)
    F: np.ndarray       # (m, p)
    c_f: np.ndarray     # (p,)
    b: np.ndarray       # (m,)
    problem: Optional[SdpProblem] = field(default=None, repr=False)

    @property
    def m(self):
        return self.b.shape[0]

    @classmethod
    def from_problem(cls, p: SdpProblem) -> "StandardForm":
        m = len(p.constraints)
        n_ineq = sum(c.sense != "==" for c in p.constraints)
        # psd groups keyed by (kind, dim)
        keys = []
        members = {}
        for b in p.blocks:
            if b.kind == "diag":
                continue
            key = (b.kind, b.dim)
            if key not in members:
                keys.append(key)
                members[key] = []
            members[key].append(b.name)
        groups = []
        pos = {}
        for key in keys:
            kind, n = key
            dt = complex if kind == "complex" else float
            names = members[key]
            A = np.zeros((m, len(names), n, n), dtype=dt)
            C = np.zeros((len(names), n, n), dtype=dt)
            for j, name in enumerate(names):
                pos[name] = (len(groups), j)
                if name in p.objective:
                    C[j] = p.objective[name]
            groups.append(_Group(n, dt, names, A, C))
        lp_names = []
        off = 0
        for b in p.blocks:
            if b.kind == "diag":
                lp_names.append((b.name, off, b.dim))
                off += b.dim
        if n_ineq:
            lp_names.append((_SLACK, off, n_ineq))
        k = off + n_ineq
        lp_off = {name: o for name, o, _ in lp_names}
        A_lp = np.zeros((m, k))
        c_lp = np.zeros(k)
        for name, o, ln in lp_names:
            if name in p.objective:
                c_lp[o:o + ln] = p.objective[name]
        F = np.zeros((m, p.n_free))
        c_f = np.zeros(p.n_free)
        for i, v in p.objective_free.items():
            c_f[i] = v
        b = np.zeros(m)
        s = 0
        for i, con in enumerate(p.constraints):
            for name, c in con.terms.items():
                if name in pos:
                    g, j = pos[name]
                    groups[g].A[i, j] = c
                else:
                    o = lp_off[name]
                    A_lp[i, o:o + len(c)] = c
            for j, v in con.free.items():
                F[i, j] = v
            if con.sense != "==":
                A_lp[i, off + s] = 1.0 if con.sense == "<=" else -1.0
                s += 1
            b[i] = con.rhs
        return cls(groups, lp_names, A_lp, c_lp, F, c_f, b, p)

    def with_objective(self, objective: dict, objective_free=None) -> "StandardForm":
        """Copy with a new objective; constraint data is shared."""
        groups = []
        lookup = {}
        for g in self.groups:
            C = np.zeros_like(g.C)
            for j, name in enumerate(g.names):
                if name in objective:
                    C[j] = objective[name]
            groups.append(replace(g, C=C))
        c_lp = np.zeros_like(self.c_lp)
        for name, o, ln in self.lp_names:
            if name in objective:
                c_lp[o:o + ln] = objective[name]
        c_f = np.zeros_like(self.c_f)
        for i, v in (objective_free or {}).items():
            c_f[i] = v
        del lookup
        return replace(self, groups=groups, c_lp=c_lp, c_f=c_f)

    # -- linear maps -------------------------------------------------------
    def _flat(self, g, W):
        w = np.ascontiguousarray(W).reshape(-1)
        return w.view(float) if g.dtype is complex else w

    def _aflat(self, g):
        a = np.ascontiguousarray(g.A).reshape(self.m, -1)
        return a.view(float) if g.dtype is complex else a

    def op_A(self, Xs, x_lp, f=None):
        out = self.A_lp @ x_lp
        for g, X in zip(self.groups, Xs):
            out = out + self._aflat(g) @ self._flat(g, X)
        if f is not None and self.F.shape[1]:
            out = out + self.F @ f
        return out

    def aat_pinv(self) -> np.ndarray:
        """Pseudo-inverse of ``A A^T`` over the cone variables (cached)."""
        if getattr(self, "_aat_pinv", None) is None:
            M = self.A_lp @ self.A_lp.T
            for g in self.groups:
                a = self._aflat(g)
                M = M + a @ a.T
            object.__setattr__(self, "_aat_pinv", np.linalg.pinv(0.5 * (M + M.T), rcond=1e-12, hermitian=True))
        return self._aat_pinv

    def op_AT(self, y):
        mats = [np.tensordot(y, g.A, axes=1) for g in self.groups]
        return mats, self.A_lp.T @ y


@dataclass
class SdpSolution:
    status: str
    objective_value: float
    dual_value: float
    duality_gap: float
    rel_gap: float
    primal_infeasibility: float
    dual_infeasibility: float
    iterations: int
    block_values: dict
    free_values: np.ndarray
    duals: np.ndarray
    dual_slacks: dict
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def usable(self) -> bool:
        return self.status in (OPTIMAL, INACCURATE)


# ---------------------------------------------------------------------------
# interior point method

def _herm(W):
    return 0.5 * (W + np.swapaxes(W, -1, -2).conj())


def _max_step(X, dX):
    """Largest alpha with X + alpha dX PSD (inf if unrestricted)."""
    try:
        L = np.linalg.cholesky(X)
        T = np.linalg.solve(L, dX)
        W = np.linalg.solve(L, np.swapaxes(T, -1, -2).conj())
        lam = np.linalg.eigvalsh(_herm(W)).min()
    except np.linalg.LinAlgError:
        lam = min(sla.eigh(_herm(d), _herm(x), eigvals_only=True).min() for x, d in zip(X, dX))
    return math.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x, dx):
    neg = dx < 0
    if not np.any(neg):
        return math.inf
    return float(np.min(-x[neg] / dx[neg]))


class _Kkt:
    """Factorised Schur complement with free-variable augmentation."""

    def __init__(self, M, F):
        n = M.shape[0]
        self.M = M
        self.F = F
        scale = max(1.0, float(np.abs(np.diag(M)).max())) if n else 1.0
        self.chol = None
        try:
            self.chol = sla.cho_factor(M, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            reg = M + 1e-13 * scale * np.eye(n)
            try:
                self.chol = sla.cho_factor(reg, check_finite=False)
            except (np.linalg.LinAlgError, sla.LinAlgError):
                self.lu = sla.lu_factor(reg, check_finite=False)
        if F.shape[1]:
            MF = self._msolve(F)
            S = F.T @ MF
            self.MF = MF
            self.S = sla.lu_factor(S, check_finite=False)

    def _msolve(self, r):
        if self.chol is not None:
            return sla.cho_solve(self.chol, r, check_finite=False)
        return sla.lu_solve(self.lu, r, check_finite=False)

    def _solve_once(self, r1, rf):
        if not self.F.shape[1]:
            return self._msolve(r1), np.zeros(0)
        Mr = self._msolve(r1)
        df = sla.lu_solve(self.S, rf - self.F.T @ Mr, check_finite=False)
        return Mr + self.MF @ df, df

    def solve(self, r1, rf, refine=2):
        # solves M dy - F df = r1, F^T dy = rf with iterative refinement
        dy, df = self._solve_once(r1, rf)
        for _ in range(refine):
            e1 = r1 - (self.M @ dy - self.F @ df)
            e2 = rf - self.F.T @ dy
            cy, cf = self._solve_once(e1, e2)
            dy, df = dy + cy, df + cf
        return dy, df


def _init_point(S: StandardForm):
    bnorm = np.abs(S.b)
    Xs, Zs = [], []
    for g in S.groups:
        n = g.n
        norms = np.sqrt(np.einsum("mbij,mbij->m", g.A.conj(), g.A).real)
        cn = float(np.sqrt(np.sum(np.abs(g.C) ** 2)))
        xi = max(10.0, math.sqrt(n), n * float(np.max((1 + bnorm) / (1 + norms))) if S.m else 10.0)
        eta = max(10.0, math.sqrt(n), float(norms.max()) if S.m else 0.0, cn)
        eye = np.broadcast_to(np.eye(n, dtype=g.dtype), (len(g.names), n, n))
        Xs.append(xi * eye.copy())
        Zs.append(eta * eye.copy())
    k = S.A_lp.shape[1]
    if k:
        norms = np.linalg.norm(S.A_lp, axis=1)
        xi = max(10.0, math.sqrt(k), k * float(np.max((1 + bnorm) / (1 + norms))))
        eta = max(10.0, math.sqrt(k), float(norms.max()), float(np.linalg.norm(S.c_lp)))
    else:
        xi = eta = 1.0
    return Xs, np.full(k, xi), Zs, np.full(k, eta)


def solve(problem, tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS) -> SdpSolution:
    """Solve an :class:`SdpProblem` (or a compiled :class:`StandardForm`)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    S = problem if isinstance(problem, StandardForm) else problem.compile()
    m, p = S.m, S.F.shape[1]
    Xs, x, Zs, z = _init_point(S)
    y = np.zeros(m)
    f = np.zeros(p)
    N = sum(len(g.names) * g.n for g in S.groups) + len(x)
    bn = 1 + np.linalg.norm(S.b)
    cn = 1 + math.sqrt(sum(float(np.sum(np.abs(g.C) ** 2)) for g in S.groups)
                       + float(S.c_lp @ S.c_lp) + float(S.c_f @ S.c_f))
    status, msg = MAX_ITERS, "iteration limit reached"
    tau = 0.9
    stall = 0
    best = None
    it = 0
    for it in range(max_iters + 1):
        AX = S.op_A(Xs, x, f)
        rp = S.b - AX
        ATy, ATy_lp = S.op_AT(y)
        Rd = [a - g.C - Z for a, g, Z in zip(ATy, S.groups, Zs)]
        rd = ATy_lp - S.c_lp - z
        rf = S.c_f - S.F.T @ y
        pobj = (sum(float(np.vdot(g.C, X).real) for g, X in zip(S.groups, Xs))
                + float(S.c_lp @ x) + float(S.c_f @ f))
        dobj = float(S.b @ y)
        gap = sum(float(np.vdot(X, Z).real) for X, Z in zip(Xs, Zs)) + float(x @ z)
        mu = gap / N if N else 0.0
        pinf = float(np.linalg.norm(rp)) / bn
        dinf = math.sqrt(sum(float(np.sum(np.abs(R) ** 2)) for R in Rd)
                         + float(rd @ rd) + float(rf @ rf)) / cn
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        merit = max(pinf, dinf, relgap)
        if best is None or merit < best[0]:
            best = (merit, it, [X.copy() for X in Xs], x.copy(), f.copy(), y.copy(),
                    [Z.copy() for Z in Zs], z.copy(), pobj, dobj, pinf, dinf, relgap)
        if pinf <= tol and dinf <= tol and relgap <= tol:
            status, msg = OPTIMAL, "converged"
            break
        # infeasibility certificates
        if dobj < 0 and it > 5:
            cr = math.sqrt(sum(float(np.sum(np.abs(a - Z) ** 2)) for a, Z in zip(ATy, Zs))
                           + float(np.sum((ATy_lp - z) ** 2)) + float(np.sum((S.F.T @ y) ** 2)))
            if cr / -dobj < tol and -dobj > 1 / tol:
                status, msg = INFEASIBLE, "dual ray certifies primal infeasibility"
                break
        if pobj > 0 and it > 5:
            if np.linalg.norm(AX) / pobj < tol and pobj > 1 / tol:
                status, msg = UNBOUNDED, "primal ray certifies unboundedness"
                break
        if it == max_iters:
            break
        # merit can rise for a while when far from feasibility; only stop early
        # once the best iterate is already near the accuracy floor
        patience = 10 if best[0] <= INACCURATE_FACTOR * tol else 50
        if stall >= 5 or it - best[1] > patience:
            msg = "stalled: no progress"
            break

        try:
            Zinv = [np.linalg.inv(Z) for Z in Zs]
            M = (S.A_lp * (x / z)) @ S.A_lp.T
            for g, X, Zi in zip(S.groups, Xs, Zinv):
                T = np.matmul(np.matmul(X[None], g.A), Zi[None])
                T = np.ascontiguousarray(T).reshape(m, -1)
                M += S._aflat(g) @ (T.view(float) if g.dtype is complex else T).T
            M = 0.5 * (M + M.T)
            kkt = _Kkt(M, S.F)

            def direction(Rc, rc):
                # Rc: per block complementarity target (None for predictor)
                G = []
                for X, Zi, R in zip(Xs, Zinv, Rd):
                    base = -(X @ R)
                    if Rc is not None:
                        base = base + Rc.pop(0)
                    G.append(base @ Zi)
                gl = (rc - x * rd) / z
                # A((Rc - X Rd) Z^-1) - b + F f
                r1 = S.op_A(G, gl) - S.b + (S.F @ f if p else 0)
                dy, df = kkt.solve(r1, rf)
                dZ_mats, dz_lp = S.op_AT(dy)
                dZ = [a + R for a, R in zip(dZ_mats, Rd)]
                dz = dz_lp + rd
                dX = [_herm(Gm - X @ dZm @ Zi - X) for Gm, X, dZm, Zi in zip(G, Xs, dZ, Zinv)]
                dx = gl - x * dz / z - x
                # X dZ Z^-1 loses accuracy when Z is ill-conditioned; restore
                # the linearised primal equations by a least-norm correction
                res = rp - S.op_A(dX, dx, df)
                cm, cl = S.op_AT(S.aat_pinv() @ res)
                dX = [_herm(d + c) for d, c in zip(dX, cm)]
                dx = dx + cl
                return dX, dx, dy, df, dZ, dz

            def steps(dX, dx, dZ, dz):
                ap = min([_max_step(X, d) for X, d in zip(Xs, dX)] + [_max_step_lp(x, dx)])
                ad = min([_max_step(Z, d) for Z, d in zip(Zs, dZ)] + [_max_step_lp(z, dz)])
                return ap, ad

            dX, dx, dy, df, dZ, dz = direction(None, np.zeros_like(x))
            ap, ad = steps(dX, dx, dZ, dz)
            ap, ad = min(1.0, ap), min(1.0, ad)
            gap_aff = (sum(float(np.vdot(X + ap * a, Z + ad * b).real)
                           for X, a, Z, b in zip(Xs, dX, Zs, dZ))
                       + float((x + ap * dx) @ (z + ad * dz)))
            sigma = min(1.0, max(0.0, (gap_aff / gap) ** 3)) if gap > 0 else 0.0
            # stay near the central path when far from feasibility
            if max(pinf, dinf) > 1e3 * relgap:
                sigma = max(sigma, 0.1 * min(1.0, max(pinf, dinf)))
            Rc = [sigma * mu * np.eye(X.shape[-1]) - a @ b for X, a, b in zip(Xs, dX, dZ)]
            rc = sigma * mu - dx * dz
            dX, dx, dy, df, dZ, dz = direction(Rc, rc)
            ap, ad = steps(dX, dx, dZ, dz)
            ap, ad = min(1.0, tau * ap), min(1.0, tau * ad)
            Xs = [X + ap * d for X, d in zip(Xs, dX)]
            x = x + ap * dx
            f = f + ap * df
            y = y + ad * dy
            Zs = [Z + ad * d for Z, d in zip(Zs, dZ)]
            z = z + ad * dz
            tau = 0.9 + 0.09 * min(ap, ad)
            stall = stall + 1 if max(ap, ad) < 1e-8 else 0
        except (np.linalg.LinAlgError, sla.LinAlgError, ValueError, FloatingPointError):
            msg = "numerical breakdown"
            break

    if status != OPTIMAL and best is not None:
        _, _, Xs, x, f, y, Zs, z, pobj, dobj, pinf, dinf, relgap = best
        if status == MAX_ITERS and max(pinf, dinf, relgap) <= INACCURATE_FACTOR * tol:
            status = INACCURATE
    return _package(S, status, msg, it, Xs, x, f, y, Zs, z, pobj, dobj, pinf, dinf, relgap)


def _package(S, status, msg, it, Xs, x, f, y, Zs, z, pobj, dobj, pinf, dinf, relgap):
    values, slacks = {}, {}
    for g, X, Z in zip(S.groups, Xs, Zs):
        for j, name in enumerate(g.names):
            values[name] = _herm(X[j])
            slacks[name] = _herm(Z[j])
    for name, o, ln in S.lp_names:
        values[name] = x[o:o + ln].copy()
        slacks[name] = z[o:o + ln].copy()
    return SdpSolution(status, pobj, dobj, dobj - pobj, relgap, pinf, dinf, it,
                       values, f.copy(), y.copy(), slacks, msg)

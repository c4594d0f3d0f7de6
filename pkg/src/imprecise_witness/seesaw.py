"""Alternating convex search for lower bounds on witness values.

One round optimises Alice's measurements by SDP (Bob and the state fixed),
then Bob's, then the state: the top eigenvector of the Bell operator for
entangled states, or an alternating eigenvector search for product states.
Every step can only increase the value, so the sequence is monotone and
each iterate is an explicit strategy, hence a valid lower bound.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .fidelity import measurement_fidelity
from .linalg import Measurement, partial_contract, random_povm, random_pure_state, repair_povm
from .witness import WitnessSpec, bell_operator, born, evaluate

ENTANGLED = "entangled"
SEPARABLE = "separable"


class SeesawError(RuntimeError):
    pass


@dataclass
class SeesawConfig:
    restarts: int = 20
    max_outer_iters: int = 200
    convergence_tol: float = 1e-7
    inner_state_iters: int = 50
    seed: int = 0
    sdp_tol: float = 1e-8
    n_jobs: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_outer_iters < 1 or self.inner_state_iters < 1:
            raise ValueError("restarts and iteration counts must be >= 1")
        if self.convergence_tol <= 0 or self.sdp_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class SeesawResult:
    bound: float
    best_state: np.ndarray
    best_meas_A: list
    best_meas_B: list
    per_restart_values: list
    converged: bool
    restarts_converged: int = 0
    history: list = field(default_factory=list, repr=False)
    failures: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# measurement step

def _herm_basis(d):
    """Real basis of Hermitian d x d matrices with ``Re Tr(H X)`` reading entries."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1
            out.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j
            e[j, i] = 1j
            out.append(e)
    return out


_TEMPLATES = {}


def _template(targets: np.ndarray, eps):
    """Compiled constraint set for one party: POVMs with fidelity budgets."""
    key = (targets.tobytes(), targets.shape, tuple(eps))
    hit = _TEMPLATES.get(key)
    if hit is not None:
        return hit
    nx, o, d, _ = targets.shape
    p = sdp.SdpProblem()
    names = [[p.add_block(f"E{x}_{a}", d, "complex") for a in range(o)] for x in range(nx)]
    hb = _herm_basis(d)
    eye = np.eye(d)
    for x in range(nx):
        for h in hb:
            p.add_constraint({names[x][a]: h for a in range(o)}, "==", float(np.trace(h @ eye).real))
        p.add_constraint({names[x][a]: targets[x, a] / d for a in range(o)}, ">=", 1 - eps[x])
    form = p.compile()
    if len(_TEMPLATES) > 256:
        _TEMPLATES.clear()
    _TEMPLATES[key] = (form, names)
    return form, names


def _local_operators(spec, side, fixed, rho):
    """``K[x, a]`` with ``Tr(A_{a|x} K[x, a])`` the contribution to the witness."""
    d = spec.d
    r = np.asarray(rho).reshape(d, d, d, d)
    f = np.asarray(fixed)
    if side == 0:
        # K[x,a][j,i] = sum_{y,b} c[x,y,a,b] sum_kl B[y,b][k,l] rho[j,l,i,k]
        red = np.einsum("ybkl,jlik->ybji", f, r)
        return np.einsum("xyab,ybji->xaji", spec.coeffs, red)
    red = np.einsum("xaij,jlik->xalk", f, r)
    return np.einsum("xyab,xalk->yblk", spec.coeffs, red)


def _project_fidelity(effects, targets, eps):
    """Mix each setting toward its target until the fidelity budget holds exactly."""
    out = np.array(effects)
    d = targets.shape[-1]
    for x in range(len(out)):
        f = float(np.einsum("aij,aji->", out[x], targets[x]).real) / d
        need = 1 - eps[x]
        if f < need:
            t = (need - f) / (1 - f)
            out[x] = (1 - t) * out[x] + t * targets[x]
    return out


def _side_value(K, effects):
    return float(np.einsum("xaij,xaji->", effects, K).real)


def optimize_side(spec: WitnessSpec, side: int, fixed, rho, current=None, tol=1e-8):
    """Best measurements for one party with the other party and state fixed.

    Returns an array of effects of shape ``(settings, o, d, d)``. When
    ``current`` is given and the SDP result scores lower (round-off), the
    current measurements are returned instead.
    """
    targets = spec.target_effects(side)
    eps = spec.budget.eps_A if side == 0 else spec.budget.eps_B
    K = _local_operators(spec, side, fixed, rho)
    if all(e == 0 for e in eps):
        return targets.copy()
    form, names = _template(targets, eps)
    obj = {names[x][a]: K[x, a] for x in range(len(names)) for a in range(len(names[x]))}
    sol = sdp.solve(form.with_objective(obj), tol=tol)
    if sol.status not in (sdp.OPTIMAL, sdp.INACCURATE, sdp.MAX_ITERS):
        raise SeesawError(f"measurement SDP returned {sol.status}: {sol.message}")
    new = np.array([[sol.block_values[n] for n in row] for row in names])
    new = np.array([repair_povm(e) for e in new])
    new = _project_fidelity(new, targets, eps)
    if current is not None:
        cur = np.asarray(current)
        if _side_value(K, new) < _side_value(K, cur):
            return cur.copy()
    return new


def optimize_side_A(spec, fixed_B, rho, current=None, tol=1e-8):
    return optimize_side(spec, 0, _as_effects(fixed_B), rho, current, tol)


def optimize_side_B(spec, fixed_A, rho, current=None, tol=1e-8):
    return optimize_side(spec, 1, _as_effects(fixed_A), rho, current, tol)


def _as_effects(meas):
    return np.array([m.effects if isinstance(m, Measurement) else np.asarray(m) for m in meas])


# ---------------------------------------------------------------------------
# state step

def optimal_global_state(bell_op) -> np.ndarray:
    """Rank-one state on the top eigenvector (deterministic eigh ordering)."""
    w, v = np.linalg.eigh(0.5 * (bell_op + np.asarray(bell_op).conj().T))
    psi = v[:, -1]
    return np.outer(psi, psi.conj())


def optimal_product_state(bell_op, start, iters: int = 50, dims=None, tol=1e-12):
    """Alternating top-eigenvector search over product states.

    ``start`` is a pair ``(phi, psi)``. Returns ``(phi, psi, values)`` with
    the value after every half-step.
    """
    phi, psi = (np.asarray(v, dtype=complex) for v in start)
    dims = dims or (phi.size, psi.size)
    op = 0.5 * (bell_op + np.asarray(bell_op).conj().T)
    values = [float(np.vdot(np.kron(phi, psi), op @ np.kron(phi, psi)).real)]
    for _ in range(iters):
        w, v = np.linalg.eigh(partial_contract(op, phi, 0, dims))
        psi = v[:, -1]
        w, v = np.linalg.eigh(partial_contract(op, psi, 1, dims))
        phi = v[:, -1]
        values.append(float(w[-1]))
        if values[-1] - values[-2] < tol:
            break
    return phi, psi, values


def optimal_local_state_sdp(h, tol=1e-10) -> float:
    """``max Tr(sigma h)`` over density matrices, by SDP (cross-check of eigh)."""
    h = np.asarray(h, dtype=complex)
    p = sdp.SdpProblem()
    p.add_block("s", h.shape[0], "complex")
    p.add_objective("s", h)
    p.add_constraint({"s": np.eye(h.shape[0])}, "==", 1.0)
    return sdp.solve(p, tol=tol).objective_value


# ---------------------------------------------------------------------------
# driver

def _initial_effects(spec, side, rng):
    targets = spec.target_effects(side)
    eps = spec.budget.eps_A if side == 0 else spec.budget.eps_B
    n, o, d, _ = targets.shape
    e = np.array([random_povm(d, o, rng).effects for _ in range(n)])
    return _project_fidelity(e, targets, eps)


def _value(spec, rho, ea, eb):
    return evaluate(spec, born(rho, ea, eb))


def _run_restart(spec, mode, cfg, rng, start=None):
    d = spec.d
    if start is None:
        eb = _initial_effects(spec, 1, rng)
        ea = _initial_effects(spec, 0, rng)
        if mode == ENTANGLED:
            psi = random_pure_state(d * d, rng)
        else:
            phi, chi = random_pure_state(d, rng), random_pure_state(d, rng)
            psi = np.kron(phi, chi)
    else:
        psi, ea, eb = start
        ea = _project_fidelity(ea, spec.target_effects(0), spec.budget.eps_A)
        eb = _project_fidelity(eb, spec.target_effects(1), spec.budget.eps_B)
        if mode == SEPARABLE:
            phi, chi = _split_product(psi, d)
    rho = np.outer(psi, psi.conj())
    history = []
    first = True
    converged = False
    for _ in range(cfg.max_outer_iters):
        ea = optimize_side(spec, 0, eb, rho, None if first else ea, cfg.sdp_tol)
        eb = optimize_side(spec, 1, ea, rho, None if first else eb, cfg.sdp_tol)
        first = False
        op = bell_operator(spec, ea, eb)
        if mode == ENTANGLED:
            cand = optimal_global_state(op)
        else:
            p2, c2, _ = optimal_product_state(op, (phi, chi), cfg.inner_state_iters)
            cand = np.outer(np.kron(p2, c2), np.kron(p2, c2).conj())
        if np.trace(cand @ op).real >= np.trace(rho @ op).real:
            rho = cand
            if mode == SEPARABLE:
                phi, chi = p2, c2
        history.append(_value(spec, rho, ea, eb))
        if len(history) > 1 and history[-1] - history[-2] < cfg.convergence_tol:
            converged = True
            break
    w, v = np.linalg.eigh(rho)
    psi = v[:, -1]
    return history, psi, ea, eb, converged


def _split_product(psi, d):
    u, s, vh = np.linalg.svd(np.asarray(psi).reshape(d, d))
    return u[:, 0] * math.sqrt(s[0]), vh[0] / math.sqrt(s[0]) * 1.0


def _certify(spec, psi, ea, eb, tol=1e-7):
    """Re-evaluate a strategy and check its fidelity budget."""
    rho = np.outer(psi, psi.conj())
    for side, eff, eps in ((0, ea, spec.budget.eps_A), (1, eb, spec.budget.eps_B)):
        t = spec.targets_A if side == 0 else spec.targets_B
        for x in range(len(eff)):
            m = Measurement(eff[x])
            if not m.is_povm(1e-8):
                return None
            if measurement_fidelity(m, t[x]) < 1 - eps[x] - tol:
                return None
    return _value(spec, rho, ea, eb)


def _restart_task(args):
    spec, mode, cfg, seed_seq, start = args
    rng = np.random.default_rng(seed_seq)
    try:
        hist, psi, ea, eb, conv = _run_restart(spec, mode, cfg, rng, start)
    except (SeesawError, np.linalg.LinAlgError) as exc:
        return None, str(exc)
    return (hist, psi, ea, eb, conv), None


def seesaw_lower_bound(spec: WitnessSpec, mode: str = SEPARABLE, cfg: SeesawConfig = None,
                       starts=None) -> SeesawResult:
    """Best lower bound over random restarts (plus optional warm starts).

    ``starts`` is a list of ``(psi, effects_A, effects_B)`` strategies used as
    extra restarts, e.g. the optimiser of a smaller budget.
    """
    if mode not in (ENTANGLED, SEPARABLE):
        raise ValueError(f"unknown mode {mode!r}")
    cfg = cfg or SeesawConfig()
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    tasks = [(spec, mode, cfg, s, None) for s in seeds]
    tasks += [(spec, mode, cfg, np.random.SeedSequence(0), st) for st in (starts or [])]
    if cfg.n_jobs > 1:
        with ProcessPoolExecutor(cfg.n_jobs) as ex:
            outs = list(ex.map(_restart_task, tasks))
    else:
        outs = [_restart_task(t) for t in tasks]
    best = None
    values, failures, hist_all = [], [], []
    n_conv = 0
    for i, (out, err) in enumerate(outs):
        if out is None:
            failures.append((i, err))
            values.append(float("nan"))
            continue
        hist, psi, ea, eb, conv = out
        val = _certify(spec, psi, ea, eb)
        if val is None:
            failures.append((i, "strategy failed certification"))
            values.append(float("nan"))
            continue
        values.append(val)
        hist_all.append(hist)
        n_conv += bool(conv)
        if best is None or val > best[0]:
            best = (val, psi, ea, eb)
    if best is None:
        raise SeesawError(f"all restarts failed: {failures}")
    val, psi, ea, eb = best
    return SeesawResult(val, np.outer(psi, psi.conj()), [Measurement(e) for e in ea],
                        [Measurement(e) for e in eb], values, n_conv == len(hist_all), n_conv,
                        hist_all, failures)


def seesaw_curve(spec: WitnessSpec, eps_list, mode=SEPARABLE, cfg: SeesawConfig = None) -> list:
    """Seesaw bounds on an increasing budget grid with continuation.

    Each grid point also restarts from the previous point's optimiser, which
    stays feasible because the budget only grows; reported bounds are then
    nondecreasing in eps.
    """
    cfg = cfg or SeesawConfig()
    order = np.argsort(eps_list, kind="stable")
    out = [None] * len(eps_list)
    prev = None
    for i in order:
        s = spec.with_eps(float(eps_list[i]))
        starts = [prev] if prev is not None else None
        res = seesaw_lower_bound(s, mode, cfg, starts)
        w, v = np.linalg.eigh(res.best_state)
        prev = (v[:, -1], np.array([m.effects for m in res.best_meas_A]),
                np.array([m.effects for m in res.best_meas_B]))
        out[i] = res
    return out

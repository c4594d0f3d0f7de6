"""Command-line front end.

Every command writes a CSV (to ``--out`` or stdout) whose first line is a
comment carrying the package version, the seed and a hash of the
configuration. Exit codes: 0 success, 2 configuration error, 3 solver or
runtime failure (partial results are still written, marked as partial).
"""
import argparse
import csv
import hashlib
import io
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import analytic as an
from .fidelity import measurement_fidelity, min_epsilon
from .fileio import atomic_write
from .linalg import Measurement
from .witness import get_spec

log = logging.getLogger("imprecise_witness")

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 2, 3
THREADS_ENV = "IMPRECISE_WITNESS_JOBS"


class ConfigError(ValueError):
    pass


class PartialFailure(RuntimeError):
    def __init__(self, message, rows):
        super().__init__(message)
        self.rows = rows


# ---------------------------------------------------------------------------
# parsing helpers

def parse_grid(text) -> list:
    """``start:stop:step`` (inclusive stop) or a comma list of floats/ranges."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            bits = part.split(":")
            if len(bits) != 3:
                raise ConfigError(f"range {part!r} must be start:stop:step")
            start, stop, step = (float(b) for b in bits)
            if step <= 0 or stop < start:
                raise ConfigError(f"range {part!r} must have step > 0 and stop >= start")
            k = int(math.floor((stop - start) / step + 1e-9))
            out.extend(round(start + i * step, 12) for i in range(k + 1))
        else:
            try:
                out.append(float(part))
            except ValueError:
                raise ConfigError(f"cannot parse number {part!r}") from None
    if not out:
        raise ConfigError("empty grid")
    return out


def parse_ints(text) -> list:
    """``2..6`` (inclusive) or a comma list."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise ConfigError(f"cannot parse integer range {part!r}") from None
            if hi < lo:
                raise ConfigError(f"empty integer range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            try:
                out.append(int(part))
            except ValueError:
                raise ConfigError(f"cannot parse integer {part!r}") from None
    if not out:
        raise ConfigError("empty integer list")
    return out


def _names(text):
    return [s.strip() for s in str(text).split(",") if s.strip()]


# ---------------------------------------------------------------------------
# output

def config_hash(cfg: dict) -> str:
    keep = {k: v for k, v in cfg.items() if k not in ("out", "svg", "config", "verbose")}
    blob = json.dumps(keep, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(command, cfg, columns, rows, partial=None) -> str:
    buf = io.StringIO()
    buf.write(f"# imprecise-witness {__version__} command={command} seed={cfg.get('seed')} "
              f"config={config_hash(cfg)}\n")
    if partial:
        buf.write(f"# partial: {partial}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def emit(command, cfg, columns, rows, partial=None):
    text = render_csv(command, cfg, columns, rows, partial)
    if cfg.get("out"):
        atomic_write(cfg["out"], text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands

ANALYTIC_COLUMNS = ["witness", "d", "n", "eps", "bound", "regime", "threshold_eps", "conjectured"]


def analytic_rows(witness, eps_grid, d=None, n=None) -> list:
    rows = []
    for eps in eps_grid:
        if witness == "pauli2":
            b = an.simplest_qubit_sep_bound(eps)
            dd, nn = 2, 2
        elif witness == "pauli3":
            b = an.three_pauli_sep_bound(eps)
            dd, nn = 2, 3
        elif witness == "chsh":
            b = an.chsh_sep_model(eps)
            dd, nn = 2, 2
        elif witness in ("bloch", "bloch-family"):
            if d is None or n is None:
                raise ConfigError("bloch needs --d and --n")
            b = an.highdim_sep_bound(d, n, eps)
            dd, nn = d, n
        else:
            raise ConfigError(f"no closed-form bound for witness {witness!r}")
        rows.append({"witness": witness, "d": dd, "n": nn, "eps": eps, "bound": b.value,
                     "regime": b.regime, "threshold_eps": b.threshold_eps, "conjectured": b.conjectured})
    return rows


def cmd_analytic(cfg):
    try:
        rows = analytic_rows(cfg["witness"], parse_grid(cfg["eps"]), cfg.get("d"), cfg.get("n"))
    except ValueError as e:
        raise ConfigError(str(e)) from None
    emit("analytic", cfg, ANALYTIC_COLUMNS, rows)


def _seesaw_cfg(cfg):
    from .seesaw import SeesawConfig
    jobs = cfg.get("jobs") or int(os.environ.get(THREADS_ENV, "1"))
    try:
        return SeesawConfig(restarts=cfg["restarts"], seed=cfg["seed"], n_jobs=jobs,
                            max_outer_iters=cfg["max_iters"])
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _spec(name, d=None, n=None):
    try:
        return get_spec(name, d, n)
    except KeyError as e:
        raise ConfigError(str(e.args[0])) from None
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _elapsed(t0, cfg):
    return int(round((time.perf_counter() - t0) * 1000)) if cfg.get("timing") else None


SEESAW_COLUMNS = ["witness", "d", "eps", "mode", "bound", "restarts_converged", "restarts", "status",
                  "wall_time_ms"]


def cmd_seesaw(cfg):
    from .seesaw import SeesawError, seesaw_lower_bound
    spec = _spec(cfg["witness"], cfg.get("d"), cfg.get("n"))
    scfg = _seesaw_cfg(cfg)
    rows = []
    for eps in parse_grid(cfg["eps"]):
        t0 = time.perf_counter()
        try:
            res = seesaw_lower_bound(spec.with_eps(eps), cfg["mode"], scfg)
        except SeesawError as e:
            rows.append({"witness": spec.name, "d": spec.d, "eps": eps, "mode": cfg["mode"], "status": "failed"})
            raise PartialFailure(str(e), rows) from None
        rows.append({"witness": spec.name, "d": spec.d, "eps": eps, "mode": cfg["mode"], "bound": res.bound,
                     "restarts_converged": res.restarts_converged, "restarts": scfg.restarts,
                     "status": "ok", "wall_time_ms": _elapsed(t0, cfg)})
    emit("seesaw", cfg, SEESAW_COLUMNS, rows)


FIG1_COLUMNS = ["d", "eps", "mode", "bound", "delta", "restarts_converged", "wall_time_ms"]


def fig1_experiment(d_list, eps_list, scfg, mode="separable", timing=False) -> list:
    """Seesaw separable bounds and the relative gap for the conjugate-bases witness.

    Rows are sorted by ``(eps, d)``.
    """
    from .seesaw import seesaw_curve
    from .witness import conjugate_bases
    rows = []
    for d in d_list:
        t0 = time.perf_counter()
        results = seesaw_curve(conjugate_bases(d), list(eps_list), mode, scfg)
        ms = int(round((time.perf_counter() - t0) * 1000 / len(eps_list))) if timing else None
        for eps, res in zip(eps_list, results):
            rows.append({"d": d, "eps": float(eps), "mode": mode, "bound": res.bound,
                         "delta": an.delta_ratio(d, res.bound), "restarts_converged": res.restarts_converged,
                         "wall_time_ms": ms})
    rows.sort(key=lambda r: (r["eps"], r["d"]))
    return rows


def cmd_fig1(cfg):
    from .seesaw import SeesawError
    d_list = parse_ints(cfg["d"])
    if min(d_list) < 2:
        raise ConfigError("dimensions must be >= 2")
    eps_list = parse_grid(cfg["eps"])
    try:
        rows = fig1_experiment(d_list, eps_list, _seesaw_cfg(cfg), timing=cfg.get("timing"))
    except SeesawError as e:
        raise PartialFailure(str(e), []) from None
    emit("fig1", cfg, FIG1_COLUMNS, rows)
    if cfg.get("svg"):
        from .plotting import plot_delta_vs_d
        plot_delta_vs_d(rows, cfg["svg"])


SDP_COLUMNS = ["witness", "eps", "level", "mode", "upper_bound", "duality_gap", "basis_size_m",
               "monomials_n", "status", "analytic"]


def _moment_rows(names, eps_grid, level, mode, seed, max_samples, d=None, n=None):
    from . import moment as mm
    rows = []
    for name in names:
        spec = _spec(name, d, n)
        cfg = mm.MomentConfig(level=level, seed=seed, max_samples=max_samples)
        rel = mm.relaxation_for(spec, cfg)
        for eps in eps_grid:
            try:
                out = mm.upper_bound(spec.with_eps(eps), rel, mode)
            except Exception as e:  # solver breakdown: keep what we have
                rows.append({"witness": spec.name, "eps": eps, "level": level, "mode": mode, "status": "failed"})
                raise PartialFailure(f"{spec.name} eps={eps}: {e}", rows) from None
            ana = mm.ANALYTIC.get(name)
            rows.append({"witness": spec.name, "eps": eps, "level": level, "mode": mode,
                         "upper_bound": out.upper_bound, "duality_gap": out.duality_gap,
                         "basis_size_m": rel.basis.m, "monomials_n": len(rel.ml), "status": out.status,
                         "analytic": ana(eps).value if ana and mode == "separable" else None})
            if out.status not in ("optimal", "inaccurate"):
                raise PartialFailure(f"{spec.name} eps={eps}: solver status {out.status}", rows)
    return rows


def cmd_sdp(cfg):
    from .moment import BasisIncomplete
    try:
        rows = _moment_rows(_names(cfg["witness"]), parse_grid(cfg["eps"]), cfg["level"], cfg["mode"],
                            cfg["seed"], cfg["max_samples"], cfg.get("d"), cfg.get("n"))
    except BasisIncomplete as e:
        raise PartialFailure(str(e), []) from None
    emit("sdp", cfg, SDP_COLUMNS, rows)


def cmd_fig2(cfg):
    from .moment import BasisIncomplete
    try:
        rows = _moment_rows(_names(cfg["witness"]), parse_grid(cfg["eps"]), cfg["level"], "separable",
                            cfg["seed"], cfg["max_samples"])
    except BasisIncomplete as e:
        raise PartialFailure(str(e), []) from None
    emit("fig2", cfg, SDP_COLUMNS, rows)
    if cfg.get("svg"):
        from .plotting import plot_bounds_vs_eps
        plot_bounds_vs_eps(rows, cfg["svg"])


def load_measurement(path) -> Measurement:
    """JSON ``{"d": d, "o": o, "effects": [[[re, im], ...], ...]}``."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"{path}: {e}") from None
    if not isinstance(data, dict) or set(data) != {"d", "o", "effects"}:
        raise ConfigError(f"{path}: expected keys d, o, effects")
    try:
        e = np.asarray(data["effects"], dtype=float)
        eff = e[..., 0] + 1j * e[..., 1]
    except (ValueError, IndexError, TypeError):
        raise ConfigError(f"{path}: effects must be matrices of [re, im] pairs") from None
    if eff.shape != (data["o"], data["d"], data["d"]):
        raise ConfigError(f"{path}: effects shape {eff.shape} does not match d={data['d']}, o={data['o']}")
    m = Measurement(eff)
    if not m.is_povm(1e-8):
        raise ConfigError(f"{path}: effects do not form a POVM")
    return m


def dump_measurement(m: Measurement) -> str:
    eff = [[[[float(v.real), float(v.imag)] for v in row] for row in e] for e in m.effects]
    return json.dumps({"d": m.dim, "o": m.outcomes, "effects": eff})


def cmd_fidelity(cfg):
    lab, target = load_measurement(cfg["lab"]), load_measurement(cfg["target"])
    try:
        f = measurement_fidelity(lab, target)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    rows = [{"lab": cfg["lab"], "target": cfg["target"], "d": lab.dim, "o": lab.outcomes,
             "fidelity": f, "eps": min_epsilon(lab, target)}]
    emit("fidelity", cfg, ["lab", "target", "d", "o", "fidelity", "eps"], rows)


# ---------------------------------------------------------------------------
# argument parsing

COMMANDS = {
    "analytic": cmd_analytic, "seesaw": cmd_seesaw, "fig1": cmd_fig1,
    "sdp": cmd_sdp, "fig2": cmd_fig2, "fidelity": cmd_fidelity,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="imprecise-witness",
                                description="Entanglement-witness bounds under imprecise measurements.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--config", help="JSON file with option values (keys as long option names)")
        sp.add_argument("--out", help="CSV output path (default: stdout)")
        sp.add_argument("-v", "--verbose", action="store_true")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    def seesaw_opts(sp):
        sp.add_argument("--restarts", type=int, default=20)
        sp.add_argument("--max-iters", type=int, default=200)
        sp.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or 1)")
        sp.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")

    sp = sub.add_parser("analytic", help="closed-form separable bounds")
    common(sp)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--n", type=int)

    sp = sub.add_parser("seesaw", help="seesaw lower bounds")
    common(sp)
    seesaw_opts(sp)
    sp.add_argument("--witness", required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--mode", choices=["separable", "entangled"], default="separable")
    sp.add_argument("--d", type=int)
    sp.add_argument("--n", type=int)

    sp = sub.add_parser("fig1", help="relative gap of the conjugate-bases witness against d")
    common(sp)
    seesaw_opts(sp)
    sp.add_argument("--d", default="2..6")
    sp.add_argument("--eps", default="0.005,0.01,0.02,0.03,0.05,0.10")
    sp.add_argument("--svg")

    for name, hlp in (("sdp", "moment-matrix upper bounds"), ("fig2", "separable upper bounds for pauli2/pauli3")):
        sp = sub.add_parser(name, help=hlp)
        common(sp)
        sp.add_argument("--witness", required=name == "sdp", default="pauli2,pauli3")
        sp.add_argument("--eps", required=name == "sdp", default="0:0.10:0.01")
        sp.add_argument("--level", type=int, default=2)
        sp.add_argument("--max-samples", type=int, default=20000)
        if name == "sdp":
            sp.add_argument("--mode", choices=["separable", "entangled"], default="separable")
            sp.add_argument("--d", type=int)
            sp.add_argument("--n", type=int)
        else:
            sp.add_argument("--svg")

    sp = sub.add_parser("fidelity", help="fidelity of a lab measurement with its target")
    common(sp, seed=False)
    sp.add_argument("--lab", required=True)
    sp.add_argument("--target", required=True)
    return p


def _merge_config(parser, args) -> dict:
    cfg = vars(args).copy()
    path = cfg.get("config")
    if not path:
        return cfg
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"config {path}: {e}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    # command-line values win over the file only when given explicitly
    defaults = _subparser_defaults(parser, args.command)
    for key, val in data.items():
        k = key.replace("-", "_")
        if k not in cfg or k in ("command", "config"):
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
        if cfg[k] == defaults.get(k):
            cfg[k] = val
    return cfg


def _subparser_defaults(parser, command):
    for action in parser._subparsers._group_actions:
        sp = action.choices.get(command)
        if sp is not None:
            return {a.dest: a.default for a in sp._actions}
    return {}


def _validate(cfg):
    for key in ("restarts", "max_iters", "max_samples", "level"):
        if key in cfg and cfg[key] is not None and int(cfg[key]) < 1:
            raise ConfigError(f"--{key.replace('_', '-')} must be >= 1")
    for key in ("witness", "eps", "lab", "target"):
        if key in cfg and cfg[key] is None:
            raise ConfigError(f"--{key} is required")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _merge_config(parser, args)
        _validate(cfg)
        COMMANDS[cfg["command"]](cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except PartialFailure as e:
        print(f"error: {e}", file=sys.stderr)
        if e.rows:
            cols = {"seesaw": SEESAW_COLUMNS, "sdp": SDP_COLUMNS, "fig2": SDP_COLUMNS}.get(cfg["command"])
            if cols:
                emit(cfg["command"], cfg, cols, e.rows, partial=str(e))
        return EXIT_FAILURE
    except (RuntimeError, np.linalg.LinAlgError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

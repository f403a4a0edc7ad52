"""Config-driven batch front-end.

A run reads an optional YAML config, validates it against a strict schema,
runs one task and writes a JSON file, a CSV file for series data and a
manifest into the output directory.  Every file carries the config hash and
the toolkit version; wall-clock data lives only in the manifest's
``metadata`` field.

Example::

    quasiloc acceleration --config run.yaml --out results/
    quasiloc verify --out results/
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from . import __version__
from .acceleration import DEFAULT_WINDOW, acceleration_estimate, window_profile
from .arithmetic import DEFAULT_PRECISION, beta_proxy, cf_expand, classify_scales
from .cocycle import lyapunov_with_error
from .deviation import complexity_report, deviation_set, fourier_diagnostics
from .errors import ConfigError, QuasilocError
from .localization import decay_audit, eigen_solve_box, harvest_energy, top_normalized_pair
from .model import Potential, derive_constants
from .zeros import TraceHandle, locate_zeros

log = logging.getLogger("quasiloc")

TASKS = ("cf", "lyapunov", "acceleration", "zeros", "deviation", "localize", "constants")

_num = {"type": "number"}
_int = {"type": "integer", "minimum": 1}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "task": {"enum": list(TASKS)},
        "frequency": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "quotients": {"type": "array", "items": _int, "minItems": 1},
                "decimal": {"type": "string"},
                "depth": _int,
            },
        },
        "potential": {
            "type": "object", "additionalProperties": False,
            "properties": {"cosine_coeffs": {"type": "array", "items": _num, "minItems": 1},
                           "eps0": {"type": "number", "exclusiveMinimum": 0}},
        },
        "energy": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "list": {"type": "array", "items": _num, "minItems": 1},
                "harvest": {"type": "object", "additionalProperties": False,
                            "properties": {"theta": _num, "sites": _int}},
                "grid": {"type": "object", "additionalProperties": False,
                         "required": ["lo", "hi", "points"],
                         "properties": {"lo": _num, "hi": _num, "points": _int}},
            },
            "maxProperties": 1,
        },
        "numerics": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "n": _int, "m": _int, "grid": _int, "K": _int, "points": _int, "N": _int,
                "eps": {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 1}]},
                "window": _pair, "y_range": _pair, "theta": _num,
                "delta": {"type": "number", "exclusiveMinimum": 0},
                "delta_relative": {"type": "boolean"},
                "delta1_working": {"type": "number", "exclusiveMinimum": 0},
                "eta": {"type": "number", "exclusiveMinimum": 0},
                "C_v": {"type": "number", "minimum": 1},
                "q": _int, "rational": {"type": "boolean"},
            },
        },
        "output": {"type": "object", "additionalProperties": False,
                   "properties": {"dir": {"type": "string"}, "prefix": {"type": "string"}}},
        "precision": {"type": "integer", "minimum": 15},
    },
}

DEFAULTS = {
    "frequency": {"quotients": [1], "depth": 30},
    "potential": {"cosine_coeffs": [0.0, 2.0], "eps0": 0.05},
    "energy": {"harvest": {"theta": 0.1, "sites": 1000}},
    "numerics": {"n": 10 ** 4, "m": 100, "grid": 256, "K": 512, "points": 5, "N": 1000, "eps": 0.0,
                 "window": list(DEFAULT_WINDOW), "y_range": [50, 400], "theta": 0.1, "delta": 0.3,
                 "delta_relative": True, "eta": 0.01, "q": 21, "rational": False},
    "output": {"prefix": ""},
    "precision": DEFAULT_PRECISION,
}


def validate(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None


def load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        cfg = yaml.safe_load(fh) or {}
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a mapping")
    validate(cfg)
    return cfg


def resolve(cfg: dict, task: str, precision: int | None = None) -> dict:
    """Fill defaults; the result is what gets hashed."""
    if cfg.get("task", task) != task:
        raise ConfigError(f"config task {cfg['task']!r} does not match subcommand {task!r}")
    out = {"task": task}
    for key in ("frequency", "potential", "energy", "numerics", "output"):
        given = cfg.get(key)
        if key in ("frequency", "energy") and given:
            base = {} if key == "energy" else {"depth": DEFAULTS[key]["depth"]}
            out[key] = {**base, **given}
        else:
            out[key] = {**DEFAULTS[key], **(given or {})}
    out["precision"] = int(precision if precision is not None else cfg.get("precision", DEFAULTS["precision"]))
    validate(out)
    return out


def config_hash(cfg: dict) -> str:
    # the output location does not affect results
    hashed = {k: v for k, v in cfg.items() if k != "output"}
    return hashlib.sha256(json.dumps(hashed, sort_keys=True).encode()).hexdigest()


def build_frequency(cfg: dict):
    f = cfg["frequency"]
    if "decimal" in f:
        return cf_expand(f["decimal"], depth=f["depth"], precision=cfg["precision"])
    return cf_expand(f.get("quotients", [1]), depth=max(f["depth"], len(f.get("quotients", []))),
                     precision=cfg["precision"])


def build_potential(cfg: dict) -> Potential:
    p = cfg["potential"]
    return Potential(tuple(p["cosine_coeffs"]), p["eps0"])


def energies(cfg: dict, v: Potential, cf) -> list:
    e = cfg["energy"]
    if "list" in e:
        return [float(x) for x in e["list"]]
    if "grid" in e:
        g = e["grid"]
        return [float(x) for x in np.linspace(g["lo"], g["hi"], g["points"])]
    h = e.get("harvest", {})
    return [harvest_energy(v, cf, h.get("theta", 0.1), h.get("sites", 1000))]


def _fmt(x) -> str:
    return repr(float(x))


# ---- tasks --------------------------------------------------------------

def task_cf(cfg, cf, v, E=None):
    rows = ["k,a_k,p_k,q_k,beta_k,norm_qk_omega"]
    for k in range(1, cf.depth + 1):
        b = _fmt(cf.beta(k)) if k < cf.depth else ""
        rows.append(f"{k},{cf.a(k)},{cf.p(k)},{cf.q(k)},{b},{float(cf.norm_qk(k))!r}")
    data = cf.to_dict()
    wd = cfg["numerics"].get("delta1_working")
    if wd is not None and cf.depth > 1:
        data["scales"] = [{"n": s.n, "q_n": s.qn, "kind": s.kind} for s in classify_scales(cf, wd)]
    return data, rows


def task_lyapunov(cfg, cf, v, E):
    nm = cfg["numerics"]
    eps = nm["eps"] if isinstance(nm["eps"], list) else [nm["eps"]]
    out, rows = [], []
    for e in eps:
        L, err = lyapunov_with_error(E, v, cf, float(e), nm["n"], nm["grid"])
        out.append({"eps": float(e), "L_n": L, "error": err})
        rows.append(f"{_fmt(E)},{_fmt(e)},{nm['n']},{_fmt(L)},{_fmt(err)}")
    return {"E": E, "n": nm["n"], "grid": nm["grid"], "profile": out}, rows


def task_acceleration(cfg, cf, v, E):
    nm = cfg["numerics"]
    prof = window_profile(E, v, cf, nm["window"], nm["points"], n=nm["n"], grid_size=nm["grid"])
    est = acceleration_estimate(prof, nm["window"])
    rows = [f"{_fmt(E)},{_fmt(e)},{_fmt(L)},{_fmt(r)}" for e, L, r in zip(prof.eps_grid, prof.values, prof.errors)]
    return {"E": E, **est, "profile": prof.to_dict()}, rows


def task_zeros(cfg, cf, v, E):
    nm = cfg["numerics"]
    q = nm["q"]
    eps = v.eps0 / 2
    if nm["rational"]:
        p = cf.p(cf.index_of(q))
        fn = TraceHandle(E, v, (p, q), q, tag=f"f^{p}/{q}_{q}")
        inv = locate_zeros(fn, eps, hint_q=q)
    else:
        inv = locate_zeros(TraceHandle(E, v, cf, q), eps)
    data = inv.to_dict()
    data["E"] = E
    data["count_over_2q"] = inv.count / (2 * q)
    rows = [f"{_fmt(E)},{_fmt(z.real)},{_fmt(z.imag)},{_fmt(r)}" for z, r in zip(inv.zeros, inv.residuals)]
    return data, rows


def task_deviation(cfg, cf, v, E):
    nm = cfg["numerics"]
    ds = deviation_set(E, v, cf, nm["m"], nm["delta"], relative=nm["delta_relative"])
    rep = complexity_report(ds, 1, nm["eta"])
    data = ds.to_dict()
    data.update(E=E, complexity=rep)
    rows = [f"{_fmt(E)},{_fmt(a)},{_fmt(b)}" for a, b in ds.arcs]
    return data, rows


def task_constants(cfg, cf, v, E):
    nm = cfg["numerics"]
    L, _ = lyapunov_with_error(E, v, cf, 0.0, nm["n"], nm["grid"])
    diag = fourier_diagnostics(E, v, cf, nm["m"], nm["K"])
    C_v = max(1.0, nm.get("C_v", diag.C_v))
    pc = derive_constants(v, L, beta_proxy(cf), C_v, nm.get("delta1_working"))
    data = {"E": E, "L": L, "fourier": {k: diag.to_dict()[k] for k in ("C_v1", "C_v2", "C_v3", "C_v", "nodes")},
            "constants": pc.to_dict()}
    rows = [f"{k},{_fmt(x) if isinstance(x, float) else x}" for k, x in sorted(pc.to_dict().items())]
    return data, rows


def task_localize(cfg, cf, v, E=None):
    nm = cfg["numerics"]
    pair = top_normalized_pair(eigen_solve_box(v, cf, nm["theta"], nm["N"]))
    L, _ = lyapunov_with_error(pair.E, v, cf, 0.0, nm["n"], nm["grid"])
    pc = derive_constants(v, L, beta_proxy(cf), nm.get("C_v", 1.0), nm.get("delta1_working"))
    audit = decay_audit(pair, cf, pc, tuple(nm["y_range"]), L)
    data = {"pair": pair.to_dict(), "L": L, "audit": audit}
    rows = pair.to_csv(audit["bound_rate"]).splitlines()[1:]
    return data, rows


TASK_TABLE = {
    "cf": (task_cf, False, None),
    "lyapunov": (task_lyapunov, True, "E,eps,n,L_n,error"),
    "acceleration": (task_acceleration, True, "E,eps,L_n,error"),
    "zeros": (task_zeros, True, "E,re,im,log_residual"),
    "deviation": (task_deviation, True, "E,arc_start,arc_end"),
    "constants": (task_constants, True, "name,value"),
    "localize": (task_localize, False, "y,phi_y,log_abs_phi_y,bound_y"),
}


def _run_one(cfg: dict, E):
    cf, v = build_frequency(cfg), build_potential(cfg)
    fn = TASK_TABLE[cfg["task"]][0]
    return fn(cfg, cf, v, E)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(cfg: dict, out_dir, jobs: int = 1) -> dict:
    """Run one resolved config; returns the manifest."""
    t0 = time.perf_counter()
    task = cfg["task"]
    fn, per_energy, header = TASK_TABLE[task]
    h = config_hash(cfg)
    cf, v = build_frequency(cfg), build_potential(cfg)
    if per_energy:
        Es = energies(cfg, v, cf)
        if jobs > 1 and len(Es) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(_run_one, [cfg] * len(Es), Es))
        else:
            results = [fn(cfg, cf, v, E) for E in Es]
        data = [r[0] for r in results]
        rows = [row for r in results for row in r[1]]
    else:
        data, rows = fn(cfg, cf, v, None)
        if task == "cf":
            header, rows = rows[0], rows[1:]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    prefix = cfg["output"].get("prefix", "")
    jpath, cpath = out / f"{prefix}{task}.json", out / f"{prefix}{task}.csv"
    doc = {"task": task, "config": cfg, "config_hash": h, "version": __version__, "result": _jsonable(data)}
    jpath.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    cpath.write_text(f"# config_hash={h} version={__version__}\n{header}\n" + "".join(r + "\n" for r in rows))
    manifest = {
        "task": task, "config_hash": h, "version": __version__,
        "files": {p.name: _sha(p) for p in (jpath, cpath)},
        "metadata": {"wall_s": time.perf_counter() - t0, "jobs": jobs},
    }
    (out / f"{prefix}manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return manifest


def run_verify_cmd(args) -> int:
    from .verify import CRITERIA, dumps_results, run_verify, summary_lines

    ids = sorted(CRITERIA) if not args.only else args.only
    report = run_verify(ids)
    for line in summary_lines(report["results"]):
        print(line)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        body = dumps_results(report["results"])
        h = hashlib.sha256(body.encode()).hexdigest()
        doc = {"results": report["results"], "version": __version__, "results_hash": h,
               "metadata": report["metadata"]}
        (out / "verify.json").write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return 0 if all(r["pass"] for r in report["results"]) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasiloc", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"quasiloc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in TASKS + ("verify",):
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH", help="YAML run configuration")
        sp.add_argument("--out", metavar="DIR", default=None if name == "verify" else "quasiloc_out")
        sp.add_argument("--jobs", metavar="N", type=int, default=1)
        sp.add_argument("--precision", metavar="DIGITS", type=int, default=None,
                        help="decimal digits for high-precision frequency arithmetic")
        if name == "verify":
            sp.add_argument("--only", type=int, nargs="+", metavar="ID", help="run a subset of criteria")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        if args.command == "verify":
            return run_verify_cmd(args)
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = resolve(load_config(args.config), args.command, args.precision)
        manifest = run(cfg, args.out, args.jobs)
        log.info("wrote %s to %s (config %s)", ", ".join(manifest["files"]), args.out, manifest["config_hash"][:12])
        return 0
    except QuasilocError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except (OSError, yaml.YAMLError) as exc:
        print(f"error [cli.io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

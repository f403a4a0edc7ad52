"""The acceptance suite: fifteen checks, each returning a JSON-ready dict.

Each check reports ``pass`` and a ``values`` map.  Wall-clock timings go to
``metadata`` so that two runs can be compared byte for byte on everything else.
"""

from __future__ import annotations

import json
import math
import time

import numpy as np

from . import __version__
from .acceleration import acceleration_estimate, rational_uniformity, window_profile
from .annulus import (annulus_from_eps, annulus_spec, gamma_circle_integral, green_value, jensen_average,
                      jensen_quadrature)
from .arithmetic import beta_proxy, cf_expand, golden
from .cocycle import lyapunov_finite, transfer_batch, transfer_product, trace_f_from
from .deviation import (block_sum_checks, complexity_report, deviation_set, fejer_kernel, fourier_bound_check,
                        fourier_diagnostics, fr1_grid_check, synthetic_deviation_set, synthetic_dips)
from .localization import (decay_audit, eigen_solve_box, green_expansion_residual, harvest_energy,
                           random_nonresonant_intervals, top_normalized_pair)
from .model import amo, derive_constants, zero_potential
from .zeros import (TraceHandle, conj_closure, count_zeros, locate_zeros, reflection_identity_residual,
                    rotation_closure, rouche_transfer)

CRITERIA = {}
LIOUVILLE_QUOTIENTS = [1] * 7 + [10 ** 7]


def criterion(cid: int, name: str):
    def wrap(fn):
        CRITERIA[cid] = (name, fn)
        return fn
    return wrap


def _clean(x):
    """Make values JSON-serializable with plain Python types."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


_cache = {}


def _golden():
    if "golden" not in _cache:
        _cache["golden"] = golden(30)
    return _cache["golden"]


def _mid_energy():
    """AMO lam = 2 energy: median eigenvalue of a 1000-site box at theta = 0.1."""
    if "E" not in _cache:
        _cache["E"] = harvest_energy(amo(2.0), _golden(), 0.1, 1000)
    return _cache["E"]


def _warm():
    # compile the kernels once so timings measure the computation
    v, w = amo(2.0), _golden().omega_float
    transfer_product(0.0, v, w, 0.1, 10)
    transfer_product(0.0, v, w, 0.1 + 0.01j, 10)
    transfer_batch(0.0, v, w, np.array([0.1]), 4)
    transfer_batch(0.0, v, w, np.array([0.1 + 0.01j]), 4)
    lyapunov_finite(0.0, v, w, 0.01, 4, 64)
    lyapunov_finite(0.0, v, w, 0.0, 4, 64)


@criterion(1, "SL(2) preservation")
def c1():
    _warm()
    v, w, E = amo(2.0), _golden().omega_float, _mid_energy()
    t = time.perf_counter()
    res = {}
    for ph in (0.0, 0.1, 0.3 + 0.01j):
        st = transfer_product(E, v, w, ph, 10 ** 5)
        res[str(ph)] = st.det_residual
    dt = time.perf_counter() - t
    worst = max(res.values())
    return {"pass": worst < 1e-6 and dt / 3 < 1.0, "values": {"det_residual": res, "max": worst},
            "runtime": dt / 3}


@criterion(2, "Free-cocycle oracle")
def c2():
    rng = np.random.default_rng(2)
    v = zero_potential()
    rhos = rng.uniform(0.05, np.pi - 0.05, 20)
    worst_tr = worst_f = 0.0
    for rho in rhos:
        E = 2 * math.cos(rho)
        for n in (1, 2, 7, 64, 333, 1000):
            mats, logs = transfer_batch(E, v, 0.5, np.array([0.0]), n)
            tr = (mats[0, 0, 0] + mats[0, 1, 1]) * math.exp(logs[0])
            f = trace_f_from(mats, logs).value()[0].real
            worst_tr = max(worst_tr, abs(tr - 2 * math.cos(n * rho)))
            worst_f = max(worst_f, abs(f - (2 - 2 * math.cos(n * rho))))
    return {"pass": worst_tr < 1e-9 and worst_f < 1e-9, "values": {"max_trace_error": worst_tr, "max_f_error": worst_f}}


@criterion(3, "Rational zero count")
def c3():
    t = time.perf_counter()
    cf, v, E = _golden(), amo(2.0), _mid_energy()
    counts = {}
    for q in (8, 13, 21):
        n = cf.index_of(q)
        fn = TraceHandle(E, v, (cf.p(n), q), q)
        counts[q] = count_zeros(fn, v.eps0 / 2)
    dt = time.perf_counter() - t
    ok = all(c % q == 0 for q, c in counts.items()) and counts[13] == 26 and counts[21] == 42
    return {"pass": ok and dt < 60, "values": {"E": E, "counts": counts,
                                               "ratio_to_q": {q: c / q for q, c in counts.items()}}, "runtime": dt}


@criterion(4, "Zero symmetry closures")
def c4():
    cf, v, E = _golden(), amo(2.0), _mid_energy()
    eps = v.eps0 / 2
    conj, rot = {}, {}
    for q in (8, 13, 21):
        n = cf.index_of(q)
        p = cf.p(n)
        inv = locate_zeros(TraceHandle(E, v, (p, q), q), eps, hint_q=q)
        conj[f"{p}/{q}"] = conj_closure(inv)
        rot[f"{p}/{q}"] = rotation_closure(inv, p, q)
    inv = locate_zeros(TraceHandle(E, v, cf, 21), eps)
    conj["omega_21"] = conj_closure(inv)
    ok = max(conj.values()) < 1e-8 and max(rot.values()) < 1e-9
    return {"pass": ok, "values": {"conj_closure": conj, "rotation_closure": rot}}


@criterion(5, "Even-potential reflection identity")
def c5():
    cf, v, E = _golden(), amo(2.0), _mid_energy()
    r = reflection_identity_residual(TraceHandle(E, v, cf, 21), cf.omega_float, 21, nodes=1000)
    return {"pass": r < 1e-8, "values": {"relative_residual": r}}


@criterion(6, "Acceleration quantization")
def c6():
    t = time.perf_counter()
    w = _golden().omega_float
    out = {}
    for lam, expected in ((0.5, 0), (2.0, 1)):
        v = amo(lam)
        E = harvest_energy(v, w, 0.1, 1000)
        est = acceleration_estimate(window_profile(E, v, w, n=10 ** 4))
        out[f"amo_{lam}"] = dict(est, E=E, expected=expected)
    est = acceleration_estimate(window_profile(1.0, zero_potential(), w, n=10 ** 4))
    out["free"] = dict(est, E=1.0, expected=0)
    dt = time.perf_counter() - t
    ok = all(r["kappa_int"] == r["expected"] and r["residual"] < 0.05 for r in out.values())
    return {"pass": ok and dt < 120, "values": out, "runtime": dt}


@criterion(7, "Lyapunov cross-validation")
def c7():
    cf, v, E = _golden(), amo(2.0), _mid_energy()
    Ln = lyapunov_finite(E, v, cf, 0.0, 10 ** 4, 256)
    rel = abs(Ln - math.log(2)) / math.log(2)
    ru = rational_uniformity(E, v, cf, cf.index_of(21), 0.0, 512)
    gap = abs(ru["mean_rational"] - Ln)
    return {"pass": rel < 0.02 and gap < 0.03,
            "values": {"L_n": Ln, "relative_error": rel, "rational_mean_q21": ru["mean_rational"], "gap": gap}}


@criterion(8, "Green's function identities")
def c8():
    rng = np.random.default_rng(8)
    specs = [annulus_from_eps(0.025), annulus_spec(math.exp(0.1 * math.pi))]
    bvan = sym = rot = quad = jen = 0.0
    for s in specs:
        R = s.R
        for _ in range(20):
            w = rng.uniform(1 / R, R) * np.exp(2j * np.pi * rng.random())
            z = rng.uniform(1 / R, R) * np.exp(2j * np.pi * rng.random())
            zb = np.array([R, 1 / R]) * np.exp(2j * np.pi * rng.random(2))
            bvan = max(bvan, float(np.max(np.abs(green_value(zb, w, s)))))
            sym = max(sym, abs(float(green_value(z, w, s)) - float(green_value(w, z, s))))
            a = np.exp(2j * np.pi * rng.random())
            rot = max(rot, abs(float(green_value(a * z, a * w, s)) - float(green_value(z, w, s))))
    s = specs[0]
    for _ in range(20):
        r = rng.uniform(1 / s.R, s.R)
        w = rng.uniform(1 / s.R, s.R) * np.exp(2j * np.pi * rng.random())
        g = gamma_circle_integral(r, w, s)
        quad = max(quad, abs(g["quadrature"] - g["closed_form"]))
    r1 = 1.3
    r2 = 1 / r1
    for rad in (0.3, 0.6, 0.9, 1.0, 1.2, 1.5, 2.5):
        z = rad * np.exp(0.7j)
        jen = max(jen, abs(float(jensen_average(z, r1, r2)) - jensen_quadrature(z, r1, r2)))
    ok = bvan < 1e-10 and sym < 1e-12 and rot < 1e-12 and quad < 1e-8 and jen < 1e-8
    return {"pass": ok, "values": {"boundary": bvan, "symmetry": sym, "rotation": rot, "int_HR": quad,
                                   "jensen": jen}}


@criterion(9, "Deviation complexity")
def c9():
    cf, v, E = _golden(), amo(2.0), _mid_energy()
    beta = beta_proxy(cf)
    runs = {}
    ok = True
    for m in (50, 100, 200):
        ds = deviation_set(E, v, cf, m, 0.3, relative=True)
        C_v = fourier_diagnostics(E, v, cf, m, 512).C_v
        pc = derive_constants(v, ds.L_m, beta, C_v)
        rep = complexity_report(ds, 1, pc.working_eta, pc.working_delta1, pc.delta1)
        runs[m] = dict(rep, L_m=ds.L_m, C_v=C_v, eta=pc.working_eta, flags=ds.flags)
        ok = ok and rep["pass"]
    m = 100
    neg = synthetic_deviation_set(synthetic_dips(m), m, level=-0.5)
    neg_rep = complexity_report(neg, 1, 0.01)
    return {"pass": ok and not neg_rep["pass"],
            "values": {"runs": runs, "negative_control": {"count": neg_rep["count"], "bound": neg_rep["bound"],
                                                          "rejected": not neg_rep["pass"]}}}


@criterion(10, "Fejer kernel")
def c10():
    cf = _golden()
    F0 = max(abs(fejer_kernel(R, 0, cf) - 1.0) for R in range(1, 257))
    fr1 = fr1_grid_check(cf, 256, 10 ** 4)
    blocks = block_sum_checks(cf, 10 ** 4)
    ok = F0 < 1e-12 and fr1["pass"] and blocks["pass"]
    return {"pass": ok, "values": {"F0_error": F0, "FR_1": fr1, "blocks": blocks}}


@criterion(11, "Fourier decay")
def c11():
    cf, v, E = _golden(), amo(2.0), _mid_energy()
    base = fourier_diagnostics(E, v, cf, 64, 512, nodes=4096)
    fine = fourier_diagnostics(E, v, cf, 64, 512, nodes=8192)
    ch2 = abs(fine.C_v2 - base.C_v2) / base.C_v2
    ch3 = abs(fine.C_v3 - base.C_v3) / base.C_v3
    chk = fourier_bound_check(base, fine.coeffs, cf)
    chk_base = fourier_bound_check(base, None, cf)
    ok = ch2 < 0.05 and ch3 < 0.05 and chk["pass"] and chk_base["pass"]
    return {"pass": ok, "values": {"base": {k: base.to_dict()[k] for k in ("C_v1", "C_v2", "C_v3", "C_v", "nodes")},
                                   "fine": {k: fine.to_dict()[k] for k in ("C_v1", "C_v2", "C_v3", "C_v", "nodes")},
                                   "change_C_v2": ch2, "change_C_v3": ch3, "bounds_fine": chk,
                                   "bounds_base": chk_base}}


def _box_pair():
    if "pair" not in _cache:
        _cache["pair"] = top_normalized_pair(eigen_solve_box(amo(2.0), _golden(), 0.1, 1000))
    return _cache["pair"]


@criterion(12, "Green's-expansion identity")
def c12():
    pair = _box_pair()
    L = lyapunov_finite(pair.E, pair.v, pair.omega, 0.0, 10 ** 4, 256)
    iv = random_nonresonant_intervals(pair, 100, L, 0.05 * L, seed=12)
    res = [green_expansion_residual(pair, *x) for x in iv]
    worst = max(res)
    return {"pass": len(iv) == 100 and worst < 1e-6, "values": {"intervals": len(iv), "max_residual": worst,
                                                                 "E": pair.E, "L": L}}


@criterion(13, "Localization decay")
def c13():
    t = time.perf_counter()
    cf = _golden()
    pairs = eigen_solve_box(amo(2.0), cf, 0.1, 1000)
    pair = top_normalized_pair(pairs)
    L = lyapunov_finite(pair.E, pair.v, pair.omega, 0.0, 10 ** 4, 256)
    pc = derive_constants(pair.v, L, beta_proxy(cf), 1.0)
    audit = decay_audit(pair, cf, pc, (50, 400), L)
    dt = time.perf_counter() - t
    viol = audit["weak_bound_violations"]
    ok = not viol and audit["fitted_rate"] >= 0.5 * math.log(2) and dt < 30
    return {"pass": ok, "values": {"E": pair.E, "L": L, "fitted_rate": audit["fitted_rate"],
                                   "bound_rate": audit["bound_rate"], "violations": viol,
                                   "residual": pair.residual, "boundary_weight": pair.boundary_weight},
            "runtime": dt}


@criterion(14, "Rouche zero transfer")
def c14():
    cf = cf_expand(LIOUVILLE_QUOTIENTS)
    v = amo(2.0)
    E = harvest_energy(v, cf, 0.1, 1000)
    n = cf.index_of(21)
    rep = rouche_transfer(E, v, cf, n, 0.05)
    ok = rep.all_paired and rep.telescoping_ok
    return {"pass": ok, "values": {
        "E": E, "omega_count": rep.omega_count, "rational_count": rep.rational_count,
        "all_paired": rep.all_paired, "max_displacement": rep.max_displacement, "ball_radius": rep.bound,
        "telescoping_sup": rep.telescoping_sup, "telescoping_bound": rep.telescoping_bound,
        "telescoping_ok": rep.telescoping_ok, "premise_q_norm_small": rep.premise_norm_ok, "L": rep.L}}


@criterion(15, "Determinism")
def c15():
    ids = [i for i in CRITERIA if i != 15]
    a = dumps_results(run_verify(ids)["results"])
    _cache.clear()
    b = dumps_results(run_verify(ids)["results"])
    return {"pass": a == b, "values": {"bytes": len(a), "identical": a == b}}


def run_criterion(cid: int) -> dict:
    name, fn = CRITERIA[cid]
    t = time.perf_counter()
    out = fn()
    wall = time.perf_counter() - t
    meta = {"wall_s": wall}
    if "runtime" in out:
        meta["runtime_s"] = out.pop("runtime")
    return {"id": cid, "name": name, "pass": bool(out["pass"]), "values": _clean(out["values"]), "metadata": meta}


def run_verify(ids=None) -> dict:
    ids = sorted(CRITERIA) if ids is None else list(ids)
    results = [run_criterion(i) for i in ids]
    return {"results": results, "metadata": {"version": __version__}}


def strip_metadata(results: list) -> list:
    return [{k: v for k, v in r.items() if k != "metadata"} for r in results]


def dumps_results(results: list) -> str:
    return json.dumps(strip_metadata(results), sort_keys=True, indent=1)


def summary_lines(results: list) -> list:
    return [f"criterion {r['id']:2d} {r['name']}: {'PASS' if r['pass'] else 'FAIL'}" for r in results]

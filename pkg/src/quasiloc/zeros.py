"""Argument-principle zero counting and location on annuli.

Functions are handled in the z variable, z = exp(2 pi i phi).  The annulus
A_{e^{2 pi eps}} is the image of the strip |Im phi| < eps; its zero count is the
winding number on the outer circle |z| = e^{2 pi eps} minus that on the inner one.

Values are carried as LogValue (log-magnitude plus unit phase) because the
functions of interest grow like e^{nL}.  Only phases are needed for winding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import cocycle
from .annulus import AnnulusSpec, annulus_from_eps
from .arithmetic import ContinuedFraction
from .cocycle import LogValue, omega_value, phase_of_z
from .errors import ReflectionError, WindingError, ZeroStructureError
from .model import Potential

TWO_PI = 2 * math.pi
HALF_PI = math.pi / 2


# ---------------------------------------------------------------------------
# function handles


class AnalyticHandle:
    """An analytic function of z on an annulus, evaluated in log form."""

    tag = "analytic"

    def __init__(self, params: dict | None = None):
        self.params = dict(params or {})

    def log_eval(self, z) -> LogValue:  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, z):
        return self.log_eval(np.asarray(z, dtype=np.complex128)).value()


class CallableHandle(AnalyticHandle):
    def __init__(self, func, tag: str = "callable", params: dict | None = None):
        super().__init__(params)
        self.func = func
        self.tag = tag

    def log_eval(self, z) -> LogValue:
        val = np.asarray(self.func(np.asarray(z, dtype=np.complex128)), dtype=np.complex128)
        return LogValue.from_scaled(val, np.zeros(val.shape))


def as_handle(fn) -> AnalyticHandle:
    return fn if isinstance(fn, AnalyticHandle) else CallableHandle(fn)


class TraceHandle(AnalyticHandle):
    """f_{n,E}(z) = 2 - tr M_n at frequency omega (irrational or p/q)."""

    def __init__(self, E: float, v: Potential, omega, n: int, tag: str | None = None):
        w = omega_value(omega) if not isinstance(omega, tuple) else omega[0] / omega[1]
        super().__init__({"E": float(E), "omega": w, "n": int(n), "potential": list(v.cosine_coeffs)})
        self.E, self.v, self.omega, self.n = float(E), v, w, int(n)
        self.tag = tag or f"f^omega_{n}"

    def log_eval(self, z) -> LogValue:
        z = np.asarray(z, dtype=np.complex128)
        mats, logs = cocycle.transfer_batch(self.E, self.v, self.omega, phase_of_z(z).ravel(), self.n)
        lv = cocycle.trace_f_from(mats, logs)
        return LogValue(lv.log_abs.reshape(z.shape), lv.phase.reshape(z.shape))


class GLevelHandle(AnalyticHandle):
    """g_m(z) - e^{level_log}."""

    def __init__(self, E: float, v: Potential, omega, m: int, level_log: float):
        w = omega_value(omega)
        super().__init__({"E": float(E), "omega": w, "m": int(m), "level_log": float(level_log)})
        self.E, self.v, self.omega, self.m, self.level_log = float(E), v, w, int(m), float(level_log)
        self.tag = f"g_{m} - level"

    def log_eval(self, z) -> LogValue:
        z = np.asarray(z, dtype=np.complex128)
        mats, logs = cocycle.transfer_batch(self.E, self.v, self.omega, phase_of_z(z).ravel(), self.m)
        sq = (mats ** 2).sum(axis=(1, 2))
        with np.errstate(over="ignore", under="ignore"):
            scaled = sq - np.exp(self.level_log - 2 * logs)
        lv = LogValue.from_scaled(scaled, 2 * logs)
        return LogValue(lv.log_abs.reshape(z.shape), lv.phase.reshape(z.shape))


class GeneralTraceHandle(AnalyticHandle):
    """Trace function for an arbitrary potential callable v(phase) (numpy loop).

    Used for potentials outside the cosine-series model, such as odd
    perturbations in negative controls.  Intended for small n.
    """

    def __init__(self, vfunc, E: float, omega: float, n: int, tag: str = "f_general"):
        super().__init__({"E": float(E), "omega": float(omega), "n": int(n)})
        self.vfunc, self.E, self.omega, self.n = vfunc, float(E), float(omega), int(n)
        self.tag = tag

    def log_eval(self, z) -> LogValue:
        z = np.asarray(z, dtype=np.complex128)
        phi = phase_of_z(z).ravel()
        a = np.ones_like(phi)
        b = np.zeros_like(phi)
        c = np.zeros_like(phi)
        d = np.ones_like(phi)
        s = np.zeros(phi.shape)
        for k in range(self.n):
            t = self.E - self.vfunc(phi + k * self.omega)
            a, b, c, d = t * a - c, t * b - d, a, b
            mx = np.maximum.reduce([np.abs(a), np.abs(b), np.abs(c), np.abs(d)])
            a, b, c, d = a / mx, b / mx, c / mx, d / mx
            s += np.log(mx)
        scaled = 2 * np.exp(-s) - (a + d)
        lv = LogValue.from_scaled(scaled, s)
        return LogValue(lv.log_abs.reshape(z.shape), lv.phase.reshape(z.shape))


# ---------------------------------------------------------------------------
# winding


def _phase_steps(ph: np.ndarray, closed: bool) -> np.ndarray:
    nxt = np.roll(ph, -1) if closed else ph[1:]
    cur = ph if closed else ph[:-1]
    return np.angle(nxt / cur)


def _edge_winding(fn: AnalyticHandle, path, n0: int, budget: int):
    """Total phase change of fn along path(t), t in [0, 1]; None if the phase
    cannot be tracked within the node budget or fn vanishes on the path."""
    n = n0
    while n <= budget:
        t = np.linspace(0.0, 1.0, n + 1)
        lv = fn.log_eval(path(t))
        if not np.all(np.isfinite(lv.log_abs)):
            return None
        steps = _phase_steps(lv.phase, closed=False)
        if np.max(np.abs(steps)) < HALF_PI:
            return float(np.sum(steps))
        n *= 2
    return None


def circle_winding(fn, r: float, n0: int = 256, budget: int = 1 << 20) -> tuple:
    """(winding number, nodes used) of fn on |z| = r, counterclockwise."""
    fn = as_handle(fn)
    n = n0
    while n <= budget:
        th = np.arange(n) / n
        lv = fn.log_eval(r * np.exp(2j * np.pi * th))
        if not np.all(np.isfinite(lv.log_abs)):
            raise WindingError("function vanishes on the circle", r=r)
        steps = _phase_steps(lv.phase, closed=True)
        if np.max(np.abs(steps)) < HALF_PI:
            total = float(np.sum(steps)) / TWO_PI
            w = int(round(total))
            if abs(total - w) > 1e-6:
                raise WindingError("winding is not an integer", r=r, value=total)
            return w, n
        n *= 2
    raise WindingError(f"phase tracking exceeded {budget} nodes on |z| = {r}", r=r)


@dataclass
class CountReport:
    count: int
    eps: float
    eps_requested: float
    nudged: bool
    nodes_outer: int
    nodes_inner: int
    winding_outer: int
    winding_inner: int


def count_zeros_report(fn, eps: float, n0: int = 256, budget: int = 1 << 20, nudge: bool = True) -> CountReport:
    """Zeros of fn in the closed-off annulus e^{-2 pi eps} < |z| < e^{2 pi eps}.

    If the phase cannot be tracked on a bounding circle (a zero on or extremely
    near it), eps is nudged upward by at most 0.8% and the nudge is reported.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    fn = as_handle(fn)
    tries = [eps] + ([eps * (1 + 0.002 * k) for k in range(1, 5)] if nudge else [])
    last = None
    for e in tries:
        try:
            wo, no = circle_winding(fn, math.exp(TWO_PI * e), n0, budget)
            wi, ni = circle_winding(fn, math.exp(-TWO_PI * e), n0, budget)
        except WindingError as err:
            last = err
            continue
        return CountReport(wo - wi, e, eps, e != eps, no, ni, wo, wi)
    raise WindingError(f"winding failed for eps = {eps} and all nudges: {last}", eps=eps)


def count_zeros(fn, eps: float, **kw) -> int:
    return count_zeros_report(fn, eps, **kw).count


# ---------------------------------------------------------------------------
# location


@dataclass
class ZeroInventory:
    function_tag: str
    params: dict
    eps: float
    annulus: AnnulusSpec
    count: int
    zeros: np.ndarray
    residuals: np.ndarray
    multiplicities: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    pairings: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return int(sum(self.multiplicities)) == self.count and "partial" not in self.flags

    def to_dict(self) -> dict:
        return {
            "function_tag": self.function_tag,
            "params": self.params,
            "eps": self.eps,
            "annulus": self.annulus.to_dict(),
            "count": self.count,
            "zeros": [[float(z.real), float(z.imag)] for z in self.zeros],
            "residuals": [float(r) for r in self.residuals],
            "multiplicities": [int(m) for m in self.multiplicities],
            "flags": list(self.flags),
            "pairings": self.pairings,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def _cval(lv: LogValue, ref: float):
    return lv.phase * np.exp(lv.log_abs - ref)


def typical_scale(fn: AnalyticHandle, r: float, nodes: int = 64) -> float:
    """exp of the circle average of log|fn| on |z| = r (the size e^{n L_n} for cocycle functions)."""
    th = (np.arange(nodes) + 0.5) / nodes
    lv = fn.log_eval(r * np.exp(2j * np.pi * th))
    la = lv.log_abs[np.isfinite(lv.log_abs)]
    return float(np.mean(la)) if la.size else 0.0


def newton_polish(fn: AnalyticHandle, z0: complex, max_iter: int = 60) -> tuple:
    """Newton iteration with a central-difference derivative (step 1e-7 |z|).
    Returns (z, converged)."""
    z = complex(z0)
    for _ in range(max_iter):
        h = 1e-7 * abs(z)
        pts = np.array([z, z + h, z - h])
        lv = fn.log_eval(pts)
        if not np.isfinite(lv.log_abs[0]):
            return z, True
        ref = float(np.max(lv.log_abs[1:]))
        vals = _cval(lv, ref)
        deriv = (vals[1] - vals[2]) / (2 * h)
        if deriv == 0:
            return z, False
        step = vals[0] / deriv
        z = z - step
        if abs(step) < 1e-15 * abs(z):
            return z, True
    return z, abs(step) < 1e-11 * abs(z)


def log_residual(fn: AnalyticHandle, z: complex) -> float:
    """log10 of |fn(z)| relative to the typical scale on the circle |w| = |z|."""
    lv = fn.log_eval(np.array([z]))
    la = float(lv.log_abs[0])
    if not np.isfinite(la):
        return -math.inf
    return (la - typical_scale(fn, abs(z))) / math.log(10)


class _Rect:
    __slots__ = ("x0", "x1", "y0", "y1")

    def __init__(self, x0, x1, y0, y1):
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1

    @property
    def size(self):
        return max(self.x1 - self.x0, self.y1 - self.y0)

    def contains(self, phi: complex, pad: float = 0.0) -> bool:
        return (self.x0 - pad <= phi.real <= self.x1 + pad) and (self.y0 - pad <= phi.imag <= self.y1 + pad)


def _rect_count(fn: AnalyticHandle, rc: _Rect, n0: int = 32, budget: int = 1 << 13):
    """Zero count inside a rectangle of the phi-plane via the argument principle."""
    corners = [complex(rc.x0, rc.y0), complex(rc.x1, rc.y0), complex(rc.x1, rc.y1), complex(rc.x0, rc.y1)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        w = _edge_winding(fn, lambda t, a=a, b=b: np.exp(2j * np.pi * (a + t * (b - a))), n0, budget)
        if w is None:
            return None
        total += w
    val = total / TWO_PI
    k = int(round(val))
    if abs(val - k) > 1e-4:
        return None
    return k


def _split(fn, rc: _Rect):
    """Split a rectangle in two along its longer side, nudging the cut if it
    passes through a zero."""
    # off-centre first: a centred horizontal cut would run along |z| = 1, where
    # zeros of real-on-the-circle functions sit
    for frac in (0.5371, 0.4183, 0.6293, 0.5):
        if rc.x1 - rc.x0 >= rc.y1 - rc.y0:
            cut = rc.x0 + frac * (rc.x1 - rc.x0)
            parts = [_Rect(rc.x0, cut, rc.y0, rc.y1), _Rect(cut, rc.x1, rc.y0, rc.y1)]
        else:
            cut = rc.y0 + frac * (rc.y1 - rc.y0)
            parts = [_Rect(rc.x0, rc.x1, rc.y0, cut), _Rect(rc.x0, rc.x1, cut, rc.y1)]
        counts = [_rect_count(fn, p) for p in parts]
        if all(c is not None for c in counts):
            return list(zip(parts, counts))
    return None


def _search(fn: AnalyticHandle, root: _Rect, root_count: int, newton_size: float, min_size: float, max_cells: int):
    found = []  # (z, multiplicity)
    flags = []
    queue = [(root, root_count)]
    cells = 0
    while queue:
        rc, cnt = queue.pop()
        cells += 1
        if cnt <= 0:
            continue
        if cells > max_cells:
            flags.append("partial")
            break
        if cnt == 1 and rc.size <= newton_size:
            phi0 = complex((rc.x0 + rc.x1) / 2, (rc.y0 + rc.y1) / 2)
            z, ok = newton_polish(fn, complex(np.exp(2j * np.pi * phi0)))
            if ok:
                phi = complex(phase_of_z(z))
                # bring the real part into the cell's period before testing containment
                shift = round((rc.x0 + rc.x1) / 2 - phi.real)
                phi = complex(phi.real + shift, phi.imag)
                if rc.contains(phi, pad=1e-9):
                    found.append((z, 1))
                    continue
        if rc.size < min_size:
            phi0 = complex((rc.x0 + rc.x1) / 2, (rc.y0 + rc.y1) / 2)
            found.append((complex(np.exp(2j * np.pi * phi0)), cnt))
            if cnt > 1:
                flags.append("cluster")
            continue
        parts = _split(fn, rc)
        if parts is None:
            flags.append("unresolved_cell")
            phi0 = complex((rc.x0 + rc.x1) / 2, (rc.y0 + rc.y1) / 2)
            found.append((complex(np.exp(2j * np.pi * phi0)), cnt))
            continue
        queue.extend(parts)
    return found, flags


def _finalize(fn, tag, eps, count, found, flags, extra=None) -> ZeroInventory:
    order = sorted(range(len(found)), key=lambda i: (round(float(np.mod(np.angle(found[i][0]), TWO_PI)), 12), abs(found[i][0])))
    zs = np.array([found[i][0] for i in order], dtype=np.complex128)
    mult = [found[i][1] for i in order]
    res = np.array([log_residual(fn, z) for z in zs]) if zs.size else np.zeros(0)
    res = np.power(10.0, res)
    if int(sum(mult)) != count and "partial" not in flags:
        flags = flags + ["count_mismatch"]
    inv = ZeroInventory(tag, dict(fn.params), float(eps), annulus_from_eps(eps), int(count), zs, res, mult, sorted(set(flags)))
    if extra:
        inv.pairings.update(extra)
    return inv


def _safe_x0(fn, x0: float, eps: float, span: float):
    """A cut position near x0 whose vertical segment across the strip carries
    no zero (phase trackable)."""
    for k in range(12):
        x = x0 + span * (0.0 if k == 0 else (0.0731 * k) % 1.0)
        seg = _edge_winding(fn, lambda t, x=x: np.exp(2j * np.pi * (x + 1j * (-eps + 2 * eps * t))), 16, 1 << 14)
        if seg is not None:
            return x
    return None


def locate_zeros(fn, eps: float, hint_q: int | None = None, newton_size: float | None = None,
                 min_size: float = 1e-9, max_cells: int = 20000) -> ZeroInventory:
    """Locate all zeros in A_{e^{2 pi eps}} by rectangle subdivision in the phase
    plane and Newton polishing.  With ``hint_q`` only one sector of angle 1/q is
    searched and the result is replicated by rotation and re-polished."""
    fn = as_handle(fn)
    rep = count_zeros_report(fn, eps)
    eps_used = rep.eps
    count = rep.count
    if newton_size is None:
        newton_size = min(0.02, eps_used / 2) if hint_q is None else min(0.3 / hint_q, eps_used / 2)
    if hint_q:
        q = int(hint_q)
        for shift in (0.0, 0.137, 0.291, 0.423):
            x0 = _safe_x0(fn, shift / q, eps_used, 0.1 / q)
            if x0 is None:
                continue
            root = _Rect(x0, x0 + 1.0 / q, -eps_used, eps_used)
            c = _rect_count(fn, root)
            if c is None:
                continue
            if c * q != count:
                break
            found, flags = _search(fn, root, c, newton_size, min_size, max_cells)
            if sum(m for _, m in found) != c:
                break
            reps = []
            for z, m in found:
                for j in range(q):
                    zj = z * np.exp(2j * np.pi * j / q)
                    zp, ok = newton_polish(fn, zj)
                    reps.append((zp if ok else zj, m))
            return _finalize(fn, fn.tag, eps_used, count, reps, flags + ["sector_search"], {"rotation_order": q})
    x0 = _safe_x0(fn, 0.0, eps_used, 0.05) or 0.0
    root = _Rect(x0, x0 + 1.0, -eps_used, eps_used)
    found, flags = _search(fn, root, count, newton_size, min_size, max_cells)
    return _finalize(fn, fn.tag, eps_used, count, found, flags)


# ---------------------------------------------------------------------------
# structure checks


def _nearest(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    if points.size == 0 or targets.size == 0:
        return np.full(points.shape, np.inf)
    return np.min(np.abs(points[:, None] - targets[None, :]), axis=1)


def conj_closure(inv: ZeroInventory) -> float:
    """max over zeros z of the distance from 1/conj(z) to the inventory."""
    z = inv.zeros
    if z.size == 0:
        return 0.0
    return float(np.max(_nearest(1 / np.conj(z), z)))


def rotation_closure(inv: ZeroInventory, p: int, q: int) -> float:
    z = inv.zeros
    if z.size == 0:
        return 0.0
    return float(np.max(_nearest(z * np.exp(2j * np.pi * p / q), z)))


def rotation_orbits(ws: np.ndarray, q: int, tol: float) -> list:
    """Greedy decomposition into orbits {w e^{2 pi i j / q}} matched within tol."""
    remaining = list(range(ws.size))
    orbits = []
    while remaining:
        i0 = remaining[0]
        w = ws[i0]
        members = [i0]
        pool = [i for i in remaining if i != i0]
        for j in range(1, q):
            if not pool:
                break
            target = w * np.exp(2j * np.pi * j / q)
            d = np.abs(ws[pool] - target)
            k = int(np.argmin(d))
            if d[k] > tol:
                break
            members.append(pool.pop(k))
        if len(members) != q:
            raise ZeroStructureError("zeros do not decompose into rotation orbits of size q", q=q)
        orbits.append(members)
        remaining = [i for i in remaining if i not in members]
    return orbits


@dataclass
class RationalStructure:
    z1: complex
    z2: complex
    count: int
    q: int
    count_check: bool
    r1r2: float
    rotation_residual: float
    inventory: ZeroInventory


def rational_zero_structure(E: float, v: Potential, cf: ContinuedFraction, n_conv: int, eps: float | None = None) -> RationalStructure:
    """Generators z1, z2 (r1 >= 1 >= r2) of the zeros of f^{p/q}_q on A_{e^{2 pi eps}}."""
    p, q = cf.p(n_conv), cf.q(n_conv)
    eps = v.eps0 / 2 if eps is None else eps
    fn = TraceHandle(E, v, (p, q), q, tag=f"f^{p}/{q}_{q}")
    count = count_zeros(fn, eps)
    if count != 2 * q:
        raise ZeroStructureError(f"count {count} != 2q = {2 * q}", count=count, q=q)
    inv = locate_zeros(fn, eps, hint_q=q)
    orbits = rotation_orbits(inv.zeros, q, tol=1e-6)
    reps = [inv.zeros[o[0]] for o in orbits]
    reps.sort(key=lambda z: -abs(z))
    z1, z2 = reps[0], reps[-1]
    resid = rotation_closure(inv, p, q)
    return RationalStructure(complex(z1), complex(z2), count, q, True, abs(z1) * abs(z2), resid, inv)


@dataclass
class RoucheReport:
    pairs: list
    max_displacement: float
    bound: float
    all_paired: bool
    double_balls: int
    omega_count: int
    rational_count: int
    telescoping_sup: float
    telescoping_bound: float
    telescoping_ok: bool
    periodicity_defect: float
    premise_norm_ok: bool
    L: float


def rouche_transfer(E: float, v: Potential, cf: ContinuedFraction, n_conv: int, delta: float,
                    L: float | None = None, grid: int = 2048) -> RoucheReport:
    """Pair zeros of f^omega_q with those of f^{p/q}_q inside e^{-delta q} balls on A_{e^{2 pi delta}}
    and evaluate the telescoping premise on the two boundary circles."""
    p, q = cf.p(n_conv), cf.q(n_conv)
    w = cf.omega_float
    if L is None:
        L = cocycle.lyapunov_finite(E, v, cf, 0.0, 2000, 256)
    f_w = TraceHandle(E, v, cf, q, tag=f"f^omega_{q}")
    f_r = TraceHandle(E, v, (p, q), q, tag=f"f^{p}/{q}_{q}")
    inv_w = locate_zeros(f_w, delta)
    inv_r = locate_zeros(f_r, delta, hint_q=q)
    radius = math.exp(-delta * q)
    A, B = inv_w.zeros, inv_r.zeros
    pairs = []
    maxd = 0.0
    if A.size and B.size:
        D = np.abs(A[:, None] - B[None, :])
        ri, ci = linear_sum_assignment(D)
        for i, j in zip(ri, ci):
            pairs.append((complex(A[i]), complex(B[j]), float(D[i, j])))
        maxd = max(d for _, _, d in pairs)
        per_ball = (D <= radius).sum(axis=0)
        doubles = int(np.sum(per_ball >= 2))
    else:
        doubles = 0
    all_paired = A.size == B.size and all(d <= radius for _, _, d in pairs)

    # telescoping premise on the boundary circles
    sup = 0.0
    th = np.arange(grid) / grid
    for r in (math.exp(TWO_PI * delta), math.exp(-TWO_PI * delta)):
        z = r * np.exp(2j * np.pi * th)
        a, b = f_w.log_eval(z), f_r.log_eval(z)
        ref = float(max(a.log_abs.max(), b.log_abs.max()))
        diff = np.abs(_cval(a, ref) - _cval(b, ref))
        sup = max(sup, float(np.max(diff)) * math.exp(ref))
    normq = float(cf.norm_qk(n_conv))
    tbound = math.exp((L + TWO_PI * delta + delta) * q) * normq

    # almost periodicity: matched displacement should be a common rotation per family
    defect = 0.0
    if pairs:
        ang = np.array([np.angle(a / b) for a, b, _ in pairs])
        rad = np.array([abs(a) - abs(b) for a, b, _ in pairs])
        defect = float(max(np.ptp(ang) if ang.size else 0.0, np.ptp(rad) if rad.size else 0.0))
    premise = normq <= math.exp(-30 * delta * q)
    return RoucheReport(pairs, maxd, radius, bool(all_paired), doubles, int(inv_w.count), int(inv_r.count),
                        sup, tbound, sup <= tbound, defect, premise, float(L))


def reflect(z, omega: float, n: int):
    """z -> e^{-2 pi i (n-1) omega} / z."""
    return np.exp(-2j * np.pi * (n - 1) * omega) / np.asarray(z, dtype=np.complex128)


def reflection_identity_residual(fn: AnalyticHandle, omega: float, n: int, nodes: int = 1000, r: float = 1.0) -> float:
    """max |f(z) - f(reflect(z))| / max |f| over a circle grid."""
    th = np.arange(nodes) / nodes
    z = r * np.exp(2j * np.pi * th)
    a, b = fn.log_eval(z), fn.log_eval(reflect(z, omega, n))
    ref = float(a.log_abs.max())
    return float(np.max(np.abs(_cval(a, ref) - _cval(b, ref))))


@dataclass
class ReflectionReport:
    paired: bool
    min_gap: float
    identity_residual: float
    closure: float
    reference_gap: float | None


def reflection_pairing(inventory: ZeroInventory, omega, n: int, fn: AnalyticHandle | None = None,
                       delta: float | None = None, tol: float = 1e-8, max_identity_residual: float = 1e-6) -> ReflectionReport:
    """Check f(z) = f(e^{-2 pi i (n-1) omega}/z) and closure of the inventory under that map."""
    w = omega_value(omega)
    resid = reflection_identity_residual(fn, w, n) if fn is not None else 0.0
    if fn is not None and resid > max_identity_residual:
        raise ReflectionError(f"reflection identity residual {resid:.3e}: potential not even or indexing bug",
                              residual=resid)
    z = inventory.zeros
    if z.size == 0:
        return ReflectionReport(True, math.inf, resid, 0.0, None)
    img = reflect(z, w, n)
    closure = float(np.max(_nearest(img, z)))
    gap = float(np.min(np.abs(img - z)))
    ref = math.exp(-delta * n / 25) if delta is not None else None
    return ReflectionReport(closure <= tol * max(1.0, float(np.max(np.abs(z)))), gap, resid, closure, ref)


def default_eps1(eta: float, eps0: float) -> float:
    return 2 * eta / (1 + 2 * eta) * eps0


def g_level_zero_report(E: float, v: Potential, omega, m: int, delta: float, eps1: float,
                        Lm: float | None = None, grid_size: int = 1024) -> dict:
    if Lm is None:
        Lm = cocycle.lyapunov_finite(E, v, omega, 0.0, m, grid_size)
    level_log = 2 * m * (Lm - delta)
    fn = GLevelHandle(E, v, omega, m, level_log)
    rep = count_zeros_report(fn, eps1)
    return {"count": rep.count, "eps1": rep.eps, "nudged": rep.nudged, "L_m": Lm, "level_log": level_log}


def g_level_zero_count(E: float, v: Potential, omega, m: int, delta: float, eps1: float, **kw) -> int:
    """Zeros of g_m - e^{2m(L_m - delta)} in A_{e^{2 pi eps1}}."""
    return g_level_zero_report(E, v, omega, m, delta, eps1, **kw)["count"]

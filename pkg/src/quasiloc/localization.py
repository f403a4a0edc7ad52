"""Finite-box eigenpairs of H on [-N, N] with Dirichlet boundary, the
Green's function expansion, resonant partitions and decay audits.

Box eigenvectors from LAPACK carry absolute errors near 1e-16 of their
maximum, so entries far down the tails are rebuilt by running the
recursion phi_{n-1} = (E - v_n) phi_n - phi_{n+1} inward from each Dirichlet
edge, where it is stable, and matching it to the LAPACK vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels as K
from .arithmetic import ContinuedFraction, classify_scales
from .cocycle import dirichlet_det, omega_value, trace_f
from .errors import PartitionError, ResonantIntervalError, UnderflowRangeError
from .model import PaperConstants, Potential

LOG_FLOOR = math.log(1e-300)
TAIL_THRESHOLD = 1e-8


def box_potential(v: Potential, omega, theta: float, N: int) -> np.ndarray:
    """v(theta + n omega) for n = -N..N."""
    n = np.arange(-N, N + 1)
    return np.asarray(v(theta + n * omega_value(omega))).real.astype(np.float64)


def harvest_energy(v: Potential, omega, theta: float = 0.1, sites: int = 1000) -> float:
    """Median eigenvalue of the box of ``sites`` sites starting at -sites/2."""
    w = omega_value(omega)
    n = np.arange(-(sites // 2), sites - sites // 2)
    d = np.asarray(v(theta + n * w)).real.astype(np.float64)
    ev = eigh_tridiagonal(d, np.ones(d.size - 1), eigvals_only=True)
    return float(ev[ev.size // 2])


@dataclass
class EigenPair:
    """phi on [-N, N], normalized so max(|phi_0|, |phi_{-1}|) = 1.

    ``log_abs`` and ``sign`` carry phi exactly; ``phi`` is the clipped float
    view.  ``center_weight`` is max(|phi_0|, |phi_{-1}|) / max|phi| before
    normalization.
    """

    E: float
    N: int
    theta: float
    omega: float
    v: Potential
    log_abs: np.ndarray = field(repr=False)
    sign: np.ndarray = field(repr=False)
    residual: float = 0.0
    boundary_weight: float = 0.0
    center_weight: float = 0.0
    tail_match: float = 0.0

    @property
    def phi(self) -> np.ndarray:
        return self.sign * np.exp(np.clip(self.log_abs, LOG_FLOOR, 690.0))

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def index(self, y):
        return np.asarray(y) + self.N

    def log_at(self, y):
        return self.log_abs[self.index(y)]

    def to_csv(self, bound_rate: float | None = None) -> str:
        rows = ["y,phi_y,log_abs_phi_y,bound_y"]
        for y, s, la in zip(self.sites, self.sign, self.log_abs):
            b = "" if bound_rate is None else f"{math.exp(-bound_rate * abs(y)):.15g}"
            rows.append(f"{y},{s * math.exp(max(la, LOG_FLOOR)):.15g},{la:.15g},{b}")
        return "\n".join(rows) + "\n"

    def to_dict(self) -> dict:
        return {"E": self.E, "N": self.N, "theta": self.theta, "omega": self.omega,
                "v": list(self.v.cosine_coeffs), "residual": self.residual,
                "boundary_weight": self.boundary_weight, "center_weight": self.center_weight,
                "tail_match": self.tail_match}


def _tail(E: float, vv: np.ndarray, u: np.ndarray, pos: int, direction: int):
    """Rebuild entries beyond index ``pos`` in the given direction (+1 right)."""
    n = u.size
    if direction > 0:
        path = np.arange(n - 1, pos - 1, -1)  # edge inward
    else:
        path = np.arange(0, pos + 1)
    mant, logs = K.recur_inward(float(E), np.ascontiguousarray(vv[path]), 1.0)
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(mant)) + logs
    sg = np.sign(mant)
    # match at the last path entry (index pos)
    shift = math.log(abs(u[pos])) - la[-1]
    s0 = np.sign(u[pos]) * sg[-1]
    la = la + shift
    sg = sg * s0
    # agreement with LAPACK on a few entries next to the match point, inside the trusted zone
    k = min(5, path.size - 1)
    ref = u[path[-1 - k:]]
    mine = sg[-1 - k:] * np.exp(la[-1 - k:])
    match = float(np.max(np.abs(mine - ref) / np.maximum(np.abs(ref), 1e-300)))
    return path, la, sg, match


def _build_pair(E: float, u: np.ndarray, vv: np.ndarray, N: int, theta: float, omega: float, v: Potential,
                tail_threshold: float) -> EigenPair:
    mx = np.max(np.abs(u))
    big = np.nonzero(np.abs(u) >= tail_threshold * mx)[0]
    pL, pR = int(big[0]), int(big[-1])
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(u))
    sg = np.sign(u)
    match = 0.0
    if pR < u.size - 1:
        path, l2, s2, m2 = _tail(E, vv, u, pR, +1)
        la[path] = l2
        sg[path] = s2
        match = max(match, m2)
    if pL > 0:
        path, l2, s2, m2 = _tail(E, vv, u, pL, -1)
        la[path] = l2
        sg[path] = s2
        match = max(match, m2)
    c = max(la[N], la[N - 1])
    center_weight = math.exp(c - math.log(mx))
    la = la - c
    # residual of H phi = E phi on interior sites, relative to max |phi|
    ph = sg * np.exp(np.clip(la, LOG_FLOOR, 690.0))
    hp = vv * ph
    hp[1:] += ph[:-1]
    hp[:-1] += ph[1:]
    res = float(np.max(np.abs(hp - E * ph)[1:-1]) / np.max(np.abs(ph)))
    bw = float(max(abs(ph[0]), abs(ph[-1])) / np.max(np.abs(ph)))
    return EigenPair(float(E), int(N), float(theta), float(omega), v, la, sg, res, bw, center_weight, match)


def eigen_solve_box(v: Potential, omega, theta: float, N: int, window=(-np.inf, np.inf),
                    tail_threshold: float = TAIL_THRESHOLD) -> list:
    """Eigenpairs of H on [-N, N] (Dirichlet) with E in ``window``."""
    if N > 10 ** 4:
        raise ValueError("N must be <= 1e4 for the dense tridiagonal solve")
    w = omega_value(omega)
    vv = box_potential(v, w, theta, N)
    off = np.ones(vv.size - 1)
    lo, hi = float(window[0]), float(window[1])
    if np.isfinite(lo) or np.isfinite(hi):
        bound = 2 + v.sup_bound + 1
        lo = max(lo, -bound)
        hi = min(hi, bound)
        if lo >= hi:
            return []
        try:
            ev, vecs = eigh_tridiagonal(vv, off, select="v", select_range=(lo, hi))
        except np.linalg.LinAlgError:
            return []
    else:
        ev, vecs = eigh_tridiagonal(vv, off)
    return [_build_pair(float(ev[j]), vecs[:, j], vv, N, theta, w, v, tail_threshold) for j in range(ev.size)]


def top_normalized_pair(pairs: list) -> EigenPair:
    """The pair whose mass sits most at the origin (largest center_weight; ties to lower E)."""
    if not pairs:
        raise ValueError("no eigenpairs")
    return max(pairs, key=lambda p: (p.center_weight, -p.E))


# ----------------------------------------------------------- Green expansion

def _logP(pair: EigenPair, k: int, start: int):
    if k == 0:
        return 0.0, 1.0
    lv = dirichlet_det(pair.E, pair.v, pair.omega, pair.theta + start * pair.omega, k)
    return float(lv.log_abs), float(np.sign(complex(lv.phase).real))


def green_expansion_terms(pair: EigenPair, m1: int, m2: int, h: int) -> dict:
    """Two-term Cramer representation of phi_h from the interval [m1, m2]:

        phi_h = [P_{m2-h}(theta+(h+1)w) phi_{m1-1} + P_{h-m1}(theta+m1 w) phi_{m2+1}] / P_{m2-m1+1}(theta+m1 w)
    """
    if not m1 <= h <= m2:
        raise ValueError("need m1 <= h <= m2")
    if m1 - 1 < -pair.N or m2 + 1 > pair.N:
        raise ValueError("interval and its neighbours must lie inside the box")
    lD, sD = _logP(pair, m2 - m1 + 1, m1)
    if lD < LOG_FLOOR:
        raise ResonantIntervalError(f"|P| = e^{lD:.1f} on [{m1}, {m2}]", m1=m1, m2=m2, log_det=lD)
    lA, sA = _logP(pair, m2 - h, h + 1)
    lB, sB = _logP(pair, h - m1, m1)
    la = float(pair.log_at(m1 - 1) + lA - lD)
    lb = float(pair.log_at(m2 + 1) + lB - lD)
    sa = sA * sD * pair.sign[pair.index(m1 - 1)]
    sb = sB * sD * pair.sign[pair.index(m2 + 1)]
    return {"log_det": lD, "log_a": la, "sign_a": float(sa), "log_b": lb, "sign_b": float(sb)}


def green_expansion_residual(pair: EigenPair, m1: int, m2: int, h: int) -> float:
    """|phi_h - expansion| / (|phi_h| + floor), computed in log-scaled form."""
    t = green_expansion_terms(pair, m1, m2, h)
    lh = float(pair.log_at(h))
    sh = float(pair.sign[pair.index(h)])
    ref = max(lh, t["log_a"], t["log_b"])
    diff = sh * math.exp(lh - ref) - t["sign_a"] * math.exp(t["log_a"] - ref) - t["sign_b"] * math.exp(t["log_b"] - ref)
    return abs(diff) / (math.exp(lh - ref) + np.finfo(float).eps)


def is_nonresonant_interval(pair: EigenPair, m1: int, m2: int, L: float, delta: float) -> bool:
    """(1/len) log |P_len(theta + m1 w)| >= L - delta."""
    k = m2 - m1 + 1
    lD, _ = _logP(pair, k, m1)
    return lD / k >= L - delta


def random_nonresonant_intervals(pair: EigenPair, count: int, L: float, delta: float, seed: int = 0,
                                 lengths=(10, 200), max_tries: int = 100000) -> list:
    """Deterministic draw of (m1, m2, h) triples on non-resonant intervals."""
    rng = np.random.default_rng(seed)
    out = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        k = int(rng.integers(lengths[0], lengths[1] + 1))
        m1 = int(rng.integers(-pair.N + 1, pair.N - k))
        m2 = m1 + k - 1
        if m2 + 1 > pair.N:
            continue
        if is_nonresonant_interval(pair, m1, m2, L, delta):
            out.append((m1, m2, int(rng.integers(m1, m2 + 1))))
    return out


# ------------------------------------------------------------- partitions

@dataclass
class ResonantPartition:
    n: int
    q: int
    half_width: float
    branch: str
    regimes: list
    weak_regimes: list
    window: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _is_weak_pair(q_small: int, q_big: int, delta1: float) -> bool:
    """q_big < e^{delta1 q_small}; ties count as strong, as in classify_scales."""
    return math.log(q_big) < delta1 * q_small


def resonant_partition(cf: ContinuedFraction, n: int, constants: PaperConstants, window: int) -> ResonantPartition:
    """Strongly resonant regimes R_{l q_n} for |l| <= window / q_n and the weak regimes between them,
    all as integer intervals clipped to [-window, window]."""
    q = cf.q(n)
    d14 = constants.working_delta1 ** 0.25
    if _is_weak_pair(cf.q(n - 1), q, constants.working_delta1):
        half, branch = 10 * d14 * q, "q_n <= exp(delta1 q_(n-1))"
    else:
        half, branch = 10 * d14 * q ** (1 - constants.working_c0), "q_n > exp(delta1 q_(n-1))"
    lmax = window // q
    regimes = []
    for ell in range(-lmax, lmax + 1):
        lo = max(math.ceil(ell * q - half), -window)
        hi = min(math.floor(ell * q + half), window)
        if lo <= hi:
            regimes.append((ell, lo, hi))
    for (_, _, h0), (_, l1, _) in zip(regimes, regimes[1:]):
        if l1 <= h0:
            raise PartitionError("resonant regimes overlap; the working delta_1 is too large", half_width=half)
    weak = []
    edges = [(None, -window - 1, -window - 1)] + regimes + [(None, window + 1, window + 1)]
    for (_, _, h0), (_, l1, _) in zip(edges, edges[1:]):
        if h0 + 1 <= l1 - 1:
            weak.append((h0 + 1, l1 - 1))
    return ResonantPartition(int(n), int(q), float(half), branch, regimes, weak, int(window))


def partition_covers(part: ResonantPartition) -> bool:
    """Strong and weak regimes tile [-window, window] exactly."""
    cells = sorted([(lo, hi) for _, lo, hi in part.regimes] + list(part.weak_regimes))
    pos = -part.window
    for lo, hi in cells:
        if lo != pos or hi < lo:
            return False
        pos = hi + 1
    return pos == part.window + 1


def _window_max(pair: EigenPair, lo: int, hi: int) -> float:
    lo = max(lo, -pair.N)
    hi = min(hi, pair.N)
    return float(np.max(pair.log_abs[pair.index(lo):pair.index(hi) + 1]))


def peak_profile(pair: EigenPair, partition: ResonantPartition, L: float, beta_n: float = 0.0,
                 C_v: float = 1.0, delta1_quarter: float | None = None) -> dict:
    """Peaks r_{l q_n}, their decay ratios log r / (|l| q_n) against
    -(1 - 1/50)(L - beta_n), and the weak-regime domination check."""
    q = partition.q
    target = -(1 - 1 / 50) * (L - beta_n)
    peaks, ratios, passes = {}, {}, {}
    for ell, lo, hi in partition.regimes:
        if hi < -pair.N or lo > pair.N:
            continue
        peaks[ell] = _window_max(pair, lo, hi)
        if ell != 0:
            ratios[ell] = peaks[ell] / (abs(ell) * q)
            passes[ell] = ratios[ell] <= target
    vacuous = L - beta_n <= 0
    # weak regimes: |phi_y| <= max over adjacent regimes of e^{-(L - 2000 C_v d14) dist} r
    d14 = delta1_quarter if delta1_quarter is not None else 0.0
    rate = L - 2000 * C_v * d14
    violations = []
    reg = [(ell, lo, hi) for ell, lo, hi in partition.regimes if ell in peaks]
    for (e0, l0, h0), (e1, l1, h1) in zip(reg, reg[1:]):
        for y in range(h0 + 1, l1):
            if abs(y) > pair.N:
                continue
            b = max(peaks[e0] - rate * (y - h0), peaks[e1] - rate * (l1 - y))
            if pair.log_at(y) > b + 1e-12:
                violations.append(int(y))
    return {"peaks_log": peaks, "ratios": ratios, "target_ratio": target, "pass": passes,
            "vacuous": vacuous, "weak_domination_violations": violations,
            "caveat": "finite box; asymptotic o(1) terms replaced by 1/50"}


# ------------------------------------------------------------------ gluing

def _star(cf: ContinuedFraction, k: int, constants: PaperConstants) -> float:
    if k - 2 < 0 or _is_weak_pair(cf.q(k - 2), cf.q(k - 1), constants.working_delta1):
        return cf.q(k - 1) / 10
    return cf.q(k - 1) ** (1 - constants.working_c0)


def scale_gluing(cf: ContinuedFraction, k: int, constants: PaperConstants) -> dict:
    """Case table for scales (k-1, k): decay segments and the gap check at their junction."""
    d1 = constants.working_delta1
    c0 = constants.working_c0
    qk, qk1 = cf.q(k), cf.q(k + 1)
    weak_k = _is_weak_pair(cf.q(k - 1), qk, d1)   # q_k <= e^{d1 q_{k-1}}
    weak_k1 = _is_weak_pair(qk, qk1, d1)          # q_{k+1} <= e^{d1 q_k}
    case = {(True, True): 1, (False, True): 2, (True, False): 3, (False, False): 4}[(weak_k, weak_k1)]
    star = _star(cf, k, constants)
    joint = qk / 10 if weak_k else qk ** (1 - c0)
    top = qk1 / 10 if weak_k1 else qk1 ** (1 - c0)
    first = "weak" if weak_k else "strong"
    second = "weak" if weak_k1 else "strong"
    segs = [(star, joint, first, k - 1), (joint, top, second, k)]
    gap_free = segs[0][1] >= segs[1][0] and all(a <= b for a, b, _, _ in segs)
    return {"k": k, "case": case, "segments": segs, "gap_free": gap_free}


def decay_windows(cf: ContinuedFraction, constants: PaperConstants, y_max: float) -> list:
    """Glued decay segments (lo, hi, kind, scale) up to y_max."""
    out = []
    for k in range(2, cf.depth - 1):
        g = scale_gluing(cf, k, constants)
        seg = g["segments"][1] if out else g["segments"][0]
        if not out:
            out.append(seg)
            seg = g["segments"][1]
        out.append(seg)
        if seg[1] > y_max:
            break
    return out


def decay_audit(pair: EigenPair, cf: ContinuedFraction, constants: PaperConstants, y_range, L: float,
                beta_n: float | None = None) -> dict:
    """Fit of log|phi_y| against |y| on the range and the violations of the
    applicable bound: e^{-L|y|/40} on weak-scale segments and
    e^{-(1-1/50)(L-beta_n)|y|} on strong-scale segments."""
    y_lo, y_hi = int(y_range[0]), int(y_range[1])
    if not 0 <= y_lo <= y_hi <= pair.N:
        raise ValueError("range must satisfy 0 <= y_lo <= y_hi <= N")
    ys = np.arange(y_lo, y_hi + 1)
    ys = np.concatenate([-ys[::-1], ys]) if y_lo > 0 else np.concatenate([-ys[:0:-1], ys])
    la = pair.log_abs[pair.index(ys)]
    ok = la > LOG_FLOOR
    if not np.any(ok):
        raise UnderflowRangeError("all |phi_y| in range below the double-precision floor", y_range=[y_lo, y_hi])
    slope, _ = np.polyfit(np.abs(ys[ok]).astype(float), la[ok], 1)
    beta_n = constants.beta if beta_n is None else beta_n
    windows = decay_windows(cf, constants, y_hi)
    weak_rate = L / 40
    strong_rate = (1 - 1 / 50) * (L - beta_n)
    violations = []
    weak_violations = []
    labels = {}
    for y, l in zip(ys, la):
        ay = abs(int(y))
        kind = "weak"
        for lo, hi, kd, _ in windows:
            if lo <= ay <= hi:
                kind = kd
                break
        rate = weak_rate if kind == "weak" else strong_rate
        labels[kind] = labels.get(kind, 0) + 1
        if l > -rate * ay + 1e-12:
            violations.append(int(y))
        if l > -weak_rate * ay + 1e-12:
            weak_violations.append(int(y))
    return {"fitted_rate": float(-slope), "bound_rate": weak_rate, "strong_rate": strong_rate,
            "violations": violations, "weak_bound_violations": weak_violations, "segments": [list(s) for s in windows], "labels": labels,
            "fit_points": int(ok.sum())}


# ------------------------------------------------------------ trace probe

def trace_resonance_probe(pair: EigenPair, cf: ContinuedFraction, n: int, delta: float, L: float,
                          beta_n: float | None = None, inventory=None, ladder=(1, 2, 3)) -> dict:
    """v_{q_n} = q_n^{-1} log|f_{q_n}| at theta - [q_n/2] omega against L - beta_n - 12 delta,
    the distance from that point to the nearest zero of f_{q_n}, and the ladder values
    at theta + (k q_n - [q_n/2]) omega against L + log|k|/q_n - beta_n - 12 delta."""
    q = cf.q(n)
    w = cf.omega_float
    beta_n = cf.beta(n) if beta_n is None else beta_n
    c = pair.theta - (q // 2) * w
    f0 = trace_f(pair.E, pair.v, w, c, q)
    v0 = float(f0.log_abs) / q
    thr = L - beta_n - 12 * delta
    if inventory is None:
        from .zeros import TraceHandle, locate_zeros
        inventory = locate_zeros(TraceHandle(pair.E, pair.v, w, q), pair.v.eps0 / 2, hint_q=q)
    zs = np.asarray(list(getattr(inventory, "zeros", inventory)), dtype=np.complex128)
    if zs.size == 0:
        raise ValueError("zero inventory unavailable at this scale")
    z0 = np.exp(2j * np.pi * c)
    prox = float(np.min(np.abs(zs - z0)))
    rungs = {}
    for k in ladder:
        for kk in (k, -k):
            th = pair.theta + (kk * q - q // 2) * w
            val = float(trace_f(pair.E, pair.v, w, th, q).log_abs) / q
            bound = L + math.log(abs(kk)) / q - beta_n - 12 * delta
            rungs[kk] = {"value": val, "bound": bound, "exceeds": val > bound}
    below = v0 < thr
    near = prox < math.exp(-delta * q)
    return {"q": q, "v_at_center": v0, "threshold": thr, "below": below, "zero_proximity": prox,
            "near_zero": near, "consistent": below == near, "ladder": rungs}


def scale_cases(cf: ContinuedFraction, constants: PaperConstants) -> list:
    """Labels of the four-case table for every stored scale."""
    return [s.case for s in classify_scales(cf, constants.working_delta1)]

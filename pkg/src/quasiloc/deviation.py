"""Large-deviation sets of v_m = (2m)^{-1} log g_m, Fejer kernel estimates
and Fourier diagnostics for v_m.

The deviation set is B = {theta : v_m(theta) < L_m - delta}.  Its arcs are
located by sign changes on a uniform grid and refined by bisection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import ContinuedFraction, torus_norm
from .cocycle import log_norms, omega_value, theta_grid, vm_values
from .errors import AliasingError, BandRegimeError
from .model import Potential

ENDPOINT_TOL = 1e-12
MAX_GRID = 1 << 18
MIN_TOL = 1e-15  # golden-section resolution, near the spacing of doubles in [0, 1)


@dataclass
class DeviationSet:
    """Sublevel set {v_m < level} as disjoint arcs on [0, 1).

    Each arc is (start, end) with start in [0, 1) and end > start; an arc with
    end > 1 wraps through 0.
    """

    m: int
    delta: float
    L_m: float
    level: float
    arcs: list
    total_measure: float
    grid: int
    flags: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    samples: tuple | None = field(default=None, repr=False)

    @property
    def component_count(self) -> int:
        return len(self.arcs)

    def grid_measure(self) -> float:
        """Fraction of grid samples below the level."""
        if self.samples is None:
            return float("nan")
        return float(np.mean(self.samples[1] < self.level))

    def to_dict(self) -> dict:
        return {
            "m": self.m, "delta": self.delta, "L_m": self.L_m, "level": self.level,
            "arcs": [[a, b] for a, b in self.arcs], "measures": [b - a for a, b in self.arcs],
            "total_measure": self.total_measure, "component_count": self.component_count,
            "grid": self.grid, "flags": list(self.flags), "params": dict(self.params),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def to_csv(self) -> str:
        if self.samples is None:
            return "theta,v_m\n"
        rows = ["theta,v_m"]
        rows += [f"{t:.12g},{x:.15g}" for t, x in zip(*self.samples)]
        return "\n".join(rows) + "\n"


def _bisect(func, lo: np.ndarray, hi: np.ndarray, s_lo: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized bisection for roots of func in [lo, hi] with sign s_lo at lo."""
    lo = lo.copy()
    hi = hi.copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        s = np.sign(func(mid))
        same = s == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _crossings(vals: np.ndarray, level: float) -> np.ndarray:
    below = vals < level
    return np.nonzero(below != np.roll(below, -1))[0]


def _golden_min(func, lo: np.ndarray, hi: np.ndarray, tol: float):
    """Vectorized golden-section search; returns (argmin, min)."""
    g = (math.sqrt(5) - 1) / 2
    a, b = lo.copy(), hi.copy()
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = func(c), func(d)
    while a.size and np.max(b - a) > tol:
        left = fc < fd
        # left: [a, d] with d <- c ; right: [c, b] with c <- d
        a_new = np.where(left, a, c)
        b_new = np.where(left, d, b)
        keep = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        probe = np.where(left, b_new - g * (b_new - a_new), a_new + g * (b_new - a_new))
        fprobe = func(probe)
        c = np.where(left, probe, keep)
        d = np.where(left, keep, probe)
        fc = np.where(left, fprobe, fkeep)
        fd = np.where(left, fkeep, fprobe)
        a, b = a_new, b_new
    x = 0.5 * (a + b)
    return x, func(x)


def _hidden_arcs(func, th, vals, level, tol):
    """Arcs narrower than the grid: cells whose two samples stay above the
    level but whose continuous minimum dips below it.  Each such cell is
    searched by golden section (one dip per cell is assumed)."""
    n = vals.size
    h = 1.0 / n
    nxt = np.roll(vals, -1)
    cand = np.nonzero((vals >= level) & (nxt >= level))[0]
    if cand.size == 0:
        return []
    lo = th[cand]
    hi = lo + h
    f = lambda x: np.asarray(func(np.mod(x, 1.0)), dtype=np.float64) - level
    xm, fm = _golden_min(f, lo, hi, MIN_TOL)
    hit = fm < 0
    if not np.any(hit):
        return []
    xm, lo, hi = xm[hit], lo[hit], hi[hit]
    a = _bisect(f, lo, xm, np.ones(xm.size), tol)
    b = _bisect(f, xm, hi, -np.ones(xm.size), tol)
    return [(float(x % 1.0), float(x % 1.0 + (y - x))) for x, y in zip(a, b)]


def sublevel_set(func, level: float, grid: int = 1 << 14, max_grid: int = MAX_GRID, tol: float = ENDPOINT_TOL):
    """Arcs of {func < level} on the circle [0, 1).

    ``func`` maps an array of thetas to values.  The grid is doubled while the
    midpoint samples reveal crossings the coarse grid missed; dips narrower
    than the final grid are found from the local minima of the samples.
    Returns (arcs, grid, flags, thetas, values).
    """
    flags = []
    th = theta_grid(grid)
    vals = np.asarray(func(th), dtype=np.float64)
    while True:
        mids = np.asarray(func(th + 0.5 / grid), dtype=np.float64)
        merged = np.empty(2 * grid)
        merged[0::2] = vals
        merged[1::2] = mids
        if _crossings(merged, level).size == _crossings(vals, level).size:
            break
        if 2 * grid > max_grid:
            flags.append("suspected sub-grid arc at grid budget")
            break
        grid *= 2
        th = theta_grid(grid)
        vals = merged
    below = vals < level
    idx = _crossings(vals, level)
    hidden = _hidden_arcs(func, th, vals, level, tol)
    if hidden:
        flags.append(f"{len(hidden)} sub-grid arcs")
    if idx.size == 0:
        if below[0]:
            flags.append("full circle")
            return [(0.0, 1.0)], grid, flags, th, vals
        arcs = sorted(hidden)
        if any(b - a < tol for a, b in arcs):
            flags.append("unresolved width")
        return arcs, grid, flags, th, vals
    h = 1.0 / grid
    lo = th[idx]
    s_lo = np.where(below[idx], -1.0, 1.0)
    roots = _bisect(lambda x: np.asarray(func(np.mod(x, 1.0)), dtype=np.float64) - level,
                    lo, lo + h, s_lo, tol)
    # a crossing from below to above closes an arc
    starts = roots[~below[idx]]
    ends = roots[below[idx]]
    if below[0]:
        # the arc through 0 starts at the last down-crossing
        starts = np.concatenate([[starts[-1] - 1.0], starts[:-1]])
    arcs = list(hidden)
    for a, b in zip(starts, ends):
        a0 = a % 1.0
        arcs.append((float(a0), float(a0 + (b - a))))
    arcs.sort()
    if any(b - a < tol for a, b in arcs):
        flags.append("unresolved width")
    return arcs, grid, flags, th, vals


def deviation_set(E: float, v: Potential, omega, m: int, delta: float, base_grid: int = 1 << 14,
                  max_grid: int = MAX_GRID, relative: bool = False) -> DeviationSet:
    """B^g_{m,delta,E} = {theta : v_m(theta) < L_m - delta}.

    L_m is the theta-average of m^{-1} log ||M_m|| on the same grid as the scan.
    With ``relative`` the threshold is L_m - delta * L_m.
    """
    if m < 4:
        raise ValueError("m must be >= 4")
    if base_grid < (1 << 14):
        raise ValueError("base_grid must be >= 2**14")
    w = omega_value(omega)
    L_m = math.fsum(log_norms(E, v, w, theta_grid(base_grid), 0.0, m)) / base_grid
    if relative:
        delta = delta * L_m
    level = L_m - delta
    arcs, grid, flags, th, vals = sublevel_set(lambda t: vm_values(E, v, w, t, m), level, base_grid, max_grid)
    total = math.fsum(b - a for a, b in arcs)
    return DeviationSet(int(m), float(delta), L_m, level, arcs, total, grid, flags,
                        {"E": float(E), "omega": w, "v": list(v.cosine_coeffs)}, (th, vals))


def complexity_report(ds: DeviationSet, kappa: int, eta: float, working_delta1: float | None = None,
                      formula_delta1: float | None = None) -> dict:
    """Compare the arc count with 2(1 + eta) kappa m; report the longest arc
    next to e^{-100 delta_1 m} for the working and formula delta_1."""
    bound = 2 * (1 + eta) * kappa * ds.m
    count = ds.component_count
    max_arc = max((b - a for a, b in ds.arcs), default=0.0)
    out = {"count": count, "bound": bound, "pass": count <= bound, "max_arc": max_arc}
    if working_delta1 is not None:
        out["max_arc_bound_working"] = math.exp(-100 * working_delta1 * ds.m)
    if formula_delta1 is not None:
        out["max_arc_bound_formula"] = math.exp(-100 * formula_delta1 * ds.m)
    return out


def _circ_dist(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b), 1.0)
    return np.minimum(d, 1.0 - d)


def even_pairing_check(ds: DeviationSet, omega, m: int | None = None, theta_tol: float = 1e-8) -> dict:
    """Fraction of arcs whose reflection -arc - (m-1) omega is again an arc.

    For even v the reversed orbit gives the same HS norm, so the set is
    invariant under theta -> -theta - (m-1) omega.
    """
    m = ds.m if m is None else int(m)
    if not ds.arcs:
        return {"paired_fraction": 1.0, "pairs": 0}
    w = omega_value(omega)
    shift = (m - 1) * w
    a = np.array([x for x, _ in ds.arcs])
    b = np.array([y for _, y in ds.arcs])
    ra = np.mod(-b - shift, 1.0)
    rb = ra + (b - a)
    paired = 0
    for i in range(a.size):
        d = _circ_dist(a, ra[i]) + np.abs((b - a) - (rb[i] - ra[i]))
        if np.min(d) <= theta_tol:
            paired += 1
    return {"paired_fraction": paired / a.size, "pairs": paired}


# ---------------------------------------------------------------- Fejer kernel

def fejer_kernel(R: int, k: int, omega) -> float:
    """F_R(k) = sum_{|j|<R} (R - |j|)/R^2 e^{2 pi i k j omega}, by direct summation."""
    if R < 1:
        raise ValueError("R must be >= 1")
    w = omega_value(omega)
    x = (k * w) % 1.0
    j = np.arange(-R + 1, R)
    wt = (R - np.abs(j)) / (R * R)
    ph = 2 * np.pi * np.mod(j * x, 1.0)
    im = math.fsum(wt * np.sin(ph))
    if abs(im) >= 1e-12:
        raise AssertionError(f"imaginary part {im:g} of a real kernel")
    return math.fsum(wt * np.cos(ph))


def fejer_closed_form(R, k, omega) -> np.ndarray:
    """sin^2(pi R x) / (R^2 sin^2(pi x)) for x = ||k omega||, vectorized; 1 at x = 0."""
    R = np.asarray(R, dtype=np.float64)
    x = torus_norm(np.asarray(k, dtype=np.float64) * omega_value(omega))
    x, R = np.broadcast_arrays(x, R)
    out = np.ones(x.shape)
    nz = x > 0
    out[nz] = np.sin(np.pi * R[nz] * x[nz]) ** 2 / (R[nz] ** 2 * np.sin(np.pi * x[nz]) ** 2)
    return out


def _knorm(k: np.ndarray, omega: float) -> np.ndarray:
    return torus_norm(k.astype(np.float64) * omega)


def fr1_grid_check(omega, R_max: int = 256, k_max: int = 10 ** 4) -> dict:
    """0 <= F_R(k) <= min(1, 2/(1 + R^2 ||k omega||^2)) on every R <= R_max, |k| <= k_max."""
    w = omega_value(omega)
    k = np.arange(-k_max, k_max + 1)
    nk = _knorm(k, w)
    worst = -np.inf
    lowest = np.inf
    for R in range(1, R_max + 1):
        F = fejer_closed_form(R, k, w)
        bound = np.minimum(1.0, 2.0 / (1.0 + R * R * nk * nk))
        worst = max(worst, float(np.max(F - bound)))
        lowest = min(lowest, float(F.min()))
    return {"max_excess": worst, "min_value": lowest, "pass": worst <= 1e-12 and lowest >= -1e-12,
            "F0_error": max(abs(fejer_kernel(R, 0, w) - 1.0) for R in (1, 2, 7, 64, 256))}


def _lorentz(k: np.ndarray, R: np.ndarray, omega: float) -> np.ndarray:
    nk = _knorm(k, omega)
    return 1.0 / (1.0 + np.outer(R * R, nk * nk))


def default_R_values(q: int) -> np.ndarray:
    geo = np.unique(np.geomspace(257, 20 * q + 300, 40).astype(int))
    return np.concatenate([np.arange(1, 257), geo]).astype(np.float64)


def block_sum_checks(cf: ContinuedFraction, q_max: int = 10 ** 4, deltas=(0.1, 0.3, 0.45),
                     R_values=None) -> dict:
    """Direct summation of the three block-sum bounds for every convergent q <= q_max.

    FR_2:  sum_{1<=|k|<q/4} 1/(1 + R^2||k omega||^2) <= 2 pi q / R
    FR_3:  sum_{l q/4 <= k < (l+1) q/4} (same) <= 2 + 2 pi q / R
    ell-blocks of length delta^2 q:  sum_{l d^2 q < k < (l+1) d^2 q} (same) <= 2 + 2 pi q / R

    Blocks run over k < 2 q_{n+1}.  Returns the worst margin of each.
    """
    w = cf.omega_float
    worst = {"FR_2": -np.inf, "FR_3": -np.inf, "sum_ellqn": -np.inf}
    qs = []
    for n in range(1, cf.depth):
        q = cf.q(n)
        if q > q_max or q < 4:
            continue
        qs.append(q)
        q1 = cf.q(n + 1)
        R = default_R_values(q) if R_values is None else np.asarray(R_values, dtype=np.float64)
        rhs2 = 2 * np.pi * q / R
        k = np.arange(1, q)
        k = k[4 * k < q]
        lhs = 2 * _lorentz(k, R, w).sum(axis=1)
        worst["FR_2"] = max(worst["FR_2"], float(np.max(lhs - rhs2)))
        kk = np.arange(0, 2 * q1)
        # prefix sums over k: block [lo, hi) sums to cs[:, hi] - cs[:, lo]
        cs = np.concatenate([np.zeros((R.size, 1)), np.cumsum(_lorentz(kk, R, w), axis=1)], axis=1)

        def block(lo, hi):
            lo = min(max(lo, 0), kk.size)
            hi = min(max(hi, 0), kk.size)
            return cs[:, hi] - cs[:, lo]

        for ell in range(0, (8 * q1) // q + 1):
            # integers k with l q/4 <= k < (l+1) q/4
            s3 = block(-((-ell * q) // 4), -((-(ell + 1) * q) // 4))
            worst["FR_3"] = max(worst["FR_3"], float(np.max(s3 - (2 + rhs2))))
        for d in deltas:
            blk = d * d * q
            for ell in range(0, int(2 * q1 / blk) + 1):
                # integers k with l blk < k < (l+1) blk
                lo = math.floor(ell * blk) + 1
                hi = math.ceil((ell + 1) * blk)
                if hi > lo:
                    s4 = block(lo, hi)
                    worst["sum_ellqn"] = max(worst["sum_ellqn"], float(np.max(s4 - (2 + rhs2))))
    return {"worst_margin": worst, "q_values": qs, "pass": all(x <= 1e-12 for x in worst.values())}


# ---------------------------------------------------------- Fourier diagnostics

@dataclass
class FourierDiagnostics:
    m: int
    K: int
    nodes: int
    coeffs: np.ndarray = field(repr=False)
    C_v1: float
    C_v2: float
    C_v3: float
    tail_ratio: float

    @property
    def C_v(self) -> float:
        return max(self.C_v1, self.C_v2, self.C_v3, 1.0)

    def to_dict(self) -> dict:
        return {"m": self.m, "K": self.K, "nodes": self.nodes, "C_v1": self.C_v1, "C_v2": self.C_v2,
                "C_v3": self.C_v3, "C_v": self.C_v, "tail_ratio": self.tail_ratio,
                "abs_coeffs": [float(x) for x in np.abs(self.coeffs)]}


def _next_pow2(n: int) -> int:
    return 1 << max(int(n) - 1, 1).bit_length()


def vm_coefficients(E: float, v: Potential, omega, m: int, nodes: int) -> np.ndarray:
    """Trapezoid Fourier coefficients hat v_m(k), k = 0..nodes/2."""
    vals = vm_values(E, v, omega, theta_grid(nodes), m)
    return np.fft.rfft(vals) / nodes


def fourier_diagnostics(E: float, v: Potential, omega, m: int, K: int, nodes: int | None = None,
                        alias_factor: float = 2.0) -> FourierDiagnostics:
    """Coefficients of v_m for 0 <= k <= K and the fitted constants.

    The tail k in [nodes/4, nodes/2) must stay inside the 1/|k| envelope of the
    head: sup |k||hat v(k)| over the tail above ``alias_factor`` C_{v,2} is
    reported as aliasing.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    N = _next_pow2(8 * K) if nodes is None else int(nodes)
    if N < 8 * K:
        raise AliasingError(f"{N} nodes cannot resolve K = {K} (need >= {8 * K})", nodes=N, K=K)
    w = omega_value(omega)
    c = vm_coefficients(E, v, w, m, N)
    a = np.abs(c)
    k = np.arange(a.size)
    head = slice(1, K + 1)
    C2 = float(np.max(a[head] * k[head]))
    C3 = float(np.max(a[head] * m * torus_norm(k[head] * w)))
    th = theta_grid(N)
    C1 = float(np.max(m * np.abs(vm_values(E, v, w, th, m) - vm_values(E, v, w, th + w, m))))
    tail = slice(N // 4, N // 2)
    tail_env = float(np.max(a[tail] * k[tail])) if N >= 8 else 0.0
    ratio = tail_env / C2 if C2 > 0 else 0.0
    if C2 > 1e-14 and ratio > alias_factor:
        raise AliasingError(f"coefficient tail exceeds the 1/|k| envelope by {ratio:.3g}", ratio=ratio, nodes=N)
    return FourierDiagnostics(int(m), int(K), N, c[:K + 1], C1, C2, C3, ratio)


def fourier_bound_check(diag: FourierDiagnostics, coeffs=None, omega=None) -> dict:
    """Worst ratios |hat v(k)| |k| / C_v and |hat v(k)| m ||k omega|| / C_v over 1 <= k <= K.

    ``coeffs`` may come from a finer grid than the one that fitted C_v.
    """
    c = diag.coeffs if coeffs is None else np.asarray(coeffs)[:diag.K + 1]
    a = np.abs(c[1:])
    k = np.arange(1, a.size + 1)
    r2 = float(np.max(a * k) / diag.C_v)
    out = {"ratio_1_over_k": r2}
    if omega is not None:
        r3 = float(np.max(a * diag.m * torus_norm(k * omega_value(omega))) / diag.C_v)
        out["ratio_1_over_mkw"] = r3
    out["pass"] = all(val <= 1.0 for val in out.values())
    return out


# -------------------------------------------------------- band decomposition

def _band_sup(coef_full: np.ndarray, mask: np.ndarray) -> float:
    """sup over the grid of |sum_{k in mask} c_k e^{2 pi i k theta}| (full-spectrum layout)."""
    c = np.where(mask, coef_full, 0.0)
    if not np.any(mask):
        return 0.0
    vals = np.fft.ifft(c) * c.size
    return float(np.max(np.abs(vals)))


def ldt_band_decomposition(E: float, v: Potential, cf: ContinuedFraction, m: int, delta: float, scale_n: int,
                           variant: str = "weak", C_v: float | None = None, c0: float = 0.0,
                           nodes: int = 1 << 13) -> dict:
    """Fourier bands of the Fejer-smoothed v_m^{(R)}, R = [delta m].

    variant "weak": 10 q_n < m < q_{n+1}/5, bands U_1..U_6.
    variant "comparable": delta q_n <= m <= q_n / delta, bands U_1..U_4.
    Sup norms are taken on the ``nodes`` grid; bands above nodes/2 are empty
    at this resolution.  The L2 band reports its norm squared.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    qn, qn1 = cf.q(scale_n), cf.q(scale_n + 1)
    if variant == "weak":
        if not 10 * qn < m:
            raise BandRegimeError(f"10 q_n < m violated: 10*{qn} >= {m}", q_n=qn, m=m)
        if not 5 * m < qn1:
            raise BandRegimeError(f"m < q_(n+1)/5 violated: {m} >= {qn1}/5", q_n1=qn1, m=m)
    elif variant == "comparable":
        if not delta * qn <= m:
            raise BandRegimeError(f"m >= delta q_n violated: {m} < {delta * qn:g}", q_n=qn, m=m)
        if not m <= qn / delta:
            raise BandRegimeError(f"m <= q_n / delta violated: {m} > {qn / delta:g}", q_n=qn, m=m)
    else:
        raise ValueError("variant must be 'weak' or 'comparable'")
    w = cf.omega_float
    R = int(math.floor(delta * m))
    if R < 1:
        raise BandRegimeError("R = [delta m] < 1", R=R)
    th = theta_grid(nodes)
    vals = vm_values(E, v, w, th, m)
    coef = np.fft.fft(vals) / nodes
    k = np.fft.fftfreq(nodes, d=1.0 / nodes).astype(np.int64)
    ak = np.abs(k)
    F = fejer_closed_form(R, k, w)
    smoothed_coef = coef * F
    # U_1 directly from shifted samples, not from the truncated series
    acc = np.zeros(nodes)
    for j in range(-R + 1, R):
        acc += (R - abs(j)) * vm_values(E, v, w, th + j * w, m)
    vR = acc / (R * R)
    L_m = math.fsum(log_norms(E, v, w, th, 0.0, m)) / nodes
    if C_v is None:
        C_v = fourier_diagnostics(E, v, w, m, min(512, nodes // 8)).C_v
    d = delta
    measured = {"v0_minus_Lm": abs(coef[0].real - L_m), "U1": float(np.max(np.abs(vals - vR)))}
    predicted = {"U1": C_v * R / m}
    if variant == "weak":
        c5 = math.exp(min(4 * d * d * m, 700.0))
        masks = {
            "U2": (ak >= 1) & (ak <= d ** -2),
            "U3": (ak > d ** -2) & (4 * ak < qn),
            "U4": (4 * ak >= qn) & (4 * ak < qn1),
            "U5": (4 * ak >= qn1) & (ak < c5),
        }
        tail = ak >= c5
        small = np.arange(1, int(d ** -2) + 1)
        predicted["U2"] = 2 * C_v * d ** -2 / m * float(np.max(1.0 / torus_norm(small * w)))
        predicted["U3"] = 2 * np.pi * C_v * d * d * qn / R
        predicted["U4"] = 4 * C_v * sum((2 + 2 * np.pi * qn / R) / (ell * qn) for ell in range(1, qn1 // qn + 1))
        predicted["U4_final"] = 12 * C_v * math.log(qn1) / (d * qn)
        predicted["U5"] = 140 * C_v * d
        tail_name = "U6"
        predicted[tail_name] = 2 * C_v ** 2 * math.exp(-4 * d * d * m)
    else:
        c3 = math.exp(min(d ** 4 * m, 700.0))
        masks = {
            "U2": (ak >= 1) & (ak <= d * d * qn),
            "U3": (ak > d * d * qn) & (ak < c3),
        }
        tail = ak >= c3
        qprev = cf.q(scale_n - 1)
        predicted["U2"] = C_v * (55 * d + 4 * c0 * math.log(qn) / max(qprev, 1))
        predicted["U3"] = 110 * C_v * d
        tail_name = "U4"
        predicted[tail_name] = 2 * C_v ** 2 * math.exp(-d ** 4 * m)
    for name, mask in masks.items():
        measured[name] = _band_sup(smoothed_coef, mask)
    measured[tail_name] = float(np.sum(np.abs(smoothed_coef[tail]) ** 2))
    within = {name: measured[name] <= predicted[name] for name in predicted if name in measured}
    return {
        "variant": variant, "m": int(m), "delta": d, "R": R, "q_n": qn, "q_n1": qn1, "C_v": C_v,
        "L_m": L_m, "nodes": nodes, "band_norms": measured, "predicted": predicted, "within": within,
        "resolved_k_max": nodes // 2 - 1,
    }


# ----------------------------------------------------------- negative control

def synthetic_dips(m: int, n_dips: int | None = None, depth: float = 1.0):
    """Constructed v with ``n_dips`` (default 3m) equal dips, bypassing cocycles."""
    n = 3 * m if n_dips is None else int(n_dips)

    def func(theta):
        return depth * np.cos(2 * np.pi * n * np.asarray(theta))

    return func


def synthetic_deviation_set(func, m: int, level: float, delta: float = 0.0, grid: int = 1 << 14) -> DeviationSet:
    arcs, g, flags, th, vals = sublevel_set(func, level, grid)
    return DeviationSet(int(m), float(delta), float(level + delta), float(level), arcs,
                        math.fsum(b - a for a, b in arcs), g, flags, {"synthetic": True}, (th, vals))

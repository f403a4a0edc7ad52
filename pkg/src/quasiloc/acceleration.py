"""Complexified Lyapunov profiles eps -> L_n(omega, E, eps) and the
acceleration, the right-derivative of L / (2 pi) at eps = 0.

For the almost Mathieu operator in its spectrum L(eps) = max(L(0), log lam + 2 pi |eps|),
so the slope on a small window is 0 (subcritical) or 1 (supercritical).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import ContinuedFraction
from .cocycle import lyapunov_finite, lyapunov_rational, lyapunov_with_error, omega_value, theta_grid
from .errors import WindowError
from .model import PaperConstants, Potential

DEFAULT_WINDOW = (0.01, 0.03)
UNRESOLVED_RESIDUAL = 0.1


@dataclass
class LyapunovProfile:
    eps_grid: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    n: int
    grid_size: int
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"eps_grid": [float(e) for e in self.eps_grid], "values": [float(x) for x in self.values],
                "errors": [float(x) for x in self.errors], "n": self.n, "grid_size": self.grid_size,
                "params": dict(self.params)}


def compute_profile(E: float, v: Potential, omega, eps_grid, n: int = 10 ** 4, grid_size: int = 256) -> LyapunovProfile:
    """L_n(eps) on each eps of ``eps_grid`` (all within the strip of v)."""
    eps = np.asarray(eps_grid, dtype=np.float64)
    if eps.ndim != 1 or eps.size == 0:
        raise ValueError("eps_grid must be a non-empty 1-d sequence")
    v.check_strip(eps)
    vals = np.empty(eps.size)
    errs = np.empty(eps.size)
    for i, e in enumerate(eps):
        vals[i], errs[i] = lyapunov_with_error(E, v, omega, float(e), n, grid_size)
    params = {"E": float(E), "omega": omega_value(omega), "v": list(v.cosine_coeffs)}
    return LyapunovProfile(eps, vals, errs, int(n), int(grid_size), params)


def window_profile(E: float, v: Potential, omega, window=DEFAULT_WINDOW, points: int = 5, **kw) -> LyapunovProfile:
    return compute_profile(E, v, omega, np.linspace(window[0], window[1], points), **kw)


def acceleration_estimate(profile: LyapunovProfile, window=DEFAULT_WINDOW) -> dict:
    """Least-squares slope of L(eps) against 2 pi eps on the window."""
    lo, hi = float(window[0]), float(window[1])
    if not 0 < lo < hi:
        raise WindowError(f"window [{lo:g}, {hi:g}] must satisfy 0 < lo < hi", window=[lo, hi])
    eps = profile.eps_grid
    sel = (eps >= lo - 1e-15) & (eps <= hi + 1e-15)
    pts = int(sel.sum())
    if pts < 3:
        raise WindowError(f"only {pts} profile points in [{lo:g}, {hi:g}]", points=pts)
    slope, _ = np.polyfit(2 * np.pi * eps[sel], profile.values[sel], 1)
    k = int(round(float(slope)))
    out = {"kappa_raw": float(slope), "kappa_int": k, "residual": abs(float(slope) - k), "points": pts}
    if pts < 4:
        out["warning"] = "fewer than 4 points in window"
    return out


def stratum_classify(E: float, v: Potential, omega, constants: PaperConstants, n: int = 10 ** 4,
                     window=DEFAULT_WINDOW, grid_size: int = 256) -> dict:
    """First supercritical stratum test: kappa = 1 and L_n > beta.

    A quantization residual of 0.1 or more gives status "unresolved".
    """
    L0 = lyapunov_finite(E, v, omega, 0.0, n, grid_size)
    acc = acceleration_estimate(window_profile(E, v, omega, window, n=n, grid_size=grid_size), window)
    resolved = acc["residual"] < UNRESOLVED_RESIDUAL
    out = {
        "E": float(E), "omega": omega_value(omega), "v": list(v.cosine_coeffs), "n": int(n),
        "window": [float(window[0]), float(window[1])], "beta": constants.beta,
        "beta_label": constants.beta_label, "L": L0, "kappa": acc["kappa_int"],
        "kappa_raw": acc["kappa_raw"], "residual": acc["residual"],
        "status": "resolved" if resolved else "unresolved stratum",
    }
    out["first_supercritical"] = bool(resolved and acc["kappa_int"] == 1 and L0 > constants.beta)
    return out


def rational_uniformity(E: float, v: Potential, cf: ContinuedFraction, n_conv: int, eps: float = 0.0,
                        grid: int = 256) -> dict:
    """max over a theta grid of |L(p/q, theta + i eps) - L_q(omega, eps)| with q = q_n.

    Also reports the theta-average of the rational exponent.
    """
    p, q = cf.p(n_conv), cf.q(n_conv)
    th = theta_grid(grid)
    rat = np.asarray(lyapunov_rational(E, v, (p, q), th + 1j * eps))
    Lm = lyapunov_finite(E, v, cf.omega_float, eps, q, max(grid // 2, 64))
    return {"p": p, "q": q, "eps": float(eps), "L_m": Lm, "mean_rational": math.fsum(rat) / rat.size,
            "max_dev": float(np.max(np.abs(rat - Lm)))}


def convexity_defect(profile: LyapunovProfile) -> float:
    """Most negative divided second difference (0 for a convex profile)."""
    e, y = profile.eps_grid, profile.values
    if e.size < 3:
        return 0.0
    s = np.diff(y) / np.diff(e)
    d2 = np.diff(s) / (0.5 * (e[2:] - e[:-2]))
    return float(min(0.0, d2.min()))


def evenness_defect(E: float, v: Potential, omega, eps_values, n: int, grid_size: int = 256) -> float:
    """max |L_n(eps) - L_n(-eps)|."""
    out = 0.0
    for e in eps_values:
        a = lyapunov_finite(E, v, omega, float(e), n, grid_size)
        b = lyapunov_finite(E, v, omega, -float(e), n, grid_size)
        out = max(out, abs(a - b))
    return out


def linearity_defect(profile: LyapunovProfile) -> dict:
    """Largest deviation of the profile from the chord through its end points."""
    e, y = profile.eps_grid, profile.values
    chord = y[0] + (y[-1] - y[0]) * (e - e[0]) / (e[-1] - e[0])
    dev = float(np.max(np.abs(y - chord)))
    L = float(y[0])
    return {"max_dev": dev, "L": L, "relative": dev / L if L > 0 else float("inf")}

"""Transfer matrices, Dirichlet determinants, the trace function f and the
norm-square function g, all carried in log-scaled form.

The one-step matrix is M_E(theta) = [[E - v(theta), -1], [1, 0]] and
M_n(theta) = M(theta + (n-1) omega) ... M(theta).  Its entries are

    M_n = [[P_n(theta), -P_{n-1}(theta+omega)], [P_{n-1}(theta), -P_{n-2}(theta+omega)]]

so f = 2 - tr M_n and g = sum of the squared entries both come from one product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .model import Potential

TWO_PI = 2.0 * np.pi


def omega_value(omega) -> float:
    """Accept a float, an mpf or a ContinuedFraction."""
    w = getattr(omega, "omega", omega)
    w = float(w)
    return w - math.floor(w)


@dataclass
class LogValue:
    """value = phase * exp(log_abs); arrays or scalars."""

    log_abs: np.ndarray
    phase: np.ndarray

    @classmethod
    def from_scaled(cls, mant, scale) -> "LogValue":
        mant = np.asarray(mant, dtype=np.complex128)
        mag = np.abs(mant)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_abs = np.log(mag) + np.asarray(scale, dtype=np.float64)
            phase = np.where(mag > 0, mant / np.where(mag > 0, mag, 1.0), 1.0 + 0j)
        return cls(log_abs, phase)

    def value(self):
        with np.errstate(over="ignore"):
            return self.phase * np.exp(self.log_abs)

    @property
    def sign(self):
        return np.sign(self.phase.real)

    def __getitem__(self, idx) -> "LogValue":
        return LogValue(self.log_abs[idx], self.phase[idx])


@dataclass
class ScaledTransfer:
    """M_n = mat * exp(log_scale).

    ``log_det`` and ``det_phase`` carry det(mat) * e^{2 log_scale} from the
    triangular factor of the product, where it is computed without
    cancellation.  (For a hyperbolic product the entrywise determinant of
    ``mat`` is pure rounding noise once ||M_n||^2 exceeds 1e16.)
    """

    mat: np.ndarray
    log_scale: float
    n: int
    params: dict
    log_det: float = 0.0
    det_phase: complex = 1.0

    def full(self) -> np.ndarray:
        return self.mat * math.exp(self.log_scale)

    @property
    def det(self) -> complex:
        return self.det_phase * math.exp(self.log_det)

    @property
    def det_residual(self) -> float:
        return abs(self.det - 1)

    def entry_det(self) -> complex:
        """det(mat) * e^{2 log_scale} from the entries (only meaningful for short products)."""
        d = self.mat[0, 0] * self.mat[1, 1] - self.mat[0, 1] * self.mat[1, 0]
        return d * math.exp(2 * self.log_scale)

    def log_norm(self) -> float:
        """log of the operator norm of M_n."""
        return float(_log_opnorm_from(self.mat[None], np.array([self.log_scale]))[0])


def _split(phase):
    phase = np.atleast_1d(np.asarray(phase, dtype=np.complex128))
    return phase, np.ascontiguousarray(phase.real), np.ascontiguousarray(phase.imag)


def transfer_batch(E: float, v: Potential, omega, phases, n: int, check: bool = True):
    """Products for an array of phases; returns (mats (m,2,2), log_scales (m,))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ph, re, im = _split(phases)
    if check:
        v.check_strip(im)
    w = omega_value(omega)
    if np.all(im == 0.0):
        return K.batch_real(float(E), v.array, w, re, int(n))
    return K.batch_cplx(float(E), v.array, w, re, im, int(n))


def transfer_product(E: float, v: Potential, omega, phase, n: int) -> ScaledTransfer:
    """M_n(phase) as a ScaledTransfer, via the orthogonal-triangular product."""
    if n < 1:
        raise ValueError("n must be >= 1")
    phase = complex(phase)
    v.check_strip(phase.imag)
    q00, q01, q10, q11, t, lr11, lr22, ph22 = K.prod_qr(
        float(E), v.array, omega_value(omega), phase.real, phase.imag, int(n))
    rho = ph22 * math.exp(lr22 - lr11)
    mat = np.array([[q00, q00 * t + q01 * rho], [q10, q10 * t + q11 * rho]])
    e = math.frexp(float(np.abs(mat).max()))[1]
    mat = mat * math.ldexp(1.0, -e)
    s = lr11 + e * math.log(2.0)
    if phase.imag == 0.0:
        mat = mat.real.copy()
    return ScaledTransfer(mat, s, int(n), {"E": float(E), "omega": omega_value(omega), "phase": phase},
                          log_det=lr11 + lr22, det_phase=complex(ph22))


def _scalarize(lv: LogValue, phase) -> LogValue:
    if np.ndim(phase) == 0:
        return LogValue(float(lv.log_abs[0]), complex(lv.phase[0]))
    return lv


def dirichlet_det(E: float, v: Potential, omega, phase, n: int) -> LogValue:
    """P_n(phase) in log form; P_0 = 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        ph = np.atleast_1d(np.asarray(phase, dtype=np.complex128))
        return _scalarize(LogValue(np.zeros(ph.shape), np.ones(ph.shape, dtype=np.complex128)), phase)
    mats, logs = transfer_batch(E, v, omega, phase, n)
    return _scalarize(LogValue.from_scaled(mats[:, 0, 0], logs), phase)


def trace_f_from(mats, logs) -> LogValue:
    with np.errstate(over="ignore"):
        scaled = 2.0 * np.exp(-logs) - (mats[:, 0, 0] + mats[:, 1, 1])
    return LogValue.from_scaled(scaled, logs)


def trace_f(E: float, v: Potential, omega, phase, n: int) -> LogValue:
    """f = 2 - tr M_n = 2 - P_n(theta) + P_{n-2}(theta + omega)."""
    mats, logs = transfer_batch(E, v, omega, phase, n)
    return _scalarize(trace_f_from(mats, logs), phase)


def phase_of_z(z):
    """phi with z = exp(2 pi i phi); Im phi = -log|z| / (2 pi)."""
    z = np.asarray(z, dtype=np.complex128)
    return np.angle(z) / TWO_PI - 1j * np.log(np.abs(z)) / TWO_PI


def z_of_phase(phi):
    return np.exp(2j * np.pi * np.asarray(phi, dtype=np.complex128))


def g_from(mats, logs) -> LogValue:
    sq = (mats ** 2).sum(axis=(1, 2))
    return LogValue.from_scaled(sq, 2 * logs)


def g_value(E: float, v: Potential, omega, z, m: int) -> LogValue:
    """g_m(z) = P_m(z)^2 + P_{m-1}(z)^2 + P_{m-1}(z e^{2 pi i w})^2 + P_{m-2}(z e^{2 pi i w})^2."""
    if m < 2:
        raise ValueError("m must be >= 2")
    mats, logs = transfer_batch(E, v, omega, phase_of_z(z), m)
    return _scalarize(g_from(mats, logs), z)


def _log_opnorm_from(mats, logs):
    hs = (np.abs(mats) ** 2).sum(axis=(1, 2))
    det = np.abs(mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0])
    disc = np.maximum(hs * hs / 4 - det * det, 0.0)
    return 0.5 * np.log(hs / 2 + np.sqrt(disc)) + logs


def log_norms(E: float, v: Potential, omega, thetas, eps: float, n: int) -> np.ndarray:
    """n^{-1} log ||M_n(theta + i eps)|| over an array of real thetas."""
    thetas = np.ascontiguousarray(np.asarray(thetas, dtype=np.float64))
    v.check_strip(eps)
    w = omega_value(omega)
    if eps == 0.0:
        return K.log_opnorm_real(float(E), v.array, w, thetas, int(n))
    return K.log_opnorm_cplx(float(E), v.array, w, thetas, float(eps), int(n))


def vm_values(E: float, v: Potential, omega, thetas, m: int) -> np.ndarray:
    """v_m(theta) = (2m)^{-1} log g_m(theta) for real theta."""
    thetas = np.ascontiguousarray(np.asarray(thetas, dtype=np.float64))
    return K.log_hs_real(float(E), v.array, omega_value(omega), thetas, int(m))


def theta_grid(size: int) -> np.ndarray:
    return np.arange(size, dtype=np.float64) / size


def lyapunov_with_error(E: float, v: Potential, omega, eps: float, n: int, grid_size: int = 256):
    """(L_n, error estimate): trapezoid average on ``2 * grid_size`` nodes, with
    the error taken as the change from the ``grid_size`` subgrid."""
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    vals = log_norms(E, v, omega, theta_grid(2 * grid_size), eps, n)
    fine = math.fsum(vals) / vals.size
    coarse = math.fsum(vals[::2]) / grid_size
    return fine, abs(fine - coarse)


def lyapunov_finite(E: float, v: Potential, omega, eps: float, n: int, grid_size: int = 256) -> float:
    """Finite-scale Lyapunov exponent L_n(omega, E, eps)."""
    return lyapunov_with_error(E, v, omega, eps, n, grid_size)[0]


def _as_pq(p_over_q):
    if isinstance(p_over_q, Fraction):
        return p_over_q.numerator, p_over_q.denominator
    p, q = p_over_q
    if math.gcd(int(p), int(q)) != 1:
        raise ValueError("p/q must be in lowest terms")
    return int(p), int(q)


def log_spectral_radius(tr: LogValue, real: bool) -> np.ndarray:
    """log rho for SL(2) elements with trace t (given in log form)."""
    la = np.atleast_1d(tr.log_abs)
    ph = np.atleast_1d(tr.phase)
    out = np.zeros(la.shape)
    big = la > 30
    # |t| large: rho = |t| * |1/2 + sqrt(1/4 - 1/t^2)| with 1/t^2 tiny
    tb = np.exp(-2 * la[big]) / ph[big] ** 2
    out[big] = la[big] + np.log(np.abs(0.5 + np.sqrt(0.25 - tb)))
    small = ~big
    t = ph[small] * np.exp(la[small])
    if real:
        h = np.abs(t.real) / 2
        rho = np.where(h > 1, h + np.sqrt(np.maximum(h * h - 1, 0)), 1.0)
        out[small] = np.log(rho)
    else:
        h = t / 2
        r = np.sqrt(h * h - 1 + 0j)
        out[small] = np.log(np.maximum(np.abs(h + r), np.abs(h - r)))
    return out


def lyapunov_rational(E: float, v: Potential, p_over_q, phase):
    """q^{-1} log rho(M_q^{p/q}(phase)), from the trace."""
    p, q = _as_pq(p_over_q)
    mats, logs = transfer_batch(E, v, p / q, phase, q)
    tr = LogValue.from_scaled(mats[:, 0, 0] + mats[:, 1, 1], logs)
    ph = np.atleast_1d(np.asarray(phase, dtype=np.complex128))
    out = log_spectral_radius(tr, bool(np.all(ph.imag == 0))) / q
    return float(out[0]) if np.ndim(phase) == 0 else out


def uniform_upper_trend(E: float, v: Potential, omega, ns, grid_size: int = 512) -> list:
    """Rows (n, max_theta n^{-1}log||M_n||, L_{n/2}, excess) for the uniform upper bound."""
    rows = []
    th = theta_grid(grid_size)
    for n in ns:
        mx = float(log_norms(E, v, omega, th, 0.0, n).max())
        half = lyapunov_finite(E, v, omega, 0.0, max(n // 2, 1), max(grid_size // 2, 64))
        rows.append((int(n), mx, half, mx - half))
    return rows

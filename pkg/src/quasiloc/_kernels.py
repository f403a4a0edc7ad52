"""Compiled inner loops for transfer-matrix products.

Products are renormalized after every step by an exact power of two, so the
accumulated log-scale is exact and the stored matrix keeps its largest
component in [1/2, 1).
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from numba import njit

LN2 = math.log(2.0)
TWO_PI = 2.0 * math.pi


@njit(cache=True)
def _v_real(c, x):
    x = x - math.floor(x)
    val = c[0]
    for k in range(1, c.shape[0]):
        if c[k] != 0.0:
            val += 2.0 * c[k] * math.cos(TWO_PI * k * x)
    return val


@njit(cache=True)
def _v_cplx(c, xr, xi):
    xr = xr - math.floor(xr)
    val = complex(c[0], 0.0)
    for k in range(1, c.shape[0]):
        if c[k] != 0.0:
            val += 2.0 * c[k] * cmath.cos(TWO_PI * k * complex(xr, xi))
    return val


@njit(cache=True)
def prod_real(E, c, omega, theta, n):
    """Return (a, b, cc, d, s) with M_n(theta) = [[a, b], [cc, d]] * e^s."""
    a, b, cc, d = 1.0, 0.0, 0.0, 1.0
    s = 0.0
    for k in range(n):
        t = E - _v_real(c, theta + k * omega)
        na = t * a - cc
        nb = t * b - d
        cc = a
        d = b
        a = na
        b = nb
        mx = max(abs(a), abs(b), abs(cc), abs(d))
        e = math.frexp(mx)[1]
        if e != 0:
            f = math.ldexp(1.0, -e)
            a *= f
            b *= f
            cc *= f
            d *= f
            s += e * LN2
    return a, b, cc, d, s


@njit(cache=True)
def prod_cplx(E, c, omega, theta, eps, n):
    a = complex(1.0, 0.0)
    b = complex(0.0, 0.0)
    cc = complex(0.0, 0.0)
    d = complex(1.0, 0.0)
    s = 0.0
    for k in range(n):
        t = E - _v_cplx(c, theta + k * omega, eps)
        na = t * a - cc
        nb = t * b - d
        cc = a
        d = b
        a = na
        b = nb
        mx = max(abs(a.real), abs(a.imag), abs(b.real), abs(b.imag),
                 abs(cc.real), abs(cc.imag), abs(d.real), abs(d.imag))
        e = math.frexp(mx)[1]
        if e != 0:
            f = math.ldexp(1.0, -e)
            a *= f
            b *= f
            cc *= f
            d *= f
            s += e * LN2
    return a, b, cc, d, s


@njit(cache=True)
def batch_real(E, c, omega, thetas, n):
    m = thetas.shape[0]
    mats = np.empty((m, 2, 2), dtype=np.float64)
    logs = np.empty(m, dtype=np.float64)
    for j in range(m):
        a, b, cc, d, s = prod_real(E, c, omega, thetas[j], n)
        mats[j, 0, 0] = a
        mats[j, 0, 1] = b
        mats[j, 1, 0] = cc
        mats[j, 1, 1] = d
        logs[j] = s
    return mats, logs


@njit(cache=True)
def batch_cplx(E, c, omega, thetas, epss, n):
    m = thetas.shape[0]
    mats = np.empty((m, 2, 2), dtype=np.complex128)
    logs = np.empty(m, dtype=np.float64)
    for j in range(m):
        a, b, cc, d, s = prod_cplx(E, c, omega, thetas[j], epss[j], n)
        mats[j, 0, 0] = a
        mats[j, 0, 1] = b
        mats[j, 1, 0] = cc
        mats[j, 1, 1] = d
        logs[j] = s
    return mats, logs


@njit(cache=True)
def log_opnorm_real(E, c, omega, thetas, n):
    """n^{-1} log ||M_n(theta)|| (operator norm) for each theta."""
    m = thetas.shape[0]
    out = np.empty(m, dtype=np.float64)
    for j in range(m):
        a, b, cc, d, s = prod_real(E, c, omega, thetas[j], n)
        hs = a * a + b * b + cc * cc + d * d
        det = a * d - b * cc
        disc = max(hs * hs * 0.25 - det * det, 0.0)
        out[j] = (0.5 * math.log(hs * 0.5 + math.sqrt(disc)) + s) / n
    return out


@njit(cache=True)
def log_opnorm_cplx(E, c, omega, thetas, eps, n):
    m = thetas.shape[0]
    out = np.empty(m, dtype=np.float64)
    for j in range(m):
        a, b, cc, d, s = prod_cplx(E, c, omega, thetas[j], eps, n)
        hs = abs(a) ** 2 + abs(b) ** 2 + abs(cc) ** 2 + abs(d) ** 2
        det = abs(a * d - b * cc)
        disc = max(hs * hs * 0.25 - det * det, 0.0)
        out[j] = (0.5 * math.log(hs * 0.5 + math.sqrt(disc)) + s) / n
    return out


@njit(cache=True)
def log_hs_real(E, c, omega, thetas, n):
    """(2n)^{-1} log ||M_n(theta)||_HS^2 for each theta."""
    m = thetas.shape[0]
    out = np.empty(m, dtype=np.float64)
    for j in range(m):
        a, b, cc, d, s = prod_real(E, c, omega, thetas[j], n)
        hs = a * a + b * b + cc * cc + d * d
        out[j] = (0.5 * math.log(hs) + s) / n
    return out


@njit(cache=True)
def log_det_path(E, c, omega, theta, n):
    """Log-scaled Dirichlet determinants P_0..P_n along a real orbit.

    Returns (mant, logs) with P_k = mant[k] * e^{logs[k]}; the pair
    (P_k, P_{k-1}) is rescaled jointly so no information is lost.
    """
    mant = np.empty(n + 1, dtype=np.float64)
    logs = np.empty(n + 1, dtype=np.float64)
    p, pm = 1.0, 0.0
    s = 0.0
    mant[0] = 1.0
    logs[0] = 0.0
    for k in range(1, n + 1):
        t = E - _v_real(c, theta + (k - 1) * omega)
        p, pm = t * p - pm, p
        mx = max(abs(p), abs(pm))
        e = math.frexp(mx)[1]
        if e != 0:
            f = math.ldexp(1.0, -e)
            p *= f
            pm *= f
            s += e * LN2
        mant[k] = p
        logs[k] = s
    return mant, logs


@njit(cache=True)
def recur_inward(E, vvals, start_val):
    """Run the three-term recursion inward from a Dirichlet edge, in
    log-scaled form: psi_next = (E - v_cur) psi_cur - psi_prev, psi_prev = 0
    beyond the edge.

    ``vvals`` holds the potential along the run, ordered from the edge inward.
    Returns (mant, logs), psi = mant * e^logs, ordered the same way.
    """
    m = vvals.shape[0]
    mant = np.empty(m, dtype=np.float64)
    logs = np.empty(m, dtype=np.float64)
    cur, nxt = start_val, 0.0  # psi at edge, psi beyond edge (= 0)
    s = 0.0
    mant[0] = cur
    logs[0] = 0.0
    for k in range(1, m):
        new = (E - vvals[k - 1]) * cur - nxt
        nxt = cur
        cur = new
        mx = max(abs(cur), abs(nxt))
        e = math.frexp(mx)[1]
        if e != 0:
            f = math.ldexp(1.0, -e)
            cur *= f
            nxt *= f
            s += e * LN2
        mant[k] = cur
        logs[k] = s
    return mant, logs


@njit(cache=True)
def prod_qr(E, c, omega, theta, eps, n):
    """Structure-preserving product M_n = Q [[r11, r12], [0, r22]].

    Q is unitary with det 1 (a complex Givens rotation), r11 > 0.  One step
    multiplies B = A_k Q and refactors B = G R'.  The diagonal is kept as logs
    (lr11, lr22) plus the unit phase of r22, and t = r12 / r11 is kept in
    relative form, so the determinant r11 r22 never passes through a
    cancelling subtraction.  Returns (q00, q01, q10, q11, t, lr11, lr22, ph22).
    """
    q00 = complex(1.0, 0.0)
    q01 = complex(0.0, 0.0)
    q10 = complex(0.0, 0.0)
    q11 = complex(1.0, 0.0)
    t = complex(0.0, 0.0)
    lr11 = 0.0
    lr22 = 0.0
    ph22 = complex(1.0, 0.0)
    cplx = eps != 0.0
    for k in range(n):
        if cplx:
            a = E - _v_cplx(c, theta + k * omega, eps)
        else:
            a = complex(E - _v_real(c, theta + k * omega), 0.0)
        # B = A Q with A = [[a, -1], [1, 0]]
        b00 = a * q00 - q10
        b01 = a * q01 - q11
        b10 = q00
        b11 = q01
        r = math.sqrt(abs(b00) ** 2 + abs(b10) ** 2)
        cs = b00 / r
        sn = b10 / r
        rp12 = cs.conjugate() * b01 + sn.conjugate() * b11
        rp22 = -sn * b01 + cs * b11
        # new Q = G = [[cs, -conj(sn)], [sn, conj(cs)]]
        q00 = cs
        q01 = -sn.conjugate()
        q10 = sn
        q11 = cs.conjugate()
        m22 = abs(rp22)
        ratio = math.exp(lr22 - lr11)  # r22 / r11 before the step, in modulus
        t = t + (rp12 / r) * ratio * ph22
        lr11 += math.log(r)
        lr22 += math.log(m22)
        ph22 = ph22 * (rp22 / m22)
    return q00, q01, q10, q11, t, lr11, lr22, ph22

"""Potentials as finite cosine series and the localization constants.

A potential is v(theta) = c_0 + sum_k c_k 2 cos(2 pi k theta).  Being a trig
polynomial it is entire, so any strip width eps0 is admissible; eps0 only
bounds where evaluation is allowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfStripError, RegimeError

DEFAULT_EPS0 = 0.05


@dataclass(frozen=True)
class Potential:
    cosine_coeffs: tuple
    eps0: float = DEFAULT_EPS0
    sup_bound: float = field(init=False)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.cosine_coeffs)
        if not coeffs:
            coeffs = (0.0,)
        object.__setattr__(self, "cosine_coeffs", coeffs)
        if self.eps0 <= 0:
            raise ValueError("eps0 must be positive")
        # |cos(2 pi k (t + i e))| <= cosh(2 pi k e), attained at t = 0 for e real
        bound = abs(coeffs[0]) + sum(
            2 * abs(c) * math.cosh(2 * math.pi * k * self.eps0) for k, c in enumerate(coeffs[1:], start=1)
        )
        object.__setattr__(self, "sup_bound", bound)

    @property
    def K(self) -> int:
        return len(self.cosine_coeffs) - 1

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.cosine_coeffs, dtype=np.float64)

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.cosine_coeffs)

    def check_strip(self, eps) -> None:
        e = float(np.max(np.abs(eps))) if np.ndim(eps) else abs(float(eps))
        if e > self.eps0 * (1 + 1e-12):
            raise OutOfStripError(f"|Im phase| = {e:g} exceeds eps0 = {self.eps0:g}", eps=e, eps0=self.eps0)

    def __call__(self, phase):
        return potential_eval(self, phase)

    def to_dict(self) -> dict:
        return {"cosine_coeffs": list(self.cosine_coeffs), "eps0": self.eps0, "sup_bound": self.sup_bound}


def amo(lam: float, eps0: float = DEFAULT_EPS0) -> Potential:
    """Almost Mathieu potential 2 lam cos(2 pi theta)."""
    return Potential((0.0, float(lam)), eps0)


def zero_potential(eps0: float = DEFAULT_EPS0) -> Potential:
    return Potential((0.0,), eps0)


def potential_eval(v: Potential, phase):
    """Analytic extension of v at complex phase(s) theta + i eps."""
    phase = np.asarray(phase, dtype=np.complex128)
    v.check_strip(phase.imag)
    out = np.full(phase.shape, v.cosine_coeffs[0], dtype=np.complex128)
    for k, c in enumerate(v.cosine_coeffs[1:], start=1):
        if c != 0.0:
            out += 2 * c * np.cos(2 * np.pi * k * phase)
    real_mask = phase.imag == 0
    if np.any(real_mask):
        out[real_mask] = out[real_mask].real
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class PaperConstants:
    """The constants delta_1, c_0 and eta.

    The formula-faithful delta_1 is astronomically small, so a separate working
    delta_1 is carried for desk-scale experiments.  ``delta1`` and ``eta`` are
    the formula values, ``working_*`` those derived from the working delta_1.
    """

    C_v: float
    L: float
    beta: float
    eps0: float
    delta1_quarter: float
    delta1: float
    c0: float
    eta: float
    in_regime: bool
    working_delta1: float
    working_c0: float
    working_eta: float
    working_in_regime: bool
    beta_label: str = "finite-depth proxy"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


ETA_CEILING = 1.0 / 100


def _c0_eta(d14: float, C_v: float, beta: float, eps0: float):
    return 10 * d14 / (1 + beta), 1000 * C_v * d14 / eps0


def derive_constants(v: Potential, L: float, beta: float, C_v: float, working_delta1: float | None = None) -> PaperConstants:
    """delta_1, c_0 and eta from (eps0, L, beta, C_v).

    eta <= 1/100 holds identically for the formula value; reaching the ceiling
    exactly (which happens when eps0 <= 1 is the binding minimum and L <= 1)
    is treated as in regime.  Without a working delta_1 the formula value is
    used for both.
    """
    if not L > beta:
        raise RegimeError(f"L = {L:g} <= beta = {beta:g}: not in localization regime", L=L, beta=beta)
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if C_v < 1:
        raise ValueError("C_v must be >= 1")
    eps0 = v.eps0
    d14 = min(eps0, 1.0, L - beta) / (1e5 * C_v * max(1.0, L))
    c0, eta = _c0_eta(d14, C_v, beta, eps0)
    tol = ETA_CEILING * (1 + 1e-12)
    wd = d14 ** 4 if working_delta1 is None else float(working_delta1)
    if wd <= 0:
        raise ValueError("working delta1 must be positive")
    wc0, weta = _c0_eta(wd ** 0.25, C_v, beta, eps0)
    return PaperConstants(
        C_v=float(C_v), L=float(L), beta=float(beta), eps0=eps0,
        delta1_quarter=d14, delta1=d14 ** 4, c0=c0, eta=eta, in_regime=eta <= tol,
        working_delta1=wd, working_c0=wc0, working_eta=weta, working_in_regime=weta <= tol,
    )

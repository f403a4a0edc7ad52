"""Green's function of the annulus A_R = {1/R < |z| < R} and related averages.

G_R(z, w) = (2 pi)^{-1} log|z - w| + Gamma_R(z, w), where the regular part is
the image-charge product

    Gamma_R = log(|z|/R) log(|w|/R) / (4 pi log R)
              + (2 pi)^{-1} log( prod_k |1 - R^{-4k} z/w| |1 - R^{-4k} w/z|
                                 / (R prod_k |1 - R^{-(4k-2)} w conj(z)| |1 - R^{-(4k-2)} / (conj(z) w)|) ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnnulusDomainError, FamilyStructureError, IntegrityError

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class AnnulusSpec:
    R: float
    truncation_k0: int
    tail_bound: float

    @property
    def log_R(self) -> float:
        return math.log(self.R)

    def contains(self, z, closed: bool = True) -> np.ndarray:
        r = np.abs(np.asarray(z))
        tol = 1e-12
        if closed:
            return (r >= (1 / self.R) * (1 - tol)) & (r <= self.R * (1 + tol))
        return (r > 1 / self.R) & (r < self.R)

    def to_dict(self) -> dict:
        return {"R": self.R, "truncation_k0": self.truncation_k0, "tail_bound": self.tail_bound}


def _tail(R: float, k0: int) -> float:
    # |log|1 - x|| <= 2|x| for |x| <= 1/2; worst factors are R^{-(4k-4)} (conj(z) w ratio
    # at the boundary) and R^{-(4k-2)} (z/w ratio), four factors per k.
    q = R ** -4
    first = R ** (-(4 * (k0 + 1) - 4))
    return 4 * 2 * first / (1 - q) / TWO_PI


def annulus_spec(R: float, tol: float = 1e-16, k0: int | None = None) -> AnnulusSpec:
    """Spec with the smallest k0 whose truncation tail is below ``tol``."""
    if R <= 1:
        raise ValueError("R must exceed 1")
    if k0 is None:
        k0 = 1
        while _tail(R, k0) > tol:
            k0 += 1
    return AnnulusSpec(float(R), int(k0), _tail(R, k0))


def annulus_from_eps(eps: float, **kw) -> AnnulusSpec:
    """A_{e^{2 pi eps}}, the z-image of the strip |Im phi| < eps."""
    return annulus_spec(math.exp(TWO_PI * eps), **kw)


def _check(spec: AnnulusSpec, *pts):
    for p in pts:
        if not np.all(spec.contains(p)):
            raise AnnulusDomainError("point outside the closed annulus", R=spec.R)


def gamma_value(z, w, spec: AnnulusSpec):
    """Regular part Gamma_R(z, w); broadcasts over z and w."""
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    _check(spec, z, w)
    R = spec.R
    lR = spec.log_R
    zz, ww = np.broadcast_arrays(z, w)
    out = np.log(np.abs(zz) / R) * np.log(np.abs(ww) / R) / (4 * math.pi * lR)
    acc = np.full(zz.shape, -lR)
    zw = zz / ww
    wz = ww / zz
    wcz = ww * np.conj(zz)
    icw = 1 / (np.conj(zz) * ww)
    with np.errstate(divide="ignore"):
        for k in range(1, spec.truncation_k0 + 1):
            a = R ** (-4 * k)
            b = R ** (-(4 * k - 2))
            acc += np.log(np.abs(1 - a * zw)) + np.log(np.abs(1 - a * wz))
            acc -= np.log(np.abs(1 - b * wcz)) + np.log(np.abs(1 - b * icw))
    out = out + acc / TWO_PI
    return out[()] if out.ndim == 0 else out


def green_value(z, w, spec: AnnulusSpec):
    """G_R(z, w); returns -inf at z = w."""
    zz = np.asarray(z, dtype=np.complex128)
    ww = np.asarray(w, dtype=np.complex128)
    g = np.asarray(gamma_value(zz, ww, spec), dtype=np.float64)
    dist = np.abs(np.broadcast_to(zz, g.shape) - np.broadcast_to(ww, g.shape))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(dist > 0, np.log(np.where(dist > 0, dist, 1.0)) / TWO_PI + g, -np.inf)
    return out[()] if out.ndim == 0 else out


def gamma_closed_form(r: float, w, spec: AnnulusSpec) -> float:
    lR = spec.log_R
    return math.log(r / spec.R) * math.log(abs(w) / spec.R) / (4 * math.pi * lR) - lR / TWO_PI


def circle_trapezoid(func, r: float, start: int = 64, tol: float = 1e-9, max_nodes: int = 1 << 20):
    """Trapezoid average of func(r e^{2 pi i theta}) with node doubling until
    two successive values agree to ``tol``.  Returns (value, nodes)."""
    n = start
    prev = None
    while True:
        th = np.arange(n) / n
        val = math.fsum(np.asarray(func(r * np.exp(2j * np.pi * th)), dtype=np.float64)) / n
        if prev is not None and abs(val - prev) < tol:
            return val, n
        if n >= max_nodes:
            return val, n
        prev = val
        n *= 2


def gamma_circle_integral(r: float, w, spec: AnnulusSpec) -> dict:
    """Quadrature of int_0^1 Gamma_R(r e^{2 pi i theta}, w) d theta next to its closed form."""
    if not (1 / spec.R <= r <= spec.R):
        raise AnnulusDomainError("radius outside the annulus", r=r)
    quad, nodes = circle_trapezoid(lambda z: gamma_value(z, w, spec), r)
    return {"quadrature": quad, "closed_form": gamma_closed_form(r, w, spec), "nodes": nodes}


def jensen_average(z, r1: float, r2: float):
    """sum over s of int log|z - r_s e^{2 pi i theta}| d theta, with r1 r2 = 1, r2 <= r1."""
    if abs(r1 * r2 - 1) > 1e-12 or r2 > r1:
        raise ValueError("need r1 * r2 = 1 and r2 <= r1")
    az = np.abs(np.asarray(z, dtype=np.complex128))
    out = np.where(az < r2, 0.0, np.where(az <= r1, np.log(r1 * np.maximum(az, 1e-300)), 2 * np.log(np.maximum(az, 1e-300))))
    return out[()] if out.ndim == 0 else out


def jensen_quadrature(z: complex, r1: float, r2: float) -> float:
    total = 0.0
    for r in (r1, r2):
        val, _ = circle_trapezoid(lambda x: np.log(np.abs(z - x)), 1.0 if r == 0 else r, start=1024)
        total += val
    return total


def _zero_list(zeros):
    z = getattr(zeros, "zeros", zeros)
    return np.asarray(list(z), dtype=np.complex128)


def potential_decomposition(points, log_f_values, zeros, spec: AnnulusSpec, q: int = 1) -> dict:
    """Harmonic part h = u - 2 pi q^{-1} sum_k G_R(., w_k) of u = q^{-1} log|f|.

    ``points`` are sample positions in the closed annulus and ``log_f_values``
    the samples of u there.  h agrees with u on the boundary circles.
    """
    ws = _zero_list(zeros)
    count = getattr(zeros, "count", None)
    if count is not None and count != ws.size:
        raise IntegrityError(f"inventory lists {ws.size} zeros but the winding count is {count}")
    if ws.size and not np.all(spec.contains(ws, closed=False)):
        raise IntegrityError("inventory contains zeros outside the open annulus")
    pts = np.asarray(points, dtype=np.complex128)
    _check(spec, pts)
    u = np.asarray(log_f_values, dtype=np.float64)
    pot = np.zeros(pts.shape)
    for w in ws:
        pot += green_value(pts, w, spec)
    h = u - TWO_PI * pot / q
    finite = h[np.isfinite(h)]
    flat = float(finite.max() - finite.min()) if finite.size else float("nan")
    return {"harmonic_part": h, "flatness": flat}


def synthesize_potential(points, h_values, zeros, spec: AnnulusSpec, q: int = 1) -> np.ndarray:
    """Inverse of potential_decomposition: u = h + 2 pi q^{-1} sum_k G_R(., w_k)."""
    pts = np.asarray(points, dtype=np.complex128)
    pot = np.zeros(pts.shape)
    for w in _zero_list(zeros):
        pot += green_value(pts, w, spec)
    return np.asarray(h_values, dtype=np.float64) + TWO_PI * pot / q


def detect_families(ws: np.ndarray, q: int, spacing_tol: float = 0.5) -> list:
    """Split zeros into families of q points sharing a radius, each with nearly
    uniform angular spacing 1/q."""
    if ws.size == 0 or ws.size % q or ws.size // q > 2:
        raise FamilyStructureError(f"{ws.size} zeros cannot form at most two families of size {q}")
    order = np.argsort(np.abs(ws))
    fams = [ws[order[i * q:(i + 1) * q]] for i in range(ws.size // q)]
    for fam in fams:
        ang = np.sort(np.mod(np.angle(fam) / TWO_PI, 1.0))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 1]]))
        if np.max(np.abs(gaps * q - 1)) > spacing_tol:
            raise FamilyStructureError("angular spacing is not close to 1/q")
    return fams


def min_term_approximation(z: complex, zeros, q: int) -> dict:
    """Compare q^{-1} sum log|z - w| with its minimum-term plus Jensen approximation."""
    ws = _zero_list(zeros)
    fams = detect_families(ws, q)
    full = math.fsum(np.log(np.abs(z - ws))) / q
    approx = 0.0
    for fam in fams:
        r = float(np.mean(np.abs(fam)))
        approx += float(np.min(np.log(np.abs(z - fam)))) / q + math.log(max(abs(z), r))
    return {"full_sum": full, "min_plus_jensen": approx, "gap": abs(full - approx), "families": len(fams)}

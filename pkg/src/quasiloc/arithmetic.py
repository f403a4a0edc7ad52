"""Continued fractions, torus norms, beta exponents and scale classification.

Frequencies are stored in high precision (mpmath) because the quantities that
matter, ``||q_n omega||``, fall below double precision once q_n exceeds about
1e7.  All public functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .errors import DepthError, RationalFrequencyError

DEFAULT_PRECISION = 50


@dataclass(frozen=True)
class ContinuedFraction:
    """A frequency together with its continued fraction data.

    ``convergents[k-1]`` is ``(p_k, q_k)``; the seed row ``(p_0, q_0) = (0, 1)``
    is implicit.  ``beta_seq[k-1]`` is ``log q_{k+1} / q_k``.
    """

    omega: mpmath.mpf
    partial_quotients: tuple
    convergents: tuple
    beta_seq: tuple
    precision: int = DEFAULT_PRECISION
    source: str = "real"

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    @property
    def omega_float(self) -> float:
        return float(self.omega)

    def q(self, k: int) -> int:
        if k == 0:
            return 1
        if k == -1:
            return 0
        if not 1 <= k <= self.depth:
            raise DepthError(f"convergent index {k} outside stored depth {self.depth}")
        return self.convergents[k - 1][1]

    def p(self, k: int) -> int:
        if k == 0:
            return 0
        if k == -1:
            return 1
        if not 1 <= k <= self.depth:
            raise DepthError(f"convergent index {k} outside stored depth {self.depth}")
        return self.convergents[k - 1][0]

    def a(self, k: int) -> int:
        return self.partial_quotients[k - 1]

    def beta(self, k: int) -> float:
        """beta_k = log q_{k+1} / q_k, available for 1 <= k < depth."""
        if not 1 <= k < self.depth:
            raise DepthError(f"beta_{k} needs q_{k + 1}; depth is {self.depth}")
        return self.beta_seq[k - 1]

    def norm_qk(self, k: int) -> mpmath.mpf:
        """||q_k omega|| evaluated at the stored precision."""
        with mpmath.workdps(self.precision):
            return torus_norm(self.q(k) * self.omega)

    def index_of(self, q: int) -> int:
        for k, (_, qk) in enumerate(self.convergents, start=1):
            if qk == q:
                return k
        raise DepthError(f"q = {q} is not a stored convergent denominator")

    def to_dict(self) -> dict:
        return {
            "omega": mpmath.nstr(self.omega, min(self.precision, 40)),
            "partial_quotients": list(self.partial_quotients),
            "convergents": [[p, q] for p, q in self.convergents],
            "beta_seq": list(self.beta_seq),
            "beta_proxy": beta_proxy(self) if self.depth > 1 else None,
            "beta_proxy_label": "finite-depth proxy (max beta_k over the tail half)",
            "precision": self.precision,
        }


@dataclass(frozen=True)
class ScaleClass:
    """One scale n labeled Weak or Strong against a threshold delta1.

    ``case`` is the four-case label for the pair of scales (n-1, n):
    1 = (Weak, Weak), 2 = (Strong, Weak), 3 = (Weak, Strong), 4 = (Strong, Strong).
    It is ``None`` for n = 1.
    """

    n: int
    qn: int
    qn1: int
    beta_n: float
    kind: str
    case: int | None = None


@dataclass
class NormIdentityReport:
    n: int
    lhs: float
    rhs: float
    residual: float
    window_ok: bool
    window: tuple = field(default_factory=tuple)


def _convergents(quotients: Sequence[int]) -> list:
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    out = []
    for a in quotients:
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append((p, q))
    return out


def _betas(convergents: Sequence) -> list:
    return [math.log(convergents[k + 1][1]) / convergents[k][1] for k in range(len(convergents) - 1)]


def _synthesize(quotients: Sequence[int], dps: int) -> mpmath.mpf:
    """Value of [0; a_1, ..., a_K, a_K, a_K, ...] at ``dps`` digits."""
    with mpmath.workdps(dps):
        a_last = mpmath.mpf(quotients[-1])
        x = (a_last + mpmath.sqrt(a_last * a_last + 4)) / 2
        for a in reversed(quotients[:-1]):
            x = a + 1 / x
        return +(1 / x)


def cf_expand(omega_or_quotients, depth: int | None = None, precision: int = DEFAULT_PRECISION) -> ContinuedFraction:
    """Continued fraction of a real in (0, 1), or of a synthesized quotient list.

    A quotient list [a_1, ..., a_K] defines omega as the infinite continued
    fraction that repeats a_K forever.  Asking for ``depth`` beyond K extends
    the stored quotients accordingly.
    """
    if depth is not None and depth < 1:
        raise ValueError("depth must be >= 1")
    if isinstance(omega_or_quotients, (list, tuple)) and not isinstance(omega_or_quotients, str):
        quotients = [int(a) for a in omega_or_quotients]
        if not quotients or min(quotients) < 1:
            raise ValueError("partial quotients must be positive integers")
        if depth is None:
            depth = len(quotients)
        stored = (quotients + [quotients[-1]] * depth)[:depth]
        conv = _convergents(stored)
        qK = conv[-1][1]
        # enough digits to resolve ||q_K omega|| ~ 1/(a q_K) to ten places
        need = int(2 * math.log10(qK + 1) + math.log10(max(stored[-1], 1) + 1)) + 30
        dps = max(precision, need)
        omega = _synthesize(quotients, dps)
        return ContinuedFraction(omega, tuple(stored), tuple(conv), tuple(_betas(conv)), dps, "quotients")

    if depth is None:
        raise ValueError("depth is required for real input")
    with mpmath.workdps(precision):
        omega = mpmath.mpf(omega_or_quotients)
        if not 0 < omega < 1:
            raise ValueError("omega must lie in (0, 1)")
        tiny = mpmath.mpf(10) ** (-(precision - 5))
        x = omega
        quotients = []
        for _ in range(depth):
            if x < tiny:
                break
            y = 1 / x
            a = int(mpmath.floor(y))
            quotients.append(a)
            x = y - a
        if len(quotients) < depth:
            raise RationalFrequencyError(
                f"expansion terminated after {len(quotients)} quotients; omega is rational to working precision",
                quotients=quotients,
            )
    conv = _convergents(quotients)
    return ContinuedFraction(omega, tuple(quotients), tuple(conv), tuple(_betas(conv)), precision, "real")


def golden(depth: int = 30) -> ContinuedFraction:
    """The golden mean (sqrt 5 - 1)/2 via the all-ones quotient list."""
    return cf_expand([1] * depth)


def torus_norm(x):
    """Distance to the nearest integer; accepts floats, arrays or mpf."""
    if isinstance(x, mpmath.mpf):
        return abs(x - mpmath.nint(x))
    if isinstance(x, np.ndarray):
        return np.abs(x - np.round(x))
    x = float(x)
    return abs(x - round(x))


def qn_norm_identities(cf: ContinuedFraction, n: int) -> NormIdentityReport:
    """Check ||q_{n-1} w|| = a_{n+1} ||q_n w|| + ||q_{n+1} w|| and the window
    1/(2 q_{n+1}) < ||q_n w|| < 1/q_{n+1} at the stored precision."""
    if n < 1 or n + 1 > cf.depth:
        raise DepthError(f"identity at n={n} needs q_{n + 1}; depth is {cf.depth}")
    with mpmath.workdps(cf.precision):
        w = cf.omega
        lhs = torus_norm(cf.q(n - 1) * w)
        rhs = cf.a(n + 1) * torus_norm(cf.q(n) * w) + torus_norm(cf.q(n + 1) * w)
        resid = abs(lhs - rhs)
        val = torus_norm(cf.q(n) * w)
        lo = mpmath.mpf(1) / (2 * cf.q(n + 1))
        hi = mpmath.mpf(1) / cf.q(n + 1)
        ok = bool(lo < val < hi)
        return NormIdentityReport(n, float(lhs), float(rhs), float(resid), ok, (float(lo), float(val), float(hi)))


def classify_scales(cf: ContinuedFraction, delta1: float) -> list:
    """Label each scale Weak (log q_{n+1} < delta1 q_n) or Strong, with the
    four-case label for consecutive pairs.  Ties go to Strong."""
    if delta1 <= 0:
        raise ValueError("delta1 must be positive")
    out = []
    prev_kind = None
    for n in range(1, cf.depth):
        qn, qn1 = cf.q(n), cf.q(n + 1)
        kind = "Strong" if math.log(qn1) >= delta1 * qn else "Weak"
        case = None
        if prev_kind is not None:
            case = {("Weak", "Weak"): 1, ("Strong", "Weak"): 2, ("Weak", "Strong"): 3, ("Strong", "Strong"): 4}[
                (prev_kind, kind)
            ]
        out.append(ScaleClass(n, qn, qn1, cf.beta(n), kind, case))
        prev_kind = kind
    return out


def beta_running_max(cf: ContinuedFraction) -> list:
    out, cur = [], -math.inf
    for b in cf.beta_seq:
        cur = max(cur, b)
        out.append(cur)
    return out


def beta_proxy(cf: ContinuedFraction, tail_start: int | None = None) -> float:
    """Finite-depth stand-in for the lim sup beta(omega).

    The lim sup ignores any finite head of the sequence, so the proxy is the
    maximum of beta_k over the tail k >= tail_start (default: the later half of
    the stored betas).  It is a proxy, not a limit.
    """
    if not cf.beta_seq:
        raise DepthError("beta proxy needs depth >= 2")
    nb = len(cf.beta_seq)
    if tail_start is None:
        tail_start = nb // 2 + 1
    tail_start = min(max(tail_start, 1), nb)
    return max(cf.beta_seq[tail_start - 1:])


def nonresonance_margin(theta, cf: ContinuedFraction, N: int, delta_prime: float) -> float:
    """min over 0 < |n| <= N of ||2 theta + n omega|| e^{delta' |n|}.

    Zero means exact resonance.  Evaluated at the frequency's precision so that
    constructed resonances are resolved.
    """
    if N < 1 or delta_prime <= 0:
        raise ValueError("N >= 1 and delta_prime > 0 required")
    with mpmath.workdps(cf.precision):
        t2 = 2 * mpmath.mpf(theta)
        w = cf.omega
        best = mpmath.inf
        for n in range(1, N + 1):
            growth = mpmath.e ** (delta_prime * n)
            for s in (n, -n):
                val = torus_norm(t2 + s * w) * growth
                if val < best:
                    best = val
        return float(best)


def best_approximation_gap(cf: ContinuedFraction, n: int) -> float:
    """min over 1 <= k < q_{n+1}, k != q_n of ||k w|| - ||q_n w||; positive
    when q_n is the best approximant in that range.  Double precision, meant
    for q_{n+1} up to about 1e6."""
    qn, qn1 = cf.q(n), cf.q(n + 1)
    w = cf.omega_float
    k = np.arange(1, qn1, dtype=np.int64)
    k = k[k != qn]
    if k.size == 0:
        return math.inf
    x = np.mod(k * w, 1.0)
    norms = np.minimum(x, 1 - x)
    return float(norms.min() - float(cf.norm_qk(n)))

import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from quasiloc.arithmetic import (beta_proxy, cf_expand, classify_scales, golden, nonresonance_margin,
                                 qn_norm_identities, torus_norm)
from quasiloc.errors import DepthError, RationalFrequencyError


def test_golden_convergents_are_fibonacci():
    cf = golden(20)
    fib = [1, 1]
    while len(fib) < 22:
        fib.append(fib[-1] + fib[-2])
    assert [cf.q(k) for k in range(1, 21)] == fib[1:21]
    assert abs(cf.omega_float - (math.sqrt(5) - 1) / 2) < 1e-15


def test_sqrt2_quotients_from_decimal():
    with mpmath.workdps(60):
        x = mpmath.sqrt(2) - 1
        cf = cf_expand(mpmath.nstr(x, 55), depth=25, precision=60)
    assert list(cf.partial_quotients) == [2] * 25


def test_rational_input_is_rejected():
    with pytest.raises(RationalFrequencyError):
        cf_expand("0.375", depth=10)


def test_depth_errors():
    cf = golden(5)
    with pytest.raises(DepthError):
        cf.q(6)
    with pytest.raises(DepthError):
        cf.index_of(7)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=3, max_size=12))
def test_convergent_invariants(quotients):
    cf = cf_expand(quotients)
    for k in range(1, cf.depth):
        p, q = cf.p(k), cf.q(k)
        assert math.gcd(p, q) == 1
        assert cf.q(k + 1) == cf.a(k + 1) * q + cf.q(k - 1)
        assert cf.p(k + 1) * q - p * cf.q(k + 1) == (-1) ** k
        nrm = float(cf.norm_qk(k))
        assert 1 / (2 * cf.q(k + 1)) < nrm < 1 / cf.q(k + 1)


def test_torus_norm_basic():
    assert torus_norm(0.25) == pytest.approx(0.25)
    assert torus_norm(0.75) == pytest.approx(0.25)
    assert torus_norm(-1.1) == pytest.approx(0.1)


def test_norm_identities_golden():
    # with a_1 = 1 the torus norm of q_0 omega differs from |q_0 omega - p_0|, so start at n = 2
    for n in range(2, 19):
        rep = qn_norm_identities(golden(20), n)
        assert rep.residual < 1e-40
        assert rep.window_ok


def test_classification_threshold_ties_are_strong():
    cf = cf_expand([1] * 7 + [10 ** 7])
    q7, q8 = cf.q(7), cf.q(8)
    d1 = math.log(q8) / q7
    kinds = {s.n: s.kind for s in classify_scales(cf, d1)}
    assert kinds[7] == "Strong"
    kinds = {s.n: s.kind for s in classify_scales(cf, d1 * 1.0001)}
    assert kinds[7] == "Weak"


def test_beta_proxy_liouville_exceeds_golden():
    assert beta_proxy(golden(30)) < 0.1
    assert beta_proxy(cf_expand([1] * 7 + [10 ** 7])) > 0.5


def test_nonresonance_margin_detects_constructed_resonance():
    cf = golden(30)
    assert nonresonance_margin(0.1, cf, 100, 0.01) > 0
    with mpmath.workdps(cf.precision):
        theta = -cf.omega / 2
    assert nonresonance_margin(theta, cf, 10, 0.01) < 1e-30

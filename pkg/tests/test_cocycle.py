import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiloc.cocycle import (dirichlet_det, lyapunov_finite, lyapunov_rational, log_norms, trace_f,
                              transfer_batch, transfer_product)
from quasiloc.model import Potential, amo, zero_potential

W = (math.sqrt(5) - 1) / 2


def naive_product(E, v, omega, theta, n):
    M = np.eye(2, dtype=complex)
    for j in range(n):
        A = np.array([[E - v(theta + j * omega), -1.0], [1.0, 0.0]], dtype=complex)
        M = A @ M
    return M


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(0, 1), st.integers(1, 40))
def test_product_matches_naive(E, theta, n):
    v = amo(1.3)
    ref = naive_product(E, v, W, theta, n)
    mats, logs = transfer_batch(E, v, W, np.array([theta]), n)
    got = mats[0] * math.exp(logs[0])
    assert np.allclose(got, ref, rtol=1e-9, atol=1e-9 * np.abs(ref).max())


def test_complex_phase_product():
    v = amo(2.0)
    ph = 0.2 + 0.03j
    mats, logs = transfer_batch(0.4, v, W, np.array([ph]), 30)
    ref = naive_product(0.4, v, W, ph, 30)
    assert np.allclose(mats[0] * math.exp(logs[0]), ref, rtol=1e-9)


def test_det_residual_long_product():
    st_ = transfer_product(0.1, amo(2.0), W, 0.3, 10 ** 5)
    assert st_.det_residual < 1e-6


def test_dirichlet_det_matches_matrix_determinant():
    v = amo(0.7)
    E, theta, n = 0.3, 0.2, 25
    sites = np.arange(n)
    H = np.diag(v(theta + sites * W).real) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)
    sign, logdet = np.linalg.slogdet(E * np.eye(n) - H)
    lv = dirichlet_det(E, v, W, theta, n)
    assert float(lv.log_abs) == pytest.approx(logdet, rel=1e-10)
    assert np.sign(np.real(lv.phase)) == sign


def test_free_trace_oracle():
    v = zero_potential()
    for rho in (0.3, 1.1, 2.5):
        E = 2 * math.cos(rho)
        for n in (1, 5, 300):
            f = trace_f(E, v, W, 0.0, n).value()
            assert complex(f).real == pytest.approx(2 - 2 * math.cos(n * rho), abs=1e-9)


def test_lyapunov_herman_value():
    # for lam > 1 the exponent on the spectrum equals log lam
    L = lyapunov_finite(-4.2650959128957, amo(2.0), W, 0.0, 10 ** 4, 256)
    assert abs(L - math.log(2)) < 0.01


def test_lyapunov_free_is_zero_inside_band():
    assert abs(lyapunov_finite(1.0, zero_potential(), W, 0.0, 2000, 64)) < 0.01


def test_rational_exponent_matches_monodromy_eigenvalue():
    v = amo(2.0)
    p, q, theta, E = 13, 21, 0.17, 3.0
    M = naive_product(E, v, p / q, theta, q)
    ref = math.log(max(abs(np.linalg.eigvals(M)))) / q
    got = float(np.asarray(lyapunov_rational(E, v, (p, q), theta)))
    assert got == pytest.approx(ref, rel=1e-8)


def test_log_norms_shape_and_lower_bound():
    th = np.linspace(0, 1, 16, endpoint=False)
    ln = log_norms(0.2, amo(2.0), W, th, 0.0, 50)
    assert ln.shape == th.shape
    assert np.all(ln >= 0)

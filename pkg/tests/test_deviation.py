import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasiloc.deviation import (block_sum_checks, complexity_report, deviation_set, even_pairing_check,
                                fejer_closed_form, fejer_kernel, fourier_bound_check, fourier_diagnostics,
                                fr1_grid_check, ldt_band_decomposition, sublevel_set, synthetic_deviation_set,
                                synthetic_dips)
from quasiloc.errors import AliasingError, BandRegimeError
from quasiloc.arithmetic import cf_expand

W = (math.sqrt(5) - 1) / 2


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 200), st.integers(-5000, 5000))
def test_fejer_direct_equals_closed_form(R, k):
    assert fejer_kernel(R, k, W) == pytest.approx(float(fejer_closed_form(R, k, W)), abs=1e-10)


def test_fejer_at_zero_and_fr1(gold):
    assert all(abs(fejer_kernel(R, 0, W) - 1) < 1e-12 for R in (1, 7, 256))
    assert fr1_grid_check(gold, 64, 2000)["pass"]


def test_block_sums(gold):
    assert block_sum_checks(gold, 2000)["pass"]


def test_sublevel_set_of_cosine_is_exact():
    arcs, grid, flags, _, _ = sublevel_set(lambda t: np.cos(2 * np.pi * t), 0.0, grid=1 << 10)
    assert len(arcs) == 1
    a, b = arcs[0]
    assert a == pytest.approx(0.25, abs=1e-11) and b == pytest.approx(0.75, abs=1e-11)


def test_sublevel_set_wraps_through_zero():
    arcs, *_ = sublevel_set(lambda t: -np.cos(2 * np.pi * t), 0.0, grid=1 << 10)
    assert len(arcs) == 1
    a, b = arcs[0]
    assert a == pytest.approx(0.75, abs=1e-11) and b == pytest.approx(1.25, abs=1e-11)


def test_sublevel_set_finds_sub_grid_dip():
    # log-type basin of a zero at distance a from the real axis, as v_m has
    c, a = 0.3001234, 1e-7
    f = lambda t: np.log((np.mod(t - c + 0.5, 1) - 0.5) ** 2 + a * a)
    arcs, _, flags, _, _ = sublevel_set(f, math.log(2 * a * a), grid=1 << 10, max_grid=1 << 11)
    assert len(arcs) == 1
    lo, hi = arcs[0]
    assert lo == pytest.approx(c - a, abs=1e-12) and hi == pytest.approx(c + a, abs=1e-12)
    assert any("sub-grid" in fl for fl in flags)


def test_deviation_set_amo(gold, amo2, E_mid):
    ds = deviation_set(E_mid, amo2, gold, 50, 0.3, relative=True)
    rep = complexity_report(ds, 1, 0.01)
    assert rep["pass"]
    assert ds.component_count <= 101
    assert even_pairing_check(ds, gold)["paired_fraction"] == 1.0
    for a, b in ds.arcs:
        assert b > a


def test_deviation_set_argument_checks(gold, amo2):
    with pytest.raises(ValueError):
        deviation_set(0.0, amo2, gold, 3, 0.1)
    with pytest.raises(ValueError):
        deviation_set(0.0, amo2, gold, 50, 0.1, base_grid=1 << 10)


def test_negative_control_rejected():
    m = 40
    ds = synthetic_deviation_set(synthetic_dips(m), m, level=-0.5)
    assert ds.component_count == 3 * m
    assert not complexity_report(ds, 1, 0.01)["pass"]


def test_fourier_diagnostics_and_bounds(gold, amo2, E_mid):
    d = fourier_diagnostics(E_mid, amo2, gold, 32, 128)
    assert d.C_v >= d.C_v2 > 0
    assert fourier_bound_check(d, None, gold)["pass"]
    with pytest.raises(AliasingError):
        fourier_diagnostics(E_mid, amo2, gold, 32, 128, nodes=256)


def test_band_decomposition_comparable(gold, amo2, E_mid):
    res = ldt_band_decomposition(E_mid, amo2, gold, 80, 0.3, 9, variant="comparable")
    assert all(res["within"].values())


def test_band_decomposition_regime_check(amo2, E_mid):
    cf = cf_expand([1] * 7 + [10 ** 7])
    with pytest.raises(BandRegimeError):
        ldt_band_decomposition(E_mid, amo2, cf, 80, 0.3, 7, variant="comparable")

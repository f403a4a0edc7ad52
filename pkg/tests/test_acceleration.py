import math

import numpy as np
import pytest

from quasiloc.acceleration import (acceleration_estimate, compute_profile, convexity_defect, evenness_defect,
                                   linearity_defect, rational_uniformity, stratum_classify, window_profile)
from quasiloc.errors import OutOfStripError, WindowError
from quasiloc.model import amo, derive_constants, zero_potential


def test_supercritical_profile_is_affine(gold, amo2, E_mid):
    prof = window_profile(E_mid, amo2, gold, n=4000)
    est = acceleration_estimate(prof)
    assert est["kappa_int"] == 1 and est["residual"] < 0.05
    # L(eps) = log 2 + 2 pi eps on the window
    assert np.allclose(prof.values, math.log(2) + 2 * np.pi * prof.eps_grid, atol=0.01)
    assert linearity_defect(prof)["relative"] < 1e-3
    assert convexity_defect(prof) > -1e-6


def test_subcritical_and_free(gold):
    est = acceleration_estimate(window_profile(0.0, amo(0.5), gold, n=4000))
    assert est["kappa_int"] == 0
    est = acceleration_estimate(window_profile(1.0, zero_potential(), gold, n=4000))
    assert est["kappa_int"] == 0


def test_window_errors(gold, amo2):
    prof = compute_profile(0.0, amo2, gold, [0.01, 0.02], n=100)
    with pytest.raises(WindowError):
        acceleration_estimate(prof, (0.01, 0.03))
    with pytest.raises(WindowError):
        acceleration_estimate(prof, (0.0, 0.03))
    with pytest.raises(OutOfStripError):
        compute_profile(0.0, amo2, gold, [0.06], n=10)


def test_evenness(gold, amo2, E_mid):
    assert evenness_defect(E_mid, amo2, gold, [0.01, 0.02], 1000) < 1e-10


def test_stratum_echoes_inputs(gold, amo2, E_mid):
    pc = derive_constants(amo2, math.log(2), 0.0, 2.8)
    res = stratum_classify(E_mid, amo2, gold, pc, n=2000)
    assert res["first_supercritical"]
    assert res["status"] == "resolved"
    assert res["E"] == E_mid and res["window"] == [0.01, 0.03]


def test_rational_uniformity_improves_off_axis(gold, amo2, E_mid):
    r0 = rational_uniformity(E_mid, amo2, gold, gold.index_of(21), 0.0)
    r1 = rational_uniformity(E_mid, amo2, gold, gold.index_of(21), 0.025)
    assert r1["max_dev"] < r0["max_dev"]
    assert abs(r0["mean_rational"] - math.log(2)) < 0.03

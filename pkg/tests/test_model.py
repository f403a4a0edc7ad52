import math

import numpy as np
import pytest

from quasiloc.errors import OutOfStripError, RegimeError
from quasiloc.model import Potential, amo, derive_constants, zero_potential


def test_amo_values():
    v = amo(2.0)
    assert v(0.0) == pytest.approx(4.0)
    assert v(0.5) == pytest.approx(-4.0)
    assert v(0.1 + 0.01j) == pytest.approx(4 * np.cos(2 * np.pi * (0.1 + 0.01j)))


def test_strip_is_enforced():
    v = amo(2.0, eps0=0.05)
    v(0.3 + 0.05j)
    with pytest.raises(OutOfStripError):
        v(0.3 + 0.06j)


def test_sup_bound_dominates_samples():
    v = Potential((0.3, 1.0, -0.5), eps0=0.04)
    th = np.linspace(0, 1, 400)
    for e in (-0.04, 0.0, 0.04):
        assert np.max(np.abs(v(th + 1j * e))) <= v.sup_bound + 1e-12


def test_zero_potential():
    v = zero_potential()
    assert v.is_zero
    assert np.all(v(np.linspace(0, 1, 5)) == 0)


def test_constants_regime_and_eta_ceiling():
    v = amo(2.0)
    with pytest.raises(RegimeError):
        derive_constants(v, 0.1, 0.2, 2.0)
    pc = derive_constants(v, math.log(2), 0.0, 2.8)
    assert pc.eta <= 0.01 * (1 + 1e-12)
    assert pc.in_regime
    assert pc.delta1 == pytest.approx(pc.delta1_quarter ** 4)
    # without a working value the formula delta_1 is used for both
    assert pc.working_delta1 == pc.delta1
    pw = derive_constants(v, math.log(2), 0.0, 2.8, working_delta1=1e-4)
    assert pw.working_eta > pc.eta

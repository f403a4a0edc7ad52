import math

import numpy as np
import pytest

from quasiloc.arithmetic import golden
from quasiloc.errors import ZeroStructureError
from quasiloc.zeros import (CallableHandle, TraceHandle, circle_winding, conj_closure, count_zeros,
                            locate_zeros, rational_zero_structure, reflect, reflection_identity_residual,
                            rotation_closure)

KNOWN = np.array([1.05 * np.exp(0.4j), 0.97 * np.exp(2.2j), 1.01 * np.exp(-1.3j)])


def poly(z):
    out = np.ones_like(z)
    for w in KNOWN:
        out = out * (z - w)
    return out * (z - 3.0)  # one zero outside the annulus


def test_winding_on_circle():
    w, _ = circle_winding(CallableHandle(poly), 1.0)
    assert w == 1  # only the zero of radius 0.97 lies inside
    assert count_zeros(CallableHandle(poly), 0.025) == 3


def test_locate_known_polynomial_zeros():
    inv = locate_zeros(CallableHandle(poly), 0.025)
    assert inv.count == 3
    got = np.sort_complex(inv.zeros)
    assert np.max(np.abs(got - np.sort_complex(KNOWN))) < 1e-10


def test_rational_structure_counts(gold, amo2, E_mid):
    for q in (13, 21):
        rs = rational_zero_structure(E_mid, amo2, gold, gold.index_of(q), 0.025)
        assert rs.count == 2 * q
        assert rs.r1r2 == pytest.approx(1.0, abs=1e-8)
        assert rs.rotation_residual < 1e-9
        assert conj_closure(rs.inventory) < 1e-8


def test_rational_structure_rejects_wrong_count(gold, amo2):
    # far outside the spectrum f has no zeros near the unit circle
    with pytest.raises(ZeroStructureError):
        rational_zero_structure(40.0, amo2, gold, gold.index_of(13), 0.025)


def test_irrational_inventory_closures(gold, amo2, E_mid):
    inv = locate_zeros(TraceHandle(E_mid, amo2, gold, 13), 0.025)
    assert inv.complete
    assert conj_closure(inv) < 1e-8


def test_rotation_closure_exact_family():
    q, p = 8, 3
    zs = 1.02 * np.exp(2j * np.pi * (np.arange(q) / q + 0.01))

    class Inv:
        zeros = zs

    assert rotation_closure(Inv, p, q) < 1e-14


def test_reflection_identity(gold, amo2, E_mid):
    w = gold.omega_float
    assert reflection_identity_residual(TraceHandle(E_mid, amo2, gold, 21), w, 21) < 1e-8
    z = np.array([1.1 + 0.2j])
    assert np.allclose(reflect(reflect(z, w, 21), w, 21), z)


def test_reflection_residual_detects_asymmetric_function(gold):
    fn = CallableHandle(lambda z: z + 0.3 / z ** 2 + 2.0)
    assert reflection_identity_residual(fn, gold.omega_float, 21) > 1e-3


def test_identically_zero_trace_is_not_counted():
    from quasiloc.errors import WindingError
    from quasiloc.model import zero_potential
    # v = 0, E = 0: M_4 is the identity at every phase, so f vanishes identically
    with pytest.raises(WindingError):
        count_zeros(TraceHandle(0.0, zero_potential(), (1, 4), 4), 0.025)

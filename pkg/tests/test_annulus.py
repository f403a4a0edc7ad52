import math

import numpy as np
import pytest

from quasiloc.annulus import (annulus_from_eps, annulus_spec, gamma_circle_integral, green_value, jensen_average,
                              jensen_quadrature, min_term_approximation, potential_decomposition,
                              synthesize_potential)
from quasiloc.errors import AnnulusDomainError, FamilyStructureError, IntegrityError

SPEC = annulus_from_eps(0.025)


def rand_pts(rng, n, spec):
    return rng.uniform(1 / spec.R, spec.R, n) * np.exp(2j * np.pi * rng.random(n))


def test_truncation_tail_below_tolerance():
    assert SPEC.tail_bound <= 1e-16
    assert SPEC.R == pytest.approx(math.exp(2 * math.pi * 0.025))


def test_green_vanishes_on_both_circles():
    rng = np.random.default_rng(0)
    w = rand_pts(rng, 10, SPEC)
    for r in (SPEC.R, 1 / SPEC.R):
        z = r * np.exp(2j * np.pi * rng.random(10))
        assert np.max(np.abs(green_value(z[:, None], w[None, :], SPEC))) < 1e-10


def test_green_symmetric_rotation_invariant_and_negative():
    rng = np.random.default_rng(1)
    z, w = rand_pts(rng, 50, SPEC), rand_pts(rng, 50, SPEC)
    g = green_value(z, w, SPEC)
    assert np.max(np.abs(g - green_value(w, z, SPEC))) < 1e-12
    a = np.exp(2j * np.pi * 0.37)
    assert np.max(np.abs(g - green_value(a * z, a * w, SPEC))) < 1e-12
    inner = np.abs(z) * 0.98 + 0.02 * 1.0  # pull towards the unit circle
    assert np.all(green_value(inner * np.exp(1j * np.angle(z)), w, SPEC) < 1e-12)


def test_green_is_harmonic_away_from_pole():
    w, z, h = 1.05 + 0.02j, 0.95 - 0.03j, 1e-4
    lap = sum(green_value(z + d, w, SPEC) for d in (h, -h, 1j * h, -1j * h)) - 4 * green_value(z, w, SPEC)
    assert abs(lap / h ** 2) < 1e-4


def test_circle_integral_closed_form():
    rng = np.random.default_rng(2)
    for _ in range(10):
        r = rng.uniform(1 / SPEC.R, SPEC.R)
        res = gamma_circle_integral(r, rand_pts(rng, 1, SPEC)[0], SPEC)
        assert abs(res["quadrature"] - res["closed_form"]) < 1e-8


def test_domain_errors():
    with pytest.raises(AnnulusDomainError):
        green_value(2.0, 1.0, SPEC)
    with pytest.raises(ValueError):
        annulus_spec(0.9)


@pytest.mark.parametrize("rad", [0.2, 0.7, 0.85, 1.0, 1.2, 1.3, 3.0])
def test_jensen_branches(rad):
    r1 = 1.25
    z = rad * np.exp(0.4j)
    assert float(jensen_average(z, r1, 1 / r1)) == pytest.approx(jensen_quadrature(z, r1, 1 / r1), abs=1e-8)


def test_jensen_continuous_across_circles():
    r1 = 1.25
    for r in (r1, 1 / r1):
        lo, hi = jensen_average(np.array([r * (1 - 1e-12), r * (1 + 1e-12)]), r1, 1 / r1)
        assert abs(lo - hi) < 1e-10


def test_decomposition_round_trip_and_boundary_agreement():
    rng = np.random.default_rng(3)
    zeros = np.array([1.02 * np.exp(0.3j), 0.97 * np.exp(2.0j)])
    pts = rand_pts(rng, 40, SPEC)
    u = np.log(np.abs(pts[:, None] - zeros[None, :])).sum(axis=1)
    dec = potential_decomposition(pts, u, zeros, SPEC)
    assert np.allclose(synthesize_potential(pts, dec["harmonic_part"], zeros, SPEC), u, atol=1e-12)
    circ = SPEC.R * np.exp(2j * np.pi * rng.random(8))
    ub = np.log(np.abs(circ[:, None] - zeros[None, :])).sum(axis=1)
    assert np.allclose(potential_decomposition(circ, ub, zeros, SPEC)["harmonic_part"], ub, atol=1e-10)


def test_decomposition_rejects_bad_inventory():
    with pytest.raises(IntegrityError):
        potential_decomposition([1.0], [0.0], [1.5], SPEC)


def test_min_term_families():
    q = 13
    fam = 1.05 * np.exp(2j * np.pi * (np.arange(q) + 0.1) / q)
    res = min_term_approximation(1.0, np.concatenate([fam, 1 / np.conj(fam)]), q)
    assert res["families"] == 2
    assert res["gap"] < 1.0
    with pytest.raises(FamilyStructureError):
        min_term_approximation(1.0, fam[:5], q)

import math

import numpy as np
import pytest

from quasiloc.arithmetic import cf_expand
from quasiloc.errors import PartitionError, UnderflowRangeError
from quasiloc.localization import (box_potential, decay_audit, eigen_solve_box, green_expansion_residual,
                                   green_expansion_terms, partition_covers, random_nonresonant_intervals,
                                   resonant_partition, scale_cases, scale_gluing, top_normalized_pair)
from quasiloc.model import amo, derive_constants, zero_potential


@pytest.fixture(scope="module")
def top_pair(gold, amo2):
    return top_normalized_pair(eigen_solve_box(amo2, gold, 0.1, 400))


def test_eigenpair_solves_the_box_equation(top_pair):
    p = top_pair
    vv = box_potential(p.v, p.omega, p.theta, p.N)
    phi = p.phi
    Hphi = vv * phi
    Hphi[1:] += phi[:-1]
    Hphi[:-1] += phi[1:]
    big = np.abs(phi) > 1e-200
    assert np.max(np.abs(Hphi - p.E * phi)[big]) < 1e-10
    assert p.residual < 1e-10
    assert max(abs(phi[p.index(0)]), abs(phi[p.index(-1)])) == pytest.approx(1.0)


def test_expansion_matches_direct_solve(top_pair):
    p = top_pair
    m1, m2 = 20, 60
    vv = box_potential(p.v, p.omega, p.theta, p.N)[p.index(m1):p.index(m2) + 1]
    k = m2 - m1 + 1
    A = p.E * np.eye(k) - (np.diag(vv) + np.diag(np.ones(k - 1), 1) + np.diag(np.ones(k - 1), -1))
    rhs = np.zeros(k)
    rhs[0] = p.phi[p.index(m1 - 1)]
    rhs[-1] = p.phi[p.index(m2 + 1)]
    direct = np.linalg.solve(A, rhs)
    assert np.allclose(direct, p.phi[p.index(m1):p.index(m2) + 1], rtol=1e-8, atol=1e-300)
    h = 35
    t = green_expansion_terms(p, m1, m2, h)
    val = t["sign_a"] * math.exp(t["log_a"]) + t["sign_b"] * math.exp(t["log_b"])
    assert val == pytest.approx(direct[h - m1], rel=1e-8)


def test_free_box_expansion():
    pairs = eigen_solve_box(zero_potential(), 0.5, 0.0, 100)
    p = pairs[len(pairs) // 3]
    assert green_expansion_residual(p, -30, 10, -5) < 1e-8


def test_random_intervals_are_deterministic(top_pair):
    a = random_nonresonant_intervals(top_pair, 20, math.log(2), 0.05 * math.log(2), seed=4)
    b = random_nonresonant_intervals(top_pair, 20, math.log(2), 0.05 * math.log(2), seed=4)
    assert a == b and len(a) == 20
    assert max(green_expansion_residual(top_pair, *x) for x in a) < 1e-6


def test_partition_tiles_window(gold, amo2):
    pc = derive_constants(amo2, math.log(2), 0.0, 2.8, working_delta1=1e-8)
    part = resonant_partition(gold, 5, pc, 200)
    assert partition_covers(part)
    assert all(lo <= ell * part.q <= hi for ell, lo, hi in part.regimes)
    big = derive_constants(amo2, math.log(2), 0.0, 1.0, working_delta1=0.5)
    with pytest.raises(PartitionError):
        resonant_partition(gold, 5, big, 200)


def test_gluing_case_labels():
    # weak scales need q_n far beyond e^{...}; a huge quotient then forces a strong one
    cf = cf_expand([1] * 36 + [10 ** 120, 1, 1, 1])
    pc = derive_constants(amo(2.0), math.log(2), 0.0, 1.0, working_delta1=1e-5)
    assert pc.working_c0 < 1
    cases = {k: scale_gluing(cf, k, pc)["case"] for k in range(30, 39)}
    assert cases[30] == 4 and cases[32] == 1 and cases[36] == 3 and cases[37] == 2
    assert all(scale_gluing(cf, k, pc)["gap_free"] for k in range(30, 39))
    labels = scale_cases(cf, pc)
    assert labels[0] is None and set(labels[1:]) <= {1, 2, 3, 4}


def test_decay_audit(gold, top_pair):
    L = math.log(2)
    pc = derive_constants(top_pair.v, L, 0.0, 1.0)
    audit = decay_audit(top_pair, gold, pc, (50, 300), L)
    assert audit["fitted_rate"] > 0.5 * L
    assert not audit["weak_bound_violations"]


def test_underflow_range_error(gold):
    pair = top_normalized_pair(eigen_solve_box(amo(8.0), gold, 0.1, 1000))
    pc = derive_constants(pair.v, math.log(8), 0.0, 1.0)
    with pytest.raises(UnderflowRangeError):
        decay_audit(pair, gold, pc, (900, 1000), math.log(8))

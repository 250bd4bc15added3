"""
Test exact and noisy probability oracles
"""

from fractions import Fraction

import math

import pytest

from app.core.exceptions import PreconditionError
from app.services.estimator import dis_estimator, estimate, exact_estimator, noisy_estimator


def test_exact_estimator(and_fam, identity1):
    assert estimate(exact_estimator(and_fam), "", "1").value == Fraction(1, 4)
    assert estimate(exact_estimator(identity1), "1", "1").value == 1
    assert estimate(exact_estimator(identity1), "1", "0").value == 0


def test_exact_estimator_is_repeatable(and_fam):
    est = exact_estimator(and_fam)
    assert est.estimate("", "0", 3) == est.estimate("", "0", 3)


def test_noisy_value_within_precision(and_fam):
    est = noisy_estimator(and_fam, 10**6, 10**6, seed=1)
    for counter in range(200):
        result = est.estimate("", "1", counter)
        if not result.failed:
            assert 0.24999975 <= result.value <= 0.25000025


def test_noisy_preserves_zero(identity1):
    est = noisy_estimator(identity1, 4, 2, seed=3)
    assert all(est.estimate("1", "0", c).value == 0 for c in range(100))


def test_noisy_is_deterministic(and_fam):
    first = noisy_estimator(and_fam, 8, 4, seed=21)
    second = noisy_estimator(and_fam, 8, 4, seed=21)
    assert [first.estimate("", "1", c) for c in range(50)] == [second.estimate("", "1", c) for c in range(50)]


def test_multiplicative_soundness():
    from app.core.fixtures import uniform_family

    est = noisy_estimator(uniform_family(0, 1), 4, 8, seed=5)
    for counter in range(500):
        result = est.estimate("", "0", counter)
        if not result.failed:
            assert 0.375 <= result.value <= 0.625


def test_failure_rate():
    from app.core.fixtures import identity_family

    n = 10_000
    est = noisy_estimator(identity_family(1), 4, 2, seed=17)
    _, failed = est.noise_factors(0, n)
    rate = failed.mean()
    assert abs(rate - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_block_matches_single_queries(and_fam):
    est = noisy_estimator(and_fam, 16, 3, seed=8)
    factors, failed = est.noise_factors(10, 40, lane=1)
    for i in range(40):
        single = est.estimate("", "1", 10 + i, lane=1)
        assert single.failed == bool(failed[i])
        assert single.value == pytest.approx(0.25 * factors[i])


def test_noisy_parameters_checked(and_fam):
    with pytest.raises(PreconditionError):
        noisy_estimator(and_fam, 1, 4, seed=0)
    with pytest.raises(PreconditionError):
        noisy_estimator(and_fam, 4, 1, seed=0)


def test_dis_estimator_precision(and_fam):
    est = dis_estimator(and_fam, eps=2, seed=0)
    assert est.eps_mult == 1000
    assert est.fail == 1000

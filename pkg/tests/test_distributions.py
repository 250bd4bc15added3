"""
Test exact distributions, statistical distance and KL divergence
"""

from fractions import Fraction

import numpy as np
import pytest

from app.core import rng as lab_rng
from app.core.distributions import (
    Distribution,
    kl_divergence,
    sample_distribution,
    statistical_distance,
    tensor_power,
    tensor_sd,
)
from app.core.exceptions import LengthMismatchError, PreconditionError, SizeLimitError, SupportViolationError
from app.core.fixtures import random_pairs

SKEW = Distribution({"0": "3/4", "1": "1/4"})
FLIP = Distribution({"0": "1/4", "1": "3/4"})


def test_probabilities_must_sum_to_one():
    with pytest.raises(PreconditionError):
        Distribution({"0": "1/2", "1": "1/3"})


def test_zero_entries_are_dropped():
    dist = Distribution({"00": 1, "01": 0})
    assert dist.support() == ("00",)
    assert dist.prob("01") == 0


def test_statistical_distance_examples():
    assert statistical_distance(SKEW, SKEW) == 0
    assert statistical_distance(Distribution.point_mass("0"), Distribution.point_mass("1")) == 1
    assert statistical_distance(SKEW, FLIP) == Fraction(1, 2)


def test_statistical_distance_needs_same_length():
    with pytest.raises(LengthMismatchError):
        statistical_distance(SKEW, Distribution.uniform(2))


def test_sd_axioms_on_random_pairs():
    pairs = random_pairs(seed=11, count=30)
    for p, q in pairs:
        assert statistical_distance(p, q) == statistical_distance(q, p)
        assert statistical_distance(p, p) == 0
    for (p, q), (_, r) in zip(pairs, pairs[1:]):
        if p.support_len == q.support_len == r.support_len:
            assert statistical_distance(p, r) <= statistical_distance(p, q) + statistical_distance(q, r)


def test_kl_divergence_examples():
    assert kl_divergence(SKEW, SKEW) == 0
    assert kl_divergence(Distribution.point_mass("0"), Distribution.uniform(1)) == pytest.approx(1.0)
    with pytest.raises(SupportViolationError):
        kl_divergence(Distribution.uniform(1), Distribution.point_mass("0"))


def test_kl_is_nonnegative():
    for p, q in random_pairs(seed=5, count=20):
        if all(q.prob(x) > 0 for x in p.support()):
            assert kl_divergence(p, q) >= 0


def test_tensor_power_examples():
    assert tensor_power(SKEW, 1) == SKEW
    assert tensor_power(Distribution.point_mass("0"), 3) == Distribution.point_mass("000")
    assert tensor_power(SKEW, 2) == Distribution({"00": "9/16", "01": "3/16", "10": "3/16", "11": "1/16"})


def test_tensor_power_cap():
    with pytest.raises(SizeLimitError):
        tensor_power(Distribution.uniform(5), 5)


def test_tensor_sd_matches_explicit_power():
    for t in range(1, 5):
        assert tensor_sd(SKEW, FLIP, t) == statistical_distance(tensor_power(SKEW, t), tensor_power(FLIP, t))


def test_mix():
    mixed = Distribution.point_mass("0").mix(Distribution.uniform(1), Fraction(1, 2))
    assert mixed == SKEW


def test_sample_distribution_is_seeded():
    first = sample_distribution(SKEW, 50, lab_rng.generator(3))
    second = sample_distribution(SKEW, 50, lab_rng.generator(3))
    assert first == second
    assert set(first) <= {"0", "1"}


def test_sample_distribution_frequency():
    draws = sample_distribution(SKEW, 4000, lab_rng.generator(7))
    assert abs(np.mean([x == "1" for x in draws]) - 0.25) < 0.05

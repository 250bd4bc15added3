"""
Test closed-form bounds and their checks
"""

from fractions import Fraction

import pytest

from app.core.distributions import Distribution
from app.core.exceptions import PreconditionError
from app.services.bounds import (
    amplification_bound,
    hoeffding_T,
    verify_hoeffding_empirical,
    verify_tensor_amplification,
)

SKEW = Distribution({"0": "3/4", "1": "1/4"})
FLIP = Distribution({"0": "1/4", "1": "3/4"})


def test_hoeffding_examples():
    assert hoeffding_T(1, 0.1, 0.01, 10) == 1665
    assert hoeffding_T(1, 1, 0.5, 0) == 1


def test_hoeffding_scaling_in_m():
    base = hoeffding_T(1, 0.1, 0.01, 10)
    doubled = hoeffding_T(2, 0.1, 0.01, 10)
    assert 4 * base - 3 <= doubled <= 4 * base


def test_tight_variant_is_smaller():
    assert hoeffding_T(1, 0.1, 0.01, 10, tight=True) < hoeffding_T(1, 0.1, 0.01, 10)


def test_hoeffding_rejects_nonpositive():
    with pytest.raises(PreconditionError):
        hoeffding_T(0, 0.1, 0.1, 1)
    with pytest.raises(PreconditionError):
        hoeffding_T(1, 0.1, 0, 1)


def test_amplification_on_disjoint_points():
    reports = verify_tensor_amplification(Distribution.point_mass("0"), Distribution.point_mass("1"), 1, 2)
    assert reports[-1].observed == 1
    assert reports[-1].predicted < 1
    assert all(r.holds for r in reports)


def test_amplification_vacuous_and_exact():
    reports = verify_tensor_amplification(SKEW, FLIP, 2, 6)
    assert reports[1].observed == Fraction(1, 2)
    assert reports[1].vacuous
    assert reports[1].predicted == pytest.approx(amplification_bound(2, 2))
    assert all(r.holds for r in reports)


def test_amplification_precondition():
    with pytest.raises(PreconditionError):
        verify_tensor_amplification(SKEW, FLIP, 1, 2)


def test_hoeffding_empirical(and_fam):
    report = verify_hoeffding_empirical(and_fam, "", [lambda x: float(x == "1")], 0.05, 0.1, trials=100, seed=3)
    assert report.holds
    assert report.parameters["T"] == hoeffding_T(1, 0.05, 0.1, 0)


def test_hoeffding_constant_function(and_fam):
    report = verify_hoeffding_empirical(and_fam, "", [lambda x: 0.0], 0.05, 0.1, trials=100, seed=3)
    assert report.observed == 1


def test_hoeffding_vacuous_delta(and_fam):
    report = verify_hoeffding_empirical(and_fam, "", [lambda x: float(x == "1")], 0.5, 1, trials=100, seed=3)
    assert report.vacuous
    assert report.holds

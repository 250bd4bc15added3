"""
Test Wilson intervals and rate verdicts
"""

import pytest

from app.core.exceptions import PreconditionError
from app.utils.stats import rate_estimate, wilson_interval


def test_wilson_interval_contains_rate():
    lower, upper = wilson_interval(30, 100)
    assert lower < 0.3 < upper
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0


def test_wilson_interval_needs_trials():
    with pytest.raises(PreconditionError):
        wilson_interval(0, 0)


def test_observed_rate_below_claim_fails():
    rate = rate_estimate(493, 500, 0.99)
    assert rate.upper > 0.99
    assert not rate.consistent


def test_observed_rate_at_claim_passes():
    assert rate_estimate(495, 500, 0.99).consistent
    assert rate_estimate(18, 20, 1 - 1 / 10).consistent


def test_confident_claim_uses_lower_limit():
    assert rate_estimate(100, 100, 0.9, confident=True).consistent
    assert not rate_estimate(100, 100, 0.95, confident=True).consistent
    assert rate_estimate(200, 200, 0.95, confident=True).consistent


def test_two_sided_claim():
    assert rate_estimate(50, 100, 0.5, two_sided=True).consistent
    assert not rate_estimate(50, 100, 0.9, two_sided=True).consistent


def test_no_claim_no_verdict():
    assert rate_estimate(3, 4).consistent is None

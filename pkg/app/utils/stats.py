"""
Monte Carlo rate helpers
"""

import math
from typing import Optional

from app.core.config import settings
from app.core.exceptions import PreconditionError
from app.models.reports import RateEstimate


def wilson_interval(successes: int, trials: int, z: Optional[float] = None) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion"""
    if trials < 1:
        raise PreconditionError("Wilson interval needs at least one trial")
    z = settings.WILSON_Z if z is None else z
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def rate_estimate(
    successes: int,
    trials: int,
    claimed: Optional[float] = None,
    two_sided: bool = False,
    confident: bool = False,
) -> RateEstimate:
    """Rate with its 99% interval

    A one-sided claim "rate >= claimed" holds when the observed rate reaches it, or
    the lower limit does when ``confident`` is set. A two-sided claim needs
    ``claimed`` inside the interval.
    """
    lower, upper = wilson_interval(successes, trials)
    consistent = None
    if claimed is not None:
        if two_sided:
            consistent = lower <= claimed <= upper
        else:
            consistent = (lower if confident else successes / trials) >= claimed
    return RateEstimate(
        successes=successes,
        trials=trials,
        rate=successes / trials,
        lower=lower,
        upper=upper,
        claimed=claimed,
        consistent=consistent,
    )

"""
Sample-complexity bounds and their empirical checks
"""

import logging
import math
from collections import Counter
from fractions import Fraction
from typing import Callable, Optional, Sequence

from app.core import rng as lab_rng
from app.core.config import settings
from app.core.distributions import Distribution, statistical_distance, tensor_sd
from app.core.exceptions import PreconditionError
from app.core.families import DistributionFamily
from app.models.reports import BoundReport
from app.utils.stats import rate_estimate

logger = logging.getLogger(__name__)

TestFunction = Callable[[str], float]


def hoeffding_T(M: float, eps_acc: float, delta: float, log2F: float, tight: bool = False) -> int:
    """Samples so that every f in a class of 2^log2F functions bounded by M is eps_acc-accurate

    Default: ceil(M^2 / eps_acc^2 * (log2F + log2(1/delta))).
    ``tight``: ceil(M^2 / (2 eps_acc^2) * ln(2 |F| / delta)).
    """
    if M <= 0 or eps_acc <= 0 or delta <= 0:
        raise PreconditionError("M, eps_acc and delta must be positive")
    if log2F < 0:
        raise PreconditionError("log2F must be nonnegative")
    if tight:
        value = M * M / (2 * eps_acc * eps_acc) * (math.log(2) * (log2F + 1) - math.log(delta))
    else:
        value = M * M / (eps_acc * eps_acc) * (log2F - math.log2(delta))
    return max(1, math.ceil(value))


def amplification_bound(t: int, eps: int) -> float:
    """1 - 2^(-t / (8 eps^2) + 1)"""
    return 1.0 - 2.0 ** (-t / (8 * eps * eps) + 1)


def verify_tensor_amplification(p: Distribution, q: Distribution, eps: int, t_max: int) -> list[BoundReport]:
    """SD(P^t, Q^t) against the amplification bound for t = 1..t_max"""
    sd = statistical_distance(p, q)
    if sd <= Fraction(1, 2 * eps):
        raise PreconditionError(f"SD(P, Q) = {sd} does not exceed 1/(2 eps) = {Fraction(1, 2 * eps)}")
    reports = []
    for t in range(1, t_max + 1):
        predicted = amplification_bound(t, eps)
        observed = tensor_sd(p, q, t)
        reports.append(BoundReport(
            claim="probabilistic_argument",
            parameters={"t": t, "eps": eps, "sd": str(sd)},
            predicted=predicted,
            observed=observed,
            holds=float(observed) > predicted,
            vacuous=predicted <= 0,
        ))
    return reports


def verify_hoeffding_empirical(
    fam: DistributionFamily,
    z: str,
    functions: Sequence[TestFunction],
    eps_acc: float,
    delta: float,
    trials: int = 100,
    seed: Optional[int] = None,
) -> BoundReport:
    """Fraction of trials in which every test function's sample mean is eps_acc-close to its mean

    Holds when the 99% lower limit of that fraction reaches 1 - delta.
    """
    if not functions:
        raise PreconditionError("need at least one test function")
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    seed = settings.DEFAULT_SEED if seed is None else seed
    T = hoeffding_T(1, eps_acc, delta, math.log2(len(functions)))
    dist = fam.distribution(z)
    tables = [{x: f(x) for x in dist.support()} for f in functions]
    means = [math.fsum(float(p) * table[x] for x, p in dist.items()) for table in tables]

    passes = 0
    for i in range(trials):
        counts = Counter(fam.sample(z, T, lab_rng.generator(seed, i)))
        passes += all(
            abs(math.fsum(c * table[x] for x, c in counts.items()) / T - mean) <= eps_acc
            for table, mean in zip(tables, means)
        )
    claimed = max(0.0, 1.0 - delta)
    rate = rate_estimate(passes, trials, claimed, confident=True)
    logger.info("Hoeffding check with T=%d: %d / %d trials within %.3g", T, passes, trials, eps_acc)
    return BoundReport(
        claim="hoeffding",
        parameters={"T": T, "eps_acc": eps_acc, "delta": delta, "functions": len(functions), "trials": trials},
        predicted=claimed,
        observed=Fraction(passes, trials),
        holds=bool(rate.consistent),
        vacuous=delta >= 1,
    )

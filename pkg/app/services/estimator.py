"""
Probability-query oracles

An estimator answers "Pr[x <- D(z)]" either exactly or in the approximate
counting model: with probability 1 - 1/fail the answer is p * (1 + u) for u
uniform in [-1/eps_mult, 1/eps_mult], otherwise it is 0. Noise is keyed by
(seed, counter, lane) so queries are reproducible and need no shared state.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from app.core import rng as lab_rng
from app.core.config import settings
from app.core.exceptions import PreconditionError
from app.core.families import DistributionFamily

logger = logging.getLogger(__name__)


class EstimatorMode(str, Enum):
    EXACT = "exact"
    NOISY = "noisy"


@dataclass(frozen=True)
class EstimateResult:
    """Estimated probability; ``failed`` is for test introspection only"""

    value: Fraction | float
    failed: bool = False


class Estimator:
    """Exact or noisy probability oracle for one family"""

    def __init__(
        self,
        family: DistributionFamily,
        mode: EstimatorMode = EstimatorMode.EXACT,
        eps_mult: Optional[int] = None,
        fail: Optional[int] = None,
        seed: int = 0,
    ):
        if mode is EstimatorMode.NOISY:
            if eps_mult is None or eps_mult < 2:
                raise PreconditionError("noisy estimator needs eps_mult >= 2")
            if fail is None or fail < 2:
                raise PreconditionError("noisy estimator needs fail >= 2")
        self.family = family
        self.mode = mode
        self.eps_mult = eps_mult
        self.fail = fail
        self.seed = lab_rng.normalize_seed(seed)

    @property
    def exact(self) -> bool:
        return self.mode is EstimatorMode.EXACT

    def noise_factors(self, start: int, n: int, lane: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Multipliers and failure flags for counters start .. start+n-1

        A failed query has multiplier 0. Exact estimators return all ones.
        """
        if self.exact:
            return np.ones(n), np.zeros(n, dtype=bool)
        u = lab_rng.uniforms_block(self.seed, start, n, lane)
        failed = u[:, 0] < 1.0 / self.fail
        factors = 1.0 + (2.0 * u[:, 1] - 1.0) / self.eps_mult
        return np.where(failed, 0.0, factors), failed

    def estimate(self, z: str, x: str, counter: int = 0, lane: int = 0) -> EstimateResult:
        p = self.family.prob(z, x)
        if self.exact:
            return EstimateResult(p)
        u1, u2 = lab_rng.uniforms_at(self.seed, counter, lane)
        if u1 < 1.0 / self.fail:
            logger.debug("Estimator failure at counter %d lane %d", counter, lane)
            return EstimateResult(0.0, failed=True)
        return EstimateResult(float(p) * (1.0 + (2.0 * u2 - 1.0) / self.eps_mult))

    def describe(self) -> dict:
        info = {"mode": self.mode.value}
        if not self.exact:
            info.update(eps_mult=self.eps_mult, fail=self.fail, seed=self.seed)
        return info


def exact_estimator(fam: DistributionFamily) -> Estimator:
    return Estimator(fam)


def noisy_estimator(fam: DistributionFamily, eps_mult: int, fail: int, seed: int) -> Estimator:
    return Estimator(fam, EstimatorMode.NOISY, eps_mult=eps_mult, fail=fail, seed=seed)


def dis_estimator(fam: DistributionFamily, eps: int, seed: int) -> Estimator:
    """Noisy estimator at the distinguisher's working precision"""
    precision = settings.DIS_PRECISION_FACTOR * eps
    return noisy_estimator(fam, precision, precision, seed)


def estimate(est: Estimator, z: str, x: str, counter: int = 0, lane: int = 0) -> EstimateResult:
    return est.estimate(z, x, counter, lane)

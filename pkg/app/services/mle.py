"""
Exact maximum-likelihood estimation over the whole parameter space
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from app.core.exceptions import PreconditionError
from app.core.families import DistributionFamily
from app.core.sampling import SampleSet

logger = logging.getLogger(__name__)

INFINITY = float("inf")


@dataclass(frozen=True)
class MleResult:
    argmax_z: str
    max_likelihood: Fraction
    tie_count: int


def _histogram(fam: DistributionFamily, samples: SampleSet | Iterable[str]) -> Counter:
    if not isinstance(samples, SampleSet):
        samples = SampleSet(tuple(samples), 0)
    samples.check_width(fam.out_bits)
    return Counter(samples.samples)


def _likelihood_of_counts(fam: DistributionFamily, z: str, counts: Mapping[str, int]) -> Fraction:
    dist = fam.distribution(z)
    result = Fraction(1)
    for x, c in counts.items():
        if c == 0:
            continue
        p = dist.prob(x)
        if p == 0:
            return Fraction(0)
        result *= p**c
    return result


def likelihood(fam: DistributionFamily, z: str, samples: SampleSet | Iterable[str]) -> Fraction:
    """Product of Pr[x_i <- D(z)] over the samples, exactly"""
    return _likelihood_of_counts(fam, z, _histogram(fam, samples))


def eval_mle(fam: DistributionFamily, samples: SampleSet | Iterable[str]) -> MleResult:
    """Lexicographically smallest maximizer of the likelihood"""
    return eval_mle_counts(fam, _histogram(fam, samples))


def eval_mle_counts(fam: DistributionFamily, counts: Mapping[str, int]) -> MleResult:
    """eval_mle for a sample multiset given as outcome counts"""
    best_z, best, ties = None, Fraction(-1), 0
    for z in fam.parameters():
        value = _likelihood_of_counts(fam, z, counts)
        if value > best:
            best_z, best, ties = z, value, 1
        elif value == best:
            ties += 1
    if ties > 1:
        logger.debug("MLE tie across %d parameters, picked %s", ties, best_z)
    return MleResult(best_z, best, ties)


def brute_force_likelihoods(fam: DistributionFamily, samples: Iterable[str]) -> list[tuple[str, Fraction]]:
    """(z, likelihood) for every z, one probability query per sample"""
    samples = list(samples)
    return [
        (z, math.prod((fam.prob(z, x) for x in samples), start=Fraction(1)))
        for z in fam.parameters()
    ]


def max_probability(fam: DistributionFamily, x: str) -> Fraction:
    return max(fam.prob(a, x) for a in fam.parameters())


def ml_ratio(fam: DistributionFamily, x: str, h: str) -> Fraction | float:
    """max_a Pr[x <- D(a)] / Pr[x <- D(h)]; +inf when the denominator is 0"""
    top = max_probability(fam, x)
    if top == 0:
        raise PreconditionError(f"outcome {x} has probability 0 under every parameter")
    p_h = fam.prob(h, x)
    if p_h == 0:
        return INFINITY
    return top / p_h


def ratio_within(ratio: Fraction | float, eps: int, halve: bool = False) -> bool:
    """ratio <= 2^(1/eps), or <= 2^(1/(2 eps)) with ``halve``, decided exactly"""
    if ratio == INFINITY:
        return False
    power = 2 * eps if halve else eps
    return Fraction(ratio) ** power <= 2


def qml_accepts(fam: DistributionFamily, x: str, h: str, eps: int) -> bool:
    return ratio_within(ml_ratio(fam, x, h), eps)

"""
Distribution learners

- ``dis``: likelihood-ratio distinguisher built from two estimator queries.
- Gap oracles: the statistic |mean dis on target samples - mean dis on fresh
  draws from D(a)| for every pair (a, b), computed once per run; the existential
  query "some completion a of a prefix keeps every gap <= omega" reads from it.
- ``learn_sd_agnostic``: fixes the output bit by bit, binary-searching a
  threshold p(j) until exactly one candidate bit passes the query.
- ``learn_kl``: maximum likelihood on fully supported families.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from app.core import rng as lab_rng
from app.core.distributions import Distribution, kl_divergence, statistical_distance
from app.core.exceptions import LengthMismatchError, PreconditionError, SupportViolationError
from app.core.families import DistributionFamily
from app.core.instances import LearningInstance
from app.core.sampling import SampleSet
from app.models.reports import KlReport, LearnReport, RateEstimate, StageTrace
from app.services.estimator import Estimator, dis_estimator, exact_estimator
from app.services.mle import eval_mle
from app.utils.bits import from_int, prefix_range, to_int
from app.utils.stats import rate_estimate

logger = logging.getLogger(__name__)

# A proper learner maps (samples, seed) to a hypothesis parameter
ProperLearner = Callable[[SampleSet, int], str]

TARGET_LANE, MODEL_LANE = 0, 1


def default_learner_t(k: int, eps: int, delta: int) -> int:
    """ceil(100 k^2 eps^2 (k + log2 delta))"""
    return max(1, math.ceil(100 * k * k * eps * eps * (k + math.log2(delta))))


def default_rounds(k: int, eps: int) -> int:
    """Binary-search rounds: at least k, and fine enough that 2^-rounds <= 1/(2 k eps)"""
    if k < 1:
        return 1
    return max(k, math.ceil(math.log2(2 * k * eps)))


def dis_threshold(eps: int) -> Fraction:
    return 1 + Fraction(1, 16 * eps)


def dis(est: Estimator, l: str, m: str, x: str, eps: int, query_ctr: int = 0) -> int:
    """1 iff E_l >= (1 + 1/(16 eps)) E_m, both estimates taken at counter ``query_ctr``"""
    e_l = est.estimate(l, x, query_ctr, TARGET_LANE).value
    e_m = est.estimate(m, x, query_ctr, MODEL_LANE).value
    if est.exact:
        return int(e_l >= dis_threshold(eps) * e_m)
    return int(e_l >= (1.0 + 1.0 / (16 * eps)) * e_m)


@dataclass(frozen=True)
class LearnerRandomness:
    """Coins for the fresh draws X_{a,i} = D(a; coins[i]) and the counter base

    Target sample i uses estimator counter ``base + i``; fresh sample i uses
    ``base + t + i``.
    """

    coins: np.ndarray
    base: int = 0

    @classmethod
    def draw(cls, fam: DistributionFamily, t: int, seed: int, base: int = 0) -> "LearnerRandomness":
        return cls(fam.draw_coins(t, lab_rng.generator(seed, 2)), base)


def empirical_gap(
    fam: DistributionFamily,
    est: Estimator,
    a: str,
    b: str,
    t_samples: SampleSet,
    fresh: LearnerRandomness,
    eps: int,
) -> Fraction:
    """Single-pair gap, one dis call per sample"""
    t = len(t_samples)
    if len(fresh.coins) != t:
        raise LengthMismatchError(f"{len(fresh.coins)} fresh coins for {t} samples")
    on_target = sum(dis(est, a, b, x, eps, fresh.base + i) for i, x in enumerate(t_samples))
    drawn = fam.outcome_ints(a, fresh.coins)
    on_model = sum(
        dis(est, a, b, from_int(int(x), fam.out_bits), eps, fresh.base + t + i)
        for i, x in enumerate(drawn)
    )
    return Fraction(abs(on_target - on_model), t)


class GapOracle:
    """worst[a] = max over b of the gap for a; queries compare it to omega"""

    parameters: list[str]
    param_bits: int

    def within(self, a_index: int, omega: Fraction) -> bool:
        raise NotImplementedError

    def worst_gap(self, a_index: int) -> Fraction:
        raise NotImplementedError

    def sigma3(self, prefix: str, omega: Fraction) -> bool:
        """Some completion a of ``prefix`` has gap(a, b) <= omega for every b"""
        if len(prefix) > self.param_bits:
            raise LengthMismatchError(f"prefix longer than {self.param_bits} parameter bits")
        omega = Fraction(omega)
        return any(self.within(i, omega) for i in prefix_range(prefix, self.param_bits))

    def best_completion(self, prefix: str) -> Fraction:
        """min over completions a of ``prefix`` of worst[a]"""
        return min(self.worst_gap(i) for i in prefix_range(prefix, self.param_bits))


class _RatioTable:
    """Samples grouped by outcome, noise ratios f0/f1 sorted within each group

    Takes outcome indices and ratios already in ascending ratio order; a stable
    sort on the outcome index keeps each group sorted.
    """

    def __init__(self, outcomes_by_ratio: np.ndarray, sorted_ratios: np.ndarray, width: int):
        keys = outcomes_by_ratio.astype(np.uint16) if width <= 1 << 16 else outcomes_by_ratio
        order = np.argsort(keys, kind="stable")
        self.ratios = sorted_ratios[order]
        sizes = np.bincount(outcomes_by_ratio, minlength=width)
        self.values = np.flatnonzero(sizes)
        self.sizes = sizes[self.values]
        self.starts = (np.cumsum(sizes) - sizes)[self.values]

    @classmethod
    def build(cls, outcomes: np.ndarray, ratios: np.ndarray, width: int) -> "_RatioTable":
        by_ratio = np.argsort(ratios, kind="stable")
        return cls(outcomes[by_ratio], ratios[by_ratio], width)

    def count_at_least(self, thresholds: np.ndarray) -> np.ndarray:
        """thresholds has shape (B, len(values)); counts samples with ratio >= threshold per row"""
        total = np.zeros(thresholds.shape[0], dtype=np.int64)
        for j, (start, size) in enumerate(zip(self.starts, self.sizes)):
            segment = self.ratios[start:start + size]
            total += size - np.searchsorted(segment, thresholds[:, j], side="left")
        return total


class EmpiricalGapOracle(GapOracle):
    """Gaps from the target samples and fresh draws, for every (a, b) at once

    Gap numerators are integers (dis counts), so comparisons with omega are exact.
    """

    def __init__(
        self,
        fam: DistributionFamily,
        est: Estimator,
        t_samples: SampleSet,
        randomness: LearnerRandomness,
        eps: int,
    ):
        t_samples.check_width(fam.out_bits)
        self.t = len(t_samples)
        if len(randomness.coins) != self.t:
            raise LengthMismatchError(f"{len(randomness.coins)} fresh coins for {self.t} samples")
        self.parameters = list(fam.parameters())
        self.param_bits = fam.param_bits
        self.eps = eps

        packed = {x: to_int(x) for x in set(t_samples.samples)}
        target = np.fromiter((packed[x] for x in t_samples), dtype=np.int64, count=self.t)
        fresh = np.stack([fam.outcome_ints(a, randomness.coins) for a in self.parameters])
        outcome_values = np.union1d(target, fresh.ravel())
        outcomes = [from_int(int(v), fam.out_bits) for v in outcome_values]
        target_idx = np.searchsorted(outcome_values, target)
        fresh_idx = np.searchsorted(outcome_values, fresh)

        if est.exact:
            self.numerators = self._exact_counts(fam, outcomes, target_idx, fresh_idx)
        else:
            self.numerators = self._noisy_counts(fam, est, outcomes, target_idx, fresh_idx, randomness.base)
        self.worst = self.numerators.max(axis=1)
        logger.debug("Gap oracle over %d parameters and %d samples", len(self.parameters), self.t)

    def _exact_counts(self, fam, outcomes, target_idx, fresh_idx) -> np.ndarray:
        counts, denominator = fam.count_matrix(outcomes)
        scale = 16 * self.eps
        if denominator.bit_length() + (scale + 1).bit_length() >= 62:
            counts = counts.astype(object)
        width = len(outcomes)
        target_hist = np.bincount(target_idx, minlength=width)
        numerators = np.zeros((len(self.parameters), len(self.parameters)), dtype=np.int64)
        for a in range(len(self.parameters)):
            fires = scale * counts[a][None, :] >= (scale + 1) * counts
            diff = target_hist - np.bincount(fresh_idx[a], minlength=width)
            numerators[a] = np.abs(fires.astype(np.int64) @ diff)
        return numerators

    def _noisy_counts(self, fam, est, outcomes, target_idx, fresh_idx, base) -> np.ndarray:
        probs = np.array(
            [[float(fam.prob(a, x)) for x in outcomes] for a in self.parameters], dtype=np.float64
        )
        c = 1.0 + 1.0 / (16 * self.eps)
        t = self.t

        def ratios(start: int) -> np.ndarray:
            f0, _ = est.noise_factors(start, t, TARGET_LANE)
            f1, _ = est.noise_factors(start, t, MODEL_LANE)
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(f1 == 0, np.inf, f0 / f1)

        def thresholds(a: int, present: np.ndarray) -> np.ndarray:
            p_a = probs[a, present][None, :]
            p_b = probs[:, present]
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(p_b == 0, 0.0, np.where(p_a == 0, np.inf, c * p_b / p_a))

        width = len(outcomes)
        target_table = _RatioTable.build(target_idx, ratios(base), width)
        fresh_ratios = ratios(base + t)
        by_ratio = np.argsort(fresh_ratios, kind="stable")
        sorted_fresh = fresh_ratios[by_ratio]
        numerators = np.zeros((len(self.parameters), len(self.parameters)), dtype=np.int64)
        for a in range(len(self.parameters)):
            on_target = target_table.count_at_least(thresholds(a, target_table.values))
            fresh_table = _RatioTable(fresh_idx[a][by_ratio], sorted_fresh, width)
            on_model = fresh_table.count_at_least(thresholds(a, fresh_table.values))
            numerators[a] = np.abs(on_target - on_model)
        return numerators

    def gap(self, a_index: int, b_index: int) -> Fraction:
        return Fraction(int(self.numerators[a_index, b_index]), self.t)

    def worst_gap(self, a_index: int) -> Fraction:
        return Fraction(int(self.worst[a_index]), self.t)

    def within(self, a_index: int, omega: Fraction) -> bool:
        return int(self.worst[a_index]) * omega.denominator <= omega.numerator * self.t


class ExactGapOracle(GapOracle):
    """Gaps with true probabilities: |Pr_T[dis = 1] - Pr_D(a)[dis = 1]| with exact dis"""

    def __init__(self, fam: DistributionFamily, target: Distribution, eps: int):
        if target.support_len != fam.out_bits:
            raise LengthMismatchError("target and family outcome lengths differ")
        self.parameters = list(fam.parameters())
        self.param_bits = fam.param_bits
        support = set(target.support())
        for a in self.parameters:
            support.update(fam.distribution(a).support())
        outcomes = sorted(support)
        counts, denominator = fam.count_matrix(outcomes)
        counts = counts.astype(object)
        target_den = math.lcm(*(target.prob(x).denominator for x in outcomes))
        target_num = np.array([target.prob(x).numerator * (target_den // target.prob(x).denominator)
                               for x in outcomes], dtype=object)
        scale = 16 * eps
        self.worst_values: list[Fraction] = []
        for a in range(len(self.parameters)):
            fires = scale * counts[a][None, :] >= (scale + 1) * counts
            diff = target_num * denominator - counts[a] * target_den
            gaps = np.abs(fires.astype(object) @ diff)
            self.worst_values.append(Fraction(int(max(gaps)), denominator * target_den))

    def worst_gap(self, a_index: int) -> Fraction:
        return self.worst_values[a_index]

    def within(self, a_index: int, omega: Fraction) -> bool:
        return self.worst_values[a_index] <= omega


def sigma3_query(
    fam: DistributionFamily,
    est: Estimator,
    prefix: str,
    omega: Fraction,
    t_samples: SampleSet,
    randomness: LearnerRandomness,
    eps: int,
) -> bool:
    return EmpiricalGapOracle(fam, est, t_samples, randomness, eps).sigma3(prefix, omega)


def _search_bit(oracle: GapOracle, prefix: str, index: int, rounds: int) -> StageTrace:
    p = Fraction(1, 2)
    for j in range(1, rounds + 1):
        q0 = oracle.sigma3(prefix + "0", p)
        q1 = oracle.sigma3(prefix + "1", p)
        if q0 != q1:
            return StageTrace(index=index, bit="1" if q1 else "0", rounds_used=j, threshold=p)
        if j == rounds:
            return StageTrace(index=index, bit="1", rounds_used=j, threshold=p, exhausted=True)
        step = Fraction(1, 2 ** (j + 1))
        p = p - step if q0 else p + step
    raise PreconditionError("binary search needs at least one round")


def bit_by_bit(oracle: GapOracle, rounds: int) -> tuple[str, list[StageTrace]]:
    """Output h one bit at a time; returns h and the per-stage trace"""
    h, trace = "", []
    for index in range(1, oracle.param_bits + 1):
        stage = _search_bit(oracle, h, index, rounds)
        h += stage.bit
        trace.append(stage)
    return h, trace


def sd_report(
    fam: DistributionFamily, target: Distribution, h: str, eps: int
) -> tuple[Fraction, Fraction, Fraction]:
    """(achieved SD, opt, (3 + 1/eps) opt + 1/eps)"""
    opt = min(statistical_distance(target, fam.distribution(a)) for a in fam.parameters())
    achieved = statistical_distance(target, fam.distribution(h))
    bound = (3 + Fraction(1, eps)) * opt + Fraction(1, eps)
    return achieved, opt, bound


def learn_sd_agnostic(
    fam: DistributionFamily,
    t_samples: SampleSet,
    eps: int,
    delta: int,
    seed: int,
    target: Optional[Distribution] = None,
    t: Optional[int] = None,
    rounds: Optional[int] = None,
    estimator: str = "noisy",
    oracle_mode: bool = False,
) -> LearnReport:
    """Agnostic proper learner in statistical distance

    Without ``target`` the post-hoc report measures against the empirical
    distribution of the samples. ``oracle_mode`` replaces empirical gaps with
    exact ones computed from the target.
    """
    if eps < 1 or delta < 1:
        raise PreconditionError("eps and delta must be >= 1")
    if t is not None and len(t_samples) != t:
        raise LengthMismatchError(f"got {len(t_samples)} samples, expected t={t}")
    t_samples.check_width(fam.out_bits)
    rounds = rounds or default_rounds(fam.param_bits, eps)
    reference = target if target is not None else Distribution.empirical(t_samples.samples)

    if oracle_mode:
        oracle: GapOracle = ExactGapOracle(fam, reference, eps)
        mode = "oracle"
    else:
        if estimator == "exact":
            est = exact_estimator(fam)
        else:
            est = dis_estimator(fam, eps, lab_rng.derive_seed(seed, 1))
        randomness = LearnerRandomness.draw(fam, len(t_samples), seed)
        oracle = EmpiricalGapOracle(fam, est, t_samples, randomness, eps)
        mode = f"empirical/{est.mode.value}"

    h, trace = bit_by_bit(oracle, rounds)
    achieved, opt, bound = sd_report(fam, reference, h, eps)
    logger.info("Agnostic learner picked %s (SD %s, bound %s)", h, achieved, bound)
    return LearnReport(
        hypothesis=h,
        achieved_sd=achieved,
        opt=opt,
        bound=bound,
        within_bound=achieved <= bound,
        eps=eps,
        delta=delta,
        t=len(t_samples),
        rounds=rounds,
        mode=mode,
        target_known=target is not None,
        trace=trace,
    )


def learn_kl(fam: DistributionFamily, t_samples: SampleSet, eps: int) -> str:
    """Likelihood maximizer; the family must give every outcome positive probability"""
    if eps < 1:
        raise PreconditionError("eps must be >= 1")
    if not fam.is_fully_supported():
        raise SupportViolationError("KL learning needs a fully supported family")
    return eval_mle(fam, t_samples).argmax_z


def kl_report(fam: DistributionFamily, target: Distribution, h: str, eps: int, t: int) -> KlReport:
    """D_KL(T || D(h)) against min_a D_KL(T || D(a)) + 1/eps"""
    divergences = {a: kl_divergence(target, fam.distribution(a)) for a in fam.parameters()}
    opt = min(divergences.values())
    bound = opt + 1.0 / eps
    return KlReport(
        hypothesis=h,
        kl=divergences[h],
        opt=opt,
        bound=bound,
        within_bound=divergences[h] <= bound,
        eps=eps,
        t=t,
    )


# Benchmark


def agnostic_learner(fam: DistributionFamily, eps: int, delta: int, estimator: str = "noisy") -> ProperLearner:
    def learner(samples: SampleSet, seed: int) -> str:
        return learn_sd_agnostic(fam, samples, eps, delta, seed, estimator=estimator).hypothesis

    return learner


def cheating_learner(samples: SampleSet, seed: int) -> str:
    """Returns the parameter the samples came from"""
    if samples.origin is None:
        raise PreconditionError("samples carry no origin")
    return samples.origin


def constant_learner(h: str) -> ProperLearner:
    return lambda samples, seed: h


def learn_proper_avg_benchmark(
    inst: LearningInstance,
    learner_fn: ProperLearner,
    trials: int,
    seed: int,
    claimed: Optional[float] = None,
) -> RateEstimate:
    """Rate of SD(D(z), D(h)) <= 1/eps with z <- S, samples <- D(z)^t, h <- learner"""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    fam = inst.family
    threshold = Fraction(1, inst.eps)
    successes = 0
    for i in range(trials):
        trial_seed = lab_rng.derive_seed(seed, i)
        gen = lab_rng.generator(trial_seed)
        z = inst.draw_parameter(gen)
        samples = SampleSet(tuple(fam.sample(z, inst.t, gen)), trial_seed, origin=z)
        h = learner_fn(samples, trial_seed)
        successes += statistical_distance(fam.distribution(z), fam.distribution(h)) <= threshold
    logger.info("Proper learning benchmark: %d / %d", successes, trials)
    return rate_estimate(successes, trials, claimed)

"""
One-way puzzle from a learning instance

Samp draws z <- S and a puzzle of t samples from D(z); the answer is z. Vrfy
recomputes the maximum-likelihood parameter z* of the puzzle and accepts h iff
SD(D(z*), D(h)) <= 3 / (2 eps).
"""

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from app.core import rng as lab_rng
from app.core.config import settings
from app.core.distributions import compositions, multinomial, statistical_distance
from app.core.exceptions import LengthMismatchError, PreconditionError, SizeLimitError
from app.core.families import DistributionFamily
from app.core.instances import LearningInstance
from app.core.sampling import SampleSet
from app.models.reports import AttackReport, RateEstimate
from app.services.mle import eval_mle, eval_mle_counts, likelihood
from app.utils.bits import check_bits
from app.utils.stats import rate_estimate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Puzzle:
    puzz: SampleSet
    ans: str


@dataclass(frozen=True)
class ProbabilityResult:
    """A probability that is exact, or a Monte Carlo frequency over ``trials``"""

    value: Fraction
    exact: bool
    trials: int = 0


def owp_default_t(eps: int, n: int) -> int:
    """16 eps^2 n"""
    if eps < 1:
        raise PreconditionError("eps must be >= 1")
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return 16 * eps * eps * n


def vrfy_threshold(eps: int) -> Fraction:
    return Fraction(3, 2 * eps)


def owp_samp(inst: LearningInstance, seed: int) -> Puzzle:
    gen = lab_rng.generator(seed)
    z = inst.draw_parameter(gen)
    samples = inst.family.sample(z, inst.t, gen)
    return Puzzle(SampleSet(tuple(samples), lab_rng.normalize_seed(seed), origin=z), z)


def _accepts(fam: DistributionFamily, z_star: str, h: str, eps: int) -> bool:
    return statistical_distance(fam.distribution(z_star), fam.distribution(h)) <= vrfy_threshold(eps)


def owp_vrfy(inst: LearningInstance, puzz: SampleSet, h: str) -> bool:
    """True means accept"""
    if len(puzz) != inst.t:
        raise LengthMismatchError(f"puzzle holds {len(puzz)} samples, instance expects t={inst.t}")
    check_bits(h, inst.family.param_bits, "answer")
    z_star = eval_mle(inst.family, puzz).argmax_z
    return _accepts(inst.family, z_star, h, inst.eps)


def owp_completeness(
    inst: LearningInstance, trials: int, seed: int, claimed: Optional[float] = None
) -> RateEstimate:
    """Acceptance rate of honest (puzz, ans) pairs; trial i replays owp_samp(derive_seed(seed, i))"""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    accepted = 0
    for i in range(trials):
        puzzle = owp_samp(inst, lab_rng.derive_seed(seed, i))
        accepted += owp_vrfy(inst, puzzle.puzz, puzzle.ans)
    logger.info("Completeness: %d / %d accepted", accepted, trials)
    return rate_estimate(accepted, trials, claimed)


def _best_answer_fn(inst: LearningInstance):
    @functools.cache
    def best_answer(z_star: str) -> Optional[str]:
        """Lexicographically smallest accepted answer, or None"""
        for h in inst.family.parameters():
            if _accepts(inst.family, z_star, h, inst.eps):
                return h
        return None

    return best_answer


def _puzzle_outcomes(inst: LearningInstance, parameters: list[str]) -> list[str]:
    outcomes = set()
    for z in parameters:
        outcomes.update(inst.family.distribution(z).support())
    return sorted(outcomes)


def owp_best_attack(
    inst: LearningInstance,
    monte_carlo: bool = False,
    trials: int = 1000,
    seed: Optional[int] = None,
) -> AttackReport:
    """Success of the optimal unbounded adversary

    Puzzles are summarized by their outcome multiset, which determines both z*
    and the posterior over z. Exact when t * out_bits fits the tuple cap.
    """
    fam = inst.family
    prior = inst.sampler_distribution()
    parameters = list(prior.support())
    best_answer = _best_answer_fn(inst)

    if inst.t * fam.out_bits > settings.MAX_TUPLE_BITS:
        if not monte_carlo:
            raise SizeLimitError(
                f"puzzles of {inst.t} x {fam.out_bits} bits exceed the {settings.MAX_TUPLE_BITS}-bit cap; "
                "allow the Monte Carlo fallback"
            )
        return _best_attack_monte_carlo(inst, trials, settings.DEFAULT_SEED if seed is None else seed)

    outcomes = _puzzle_outcomes(inst, parameters)
    dists = {z: fam.distribution(z) for z in parameters}
    success, map_recovery, puzzles = Fraction(0), Fraction(0), 0
    for counts in compositions(inst.t, len(outcomes)):
        puzzles += 1
        histogram = dict(zip(outcomes, counts))
        weights = {}
        for z in parameters:
            lik = Fraction(1)
            for x, c in histogram.items():
                if c:
                    lik *= dists[z].prob(x) ** c
                    if lik == 0:
                        break
            weights[z] = prior.prob(z) * lik
        mass = multinomial(counts) * sum(weights.values(), Fraction(0))
        if mass == 0:
            continue
        z_star = eval_mle_counts(fam, histogram).argmax_z
        if best_answer(z_star) is not None:
            success += mass
        map_recovery += multinomial(counts) * max(weights.values())
    logger.info("Best attack over %d puzzle multisets: success %s", puzzles, success)
    return AttackReport(success=success, map_recovery=map_recovery, exact=True, t=inst.t, puzzles=puzzles)


def _best_attack_monte_carlo(inst: LearningInstance, trials: int, seed: int) -> AttackReport:
    prior = inst.sampler_distribution()
    best_answer = _best_answer_fn(inst)
    wins, recovered = 0, 0
    for i in range(trials):
        puzzle = owp_samp(inst, lab_rng.derive_seed(seed, i))
        z_star = eval_mle(inst.family, puzzle.puzz).argmax_z
        h = best_answer(z_star)
        wins += h is not None and owp_vrfy(inst, puzzle.puzz, h)
        best_z, best = None, Fraction(-1)
        for z in prior.support():
            weight = prior.prob(z) * likelihood(inst.family, z, puzzle.puzz)
            if weight > best:
                best_z, best = z, weight
        recovered += best_z == puzzle.ans
    logger.warning("Best attack estimated by Monte Carlo over %d trials", trials)
    return AttackReport(
        success=Fraction(wins, trials),
        map_recovery=Fraction(recovered, trials),
        exact=False,
        t=inst.t,
        puzzles=trials,
    )


def useful_probability(
    fam: DistributionFamily,
    z: str,
    eps: int,
    t: int,
    trials: int = 2000,
    seed: Optional[int] = None,
) -> ProbabilityResult:
    """Pr over puzz <- D(z)^t that SD(D(z), D(z*)) <= 1/(2 eps)"""
    threshold = Fraction(1, 2 * eps)
    target = fam.distribution(z)

    def good(z_star: str) -> bool:
        return statistical_distance(target, fam.distribution(z_star)) <= threshold

    if t * fam.out_bits <= settings.MAX_TUPLE_BITS:
        outcomes = list(target.support())
        probs = [target.prob(x) for x in outcomes]
        total = Fraction(0)
        for counts in compositions(t, len(outcomes)):
            histogram = dict(zip(outcomes, counts))
            if good(eval_mle_counts(fam, histogram).argmax_z):
                weight = Fraction(multinomial(counts))
                for p, c in zip(probs, counts):
                    weight *= p**c
                total += weight
        return ProbabilityResult(total, exact=True)

    seed = settings.DEFAULT_SEED if seed is None else seed
    hits = 0
    for i in range(trials):
        samples = fam.sample(z, t, lab_rng.generator(seed, i))
        hits += good(eval_mle(fam, samples).argmax_z)
    return ProbabilityResult(Fraction(hits, trials), exact=False, trials=trials)

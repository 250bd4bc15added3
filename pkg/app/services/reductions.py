"""
Constructions connecting puzzles, learning and likelihood decisions

- postselection gadget M*(x, c) and the MLE decision built on it
- uniform smoothing of a family (every outcome gets positive mass)
- repeated family over t-tuples of i.i.d. draws
- learning instance from an advice-indexed generator, the per-advice Check and
  the generator breaker
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from app.core import rng as lab_rng
from app.core.circuits import CircuitBuilder, CircuitFamily
from app.core.config import settings
from app.core.distributions import Distribution, compositions, tensor_power
from app.core.exceptions import LengthMismatchError, PreconditionError, SizeLimitError
from app.core.families import DistributionFamily, TableFamily
from app.core.fixtures import advice_bits, postselect_machine
from app.core.instances import LearningInstance
from app.core.sampling import SampleSet
from app.models.params import LearnParams
from app.models.reports import DecisionReport, Verdict
from app.services.learner import ProperLearner
from app.services.mle import eval_mle
from app.utils.bits import all_strings, check_bits, from_int

logger = logging.getLogger(__name__)


# Postselection


def _postselect_masses(mach: CircuitFamily, x: str) -> tuple[Fraction, Fraction]:
    """(Pr[b=0, b*=1], Pr[b=1, b*=1]) for M(x)"""
    if mach.role != "postselect":
        raise PreconditionError("machine circuit must carry role 'postselect'")
    counts = mach.count_vector(x, wires=[mach.b_wire, mach.bstar_wire])
    total = 1 << mach.rand_bits
    return Fraction(int(counts[0b01]), total), Fraction(int(counts[0b11]), total)


def bottom(x: str) -> str:
    """Encoding of the abort symbol next to outcomes x || "1" """
    return "0" * len(x) + "0"


def postselect_gadget(mach: CircuitFamily, x: str, c: str) -> Distribution:
    """M*(x, c): outputs x||1 when b = c and b* = 1, the abort symbol otherwise"""
    check_bits(c, 1, "flag")
    masses = _postselect_masses(mach, x)
    if masses[0] + masses[1] == 0:
        raise PreconditionError(f"Pr[b* = 1] is zero on input {x}")
    hit = masses[int(c)]
    return Distribution({x + "1": hit, bottom(x): 1 - hit}, len(x) + 1)


def gadget_family(mach: CircuitFamily, x: str) -> TableFamily:
    """The two-parameter family c -> M*(x, c)"""
    return TableFamily({c: postselect_gadget(mach, x, c) for c in "01"}, 1)


def decide_by_mle(mach: CircuitFamily, x: str, eps: int = 1) -> DecisionReport:
    """Decide by the maximum-likelihood flag c on observation x||1

    The flag gives the verdict when the likelihoods of c = 1 and c = 0 differ by
    a factor of at least 3; their ratio equals Pr[b=1 | b*=1] / Pr[b=0 | b*=1].
    A smaller margin is reported as a promise violation.
    """
    if eps < 1:
        raise PreconditionError("eps must be >= 1")
    fam = gadget_family(mach, x)
    observed = x + "1"
    flag = eval_mle(fam, [observed]).argmax_z
    p0, p1 = fam.prob("0", observed), fam.prob("1", observed)
    conditional = p1 / (p0 + p1)
    ratio = None if p0 == 0 else p1 / p0
    if max(p0, p1) >= 3 * min(p0, p1):
        verdict = Verdict.IN_LANGUAGE if flag == "1" else Verdict.NOT_IN_LANGUAGE
    else:
        verdict = Verdict.PROMISE_VIOLATION
        logger.warning("Postselection promise violated on %s: ratio %s", x, ratio)
    return DecisionReport(verdict=verdict, mle_flag=flag, ratio=ratio, conditional=conditional)


@dataclass(frozen=True)
class PostselectCase:
    machine: CircuitFamily
    x: str
    conditional: Fraction
    expected: Verdict


def expected_verdict(conditional: Fraction) -> Verdict:
    if conditional >= Fraction(3, 4):
        return Verdict.IN_LANGUAGE
    if conditional <= Fraction(1, 4):
        return Verdict.NOT_IN_LANGUAGE
    return Verdict.PROMISE_VIOLATION


def postselect_corpus(seed: int, promise: int = 50, gap: int = 10) -> list[PostselectCase]:
    """Machines with Pr[b=1 | b*=1] = K / 2^w; ``promise`` cases outside (1/4, 3/4), ``gap`` inside"""
    gen = lab_rng.generator(seed)
    cases = []
    for index in range(promise + gap):
        width = int(gen.integers(2, 6))
        size = 1 << width
        if index < promise:
            if gen.integers(0, 2):
                threshold = int(gen.integers(-(-3 * size // 4), size + 1))
            else:
                threshold = int(gen.integers(0, size // 4 + 1))
        else:
            threshold = int(gen.integers(size // 4 + 1, -(-3 * size // 4)))
        x_bits = int(gen.integers(1, 4))
        x = from_int(int(gen.integers(0, 1 << x_bits)), x_bits)
        conditional = Fraction(threshold, size)
        cases.append(PostselectCase(postselect_machine(x_bits, width, threshold), x, conditional,
                                    expected_verdict(conditional)))
    return cases


# Smoothing


def min_probability_bits(fam: DistributionFamily) -> int:
    """Smallest m >= out_bits with Pr[x <- D(z)] >= 2^-m for every positive probability

    Floored at out_bits, so m + 1 - out_bits >= 1 and the smoothing weight stays
    below 1/2 even for families with only point masses.
    """
    m = fam.out_bits
    for z in fam.parameters():
        for _, p in fam.distribution(z).items():
            m = max(m, (-(-p.denominator // p.numerator) - 1).bit_length())
    return m


def smoothing_constant(m: int, p: int, eps: int) -> float:
    """(2^(-1/(2 eps)) - 2^(-1/eps)) * 2^-(m + 1 - p)"""
    return (2.0 ** (-1.0 / (2 * eps)) - 2.0 ** (-1.0 / eps)) * 2.0 ** (-(m + 1 - p))


@dataclass(frozen=True)
class SmoothingPlan:
    m: int
    p: int
    constant: float
    width: int
    numerator: int

    @property
    def dyadic(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.width)

    @property
    def rounding_error(self) -> float:
        return self.constant - float(self.dyadic)


def smoothing_plan(fam: DistributionFamily, eps: int, rand_budget: Optional[int] = None) -> SmoothingPlan:
    """Round the mixing weight down to K / 2^w with at most ``rand_budget`` comparator bits"""
    if eps < 1:
        raise PreconditionError("eps must be >= 1")
    m, p = min_probability_bits(fam), fam.out_bits
    constant = smoothing_constant(m, p, eps)
    width = settings.SMOOTH_EXTRA_BITS + max(0, m + 1 - p)
    if rand_budget is not None:
        width = min(width, rand_budget)
    if width < 1:
        raise SizeLimitError("no random bits left for the smoothing coin")
    numerator = math.floor(constant * (1 << width))
    plan = SmoothingPlan(m, p, constant, width, numerator)
    if numerator == 0:
        logger.warning("Smoothing weight %.3g rounds to 0 at %d bits; family left unchanged", constant, width)
    else:
        logger.info("Smoothing weight %.6g rounded to %s (error %.3g)", constant, plan.dyadic, plan.rounding_error)
    return plan


def smooth_family(fam: DistributionFamily, eps: int) -> DistributionFamily:
    """Mixture (1 - C) D(z) + C U_p with C the dyadic smoothing weight"""
    if isinstance(fam, CircuitFamily):
        budget = settings.MAX_RAND_BITS - fam.rand_bits - fam.out_bits
        plan = smoothing_plan(fam, eps, budget)
        builder = CircuitBuilder(fam.param_bits, fam.rand_bits + plan.width + fam.out_bits)
        original = builder.embed(
            fam, [builder.param(i) for i in range(fam.param_bits)],
            [builder.rand(j) for j in range(fam.rand_bits)],
        )
        coin = builder.less_than([builder.rand(fam.rand_bits + j) for j in range(plan.width)], plan.numerator)
        offset = fam.rand_bits + plan.width
        outputs = [builder.mux(coin, wire, builder.rand(offset + i)) for i, wire in enumerate(original)]
        return builder.build(outputs)

    plan = smoothing_plan(fam, eps)
    uniform = Distribution.uniform(fam.out_bits)
    return TableFamily({z: fam.distribution(z).mix(uniform, plan.dyadic) for z in fam.parameters()},
                       fam.param_bits)


# Repetition


def repetition_t(m: int, eps: int, k: int, delta: int) -> int:
    """ceil(1000 m^2 eps^2 (k + log2(2 delta)))"""
    return math.ceil(1000 * m * m * eps * eps * (k + math.log2(2 * delta)))


class RepeatedFamily(DistributionFamily):
    """D'(z) = D(z)^t; outcomes are concatenated t-tuples"""

    def __init__(self, base: DistributionFamily, t: int):
        if t < 1:
            raise PreconditionError("repetition count must be >= 1")
        super().__init__(base.param_bits, base.out_bits * t)
        self.base = base
        self.t = t

    @property
    def exact(self) -> bool:
        return self.out_bits <= settings.MAX_TUPLE_BITS

    def coordinates(self, x: str) -> list[str]:
        check_bits(x, self.out_bits, "outcome")
        m = self.base.out_bits
        return [x[i * m:(i + 1) * m] for i in range(self.t)]

    def _compute_distribution(self, z: str) -> Distribution:
        if not self.exact:
            raise SizeLimitError(f"{self.out_bits}-bit tuples exceed the enumeration cap; sampling only")
        return tensor_power(self.base.distribution(z), self.t)

    def prob(self, z: str, x: str) -> Fraction:
        dist = self.base.distribution(z)
        return math.prod((dist.prob(xi) for xi in self.coordinates(x)), start=Fraction(1))

    @property
    def coin_space(self) -> int:
        return self.base.coin_space ** self.t

    def draw_coins(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.base.draw_coins(n * self.t, rng).reshape(n, self.t)

    def _coordinate_values(self, z: str, coins: np.ndarray) -> np.ndarray:
        coins = np.asarray(coins).reshape(-1, self.t)
        return self.base.outcome_ints(z, coins.ravel()).reshape(coins.shape)

    def outcome_ints(self, z: str, coins: np.ndarray) -> np.ndarray:
        if self.out_bits > 62:
            raise SizeLimitError("tuple outcomes do not fit a 64-bit integer")
        packed = np.zeros(len(np.asarray(coins).reshape(-1, self.t)), dtype=np.int64)
        for column in self._coordinate_values(z, coins).T:
            packed = (packed << self.base.out_bits) | column
        return packed

    def sample(self, z: str, n: int, rng: np.random.Generator) -> list[str]:
        check_bits(z, self.param_bits, "parameter")
        values = self._coordinate_values(z, self.draw_coins(n, rng))
        m = self.base.out_bits
        return ["".join(from_int(int(v), m) for v in row) for row in values]

    def is_fully_supported(self) -> bool:
        return self.base.is_fully_supported()

    def describe(self) -> dict:
        info = super().describe()
        info.update(base=self.base.describe(), t=self.t)
        return info


def repeat_family(
    fam: DistributionFamily,
    eps: int,
    delta: int,
    t: Optional[int] = None,
    sampling: bool = False,
) -> RepeatedFamily:
    """Family over t-tuples; t defaults to repetition_t(m, eps, k, delta)"""
    if t is None:
        t = repetition_t(min_probability_bits(fam), eps, fam.param_bits, delta)
    repeated = RepeatedFamily(fam, t)
    if not repeated.exact and not sampling:
        raise SizeLimitError(
            f"{t} repetitions of {fam.out_bits}-bit outcomes exceed the {settings.MAX_TUPLE_BITS}-bit cap; "
            "enable sampling mode"
        )
    return repeated


# Generator instance, Check and breaker


def prg_learning_instance(prg: CircuitFamily, eps: int = 4, delta: int = 10, t: int = 16) -> LearningInstance:
    """Parameter (mu, b), output (xi, mu): xi <- Gen(mu) when b = 0, uniform when b = 1"""
    n = prg.out_bits
    a = advice_bits(n)
    if prg.param_bits != a:
        raise LengthMismatchError(f"generator advice has {prg.param_bits} bits, expected {a} for n={n}")
    builder = CircuitBuilder(a + 1, prg.rand_bits + n)
    generated = builder.embed(prg, [builder.param(i) for i in range(a)],
                              [builder.rand(j) for j in range(prg.rand_bits)])
    b = builder.param(a)
    xi = [builder.mux(b, wire, builder.rand(prg.rand_bits + i)) for i, wire in enumerate(generated)]
    family = builder.build(xi + [builder.param(i) for i in range(a)])

    weight = Fraction(1, 2 * n)
    sampler = Distribution({from_int(mu, a) + bit: weight for mu in range(n) for bit in "01"}, a + 1)
    return LearningInstance(sampler, family, LearnParams(eps=eps, delta=delta, t=t))


def _generator_shape(inst: LearningInstance) -> tuple[int, int]:
    a = inst.family.param_bits - 1
    return inst.family.out_bits - a, a


def _tagged(values, n: int, mu_bits: str) -> tuple[str, ...]:
    return tuple(from_int(int(v), n) + mu_bits for v in values)


def check_mu(learner_fn: ProperLearner, inst: LearningInstance, mu: int, reps: Optional[int] = None,
             seed: int = 0) -> bool:
    """True iff the learner answers b = 1 on every one of ``reps`` uniform sample sets tagged mu"""
    reps = settings.CHECK_REPS if reps is None else reps
    if reps < 1:
        raise PreconditionError("reps must be >= 1")
    n, a = _generator_shape(inst)
    mu_bits = from_int(mu, a)
    for j in range(reps):
        run_seed = lab_rng.derive_seed(seed, j)
        values = lab_rng.generator(run_seed).integers(0, 1 << n, size=inst.t)
        h = learner_fn(SampleSet(_tagged(values, n, mu_bits), run_seed), run_seed)
        if h[-1] != "1":
            return False
    return True


def prg_breaker(learner_fn: ProperLearner, inst: LearningInstance, samples: SampleSet,
                reps: Optional[int] = None, seed: int = 0) -> int:
    """0 ("generator") if some flagged mu gets b = 0 on the tagged samples, else 1 ("uniform")"""
    n, a = _generator_shape(inst)
    samples.check_width(n)
    for mu in range(n):
        mu_bits = from_int(mu, a)
        tagged = SampleSet(tuple(x + mu_bits for x in samples), samples.seed)
        h = learner_fn(tagged, lab_rng.derive_seed(seed, n + mu))
        if h[-1] == "0" and check_mu(learner_fn, inst, mu, reps, lab_rng.derive_seed(seed, mu)):
            logger.debug("Breaker flags advice %s", mu_bits)
            return 0
    return 1


def check_error_exact(inst: LearningInstance, mu: int, learner_fn: ProperLearner) -> Fraction:
    """Pr over uniform tagged samples that the learner answers b = 0

    The learner must not depend on sample order; each multiset is fed in sorted order.
    """
    n, a = _generator_shape(inst)
    if inst.t * n > settings.MAX_TUPLE_BITS:
        raise SizeLimitError(f"{inst.t} samples of {n} bits exceed the {settings.MAX_TUPLE_BITS}-bit cap")
    mu_bits = from_int(mu, a)
    outcomes = list(all_strings(n))
    error = Fraction(0)
    for counts in compositions(inst.t, len(outcomes)):
        samples = tuple(x + mu_bits for x, c in zip(outcomes, counts) for _ in range(c))
        if learner_fn(SampleSet(samples, 0), 0)[-1] != "1":
            error += math.factorial(inst.t) // math.prod(math.factorial(c) for c in counts)
    return error / (1 << (n * inst.t))


def mle_learner(fam: DistributionFamily) -> ProperLearner:
    """Exhaustive maximum-likelihood learner"""
    return lambda samples, seed: eval_mle(fam, samples).argmax_z

"""
Claim registry for the verification suite

Each claim is a function of a ``ClaimContext`` returning a ``ClaimResult``.
Exact claims count failures over an enumerated corpus; Monte Carlo claims carry a
``RateEstimate`` and fail only when the 99% interval rules the claimed rate out.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from app import __version__
from app.core import rng as lab_rng
from app.core.config import settings
from app.core.distributions import (
    Distribution,
    kl_divergence,
    likelihood_test_advantage,
    likelihood_test_mass,
    log2_fraction,
    sample_distribution,
    statistical_distance,
    tensor_sd,
)
from app.core.exceptions import PreconditionError
from app.core.families import DistributionFamily
from app.core.fixtures import (
    agnostic_fixtures,
    and_family,
    biased_family,
    fixture_families,
    identity_family,
    load_fixture_instance,
    parity_prg,
    random_pairs,
    random_table_family,
    uniform_family,
)
from app.core.sampling import SampleSet
from app.models.reports import ClaimResult, SuiteReport
from app.services import learner as learner_service
from app.services.bounds import hoeffding_T, verify_hoeffding_empirical, verify_tensor_amplification
from app.services.estimator import dis_estimator, exact_estimator, noisy_estimator
from app.services.learner import (
    ExactGapOracle,
    bit_by_bit,
    default_learner_t,
    default_rounds,
    learn_kl,
    learn_sd_agnostic,
)
from app.services.mle import INFINITY, brute_force_likelihoods, eval_mle, ml_ratio, ratio_within
from app.services.owpuzz import owp_best_attack, owp_completeness, useful_probability
from app.services.reductions import (
    check_error_exact,
    decide_by_mle,
    mle_learner,
    postselect_corpus,
    prg_breaker,
    prg_learning_instance,
    smooth_family,
)
from app.utils.bits import all_strings, from_int
from app.utils.stats import rate_estimate, wilson_interval

logger = logging.getLogger(__name__)

DisFn = Callable[..., int]

CLAIM_IDS = (
    "sd_kl_axioms",
    "tensor_monotonicity",
    "probabilistic_argument",
    "statistical_distance",
    "useful",
    "owpuzz_completeness",
    "NP_distinguish",
    "ag_SD",
    "behave_well",
    "kl_mle_identity",
    "smoothing_ratio",
    "postselection",
    "prg_breaker",
    "hoeffding",
    "estimator_soundness",
    "mle_oracle",
)


@dataclass
class ClaimContext:
    seed: int = field(default_factory=lambda: settings.DEFAULT_SEED)
    scale: float = 1.0
    dis_fn: Optional[DisFn] = None
    reps: Optional[int] = None

    def count(self, n: int) -> int:
        return max(1, math.ceil(n * self.scale))

    def seed_for(self, claim_id: str) -> int:
        return lab_rng.derive_seed(self.seed, CLAIM_IDS.index(claim_id))

    @property
    def dis(self) -> DisFn:
        return self.dis_fn or learner_service.dis


ClaimFn = Callable[[ClaimContext], ClaimResult]
CLAIMS: dict[str, ClaimFn] = {}


def claim(claim_id: str):
    def register(fn: ClaimFn) -> ClaimFn:
        CLAIMS[claim_id] = fn
        return fn

    return register


def _exact_result(claim_id: str, checked: int, failures: list[str]) -> ClaimResult:
    detail = "; ".join(failures[:5])
    return ClaimResult(claim=claim_id, passed=not failures, checked=checked, failures=len(failures), detail=detail)


def _qualifying_pairs(seed: int, count: int) -> list[tuple[Distribution, Distribution, int]]:
    """Pairs over 1- or 2-bit supports with the smallest eps in (1, 2, 4) such that SD > 1/(2 eps)"""
    found, batch = [], 0
    while len(found) < count:
        for p, q in random_pairs(lab_rng.derive_seed(seed, batch), 4 * count, max_support_len=2):
            sd = statistical_distance(p, q)
            eps = next((e for e in (1, 2, 4) if sd > Fraction(1, 2 * e)), None)
            if eps is not None:
                found.append((p, q, eps))
            if len(found) == count:
                break
        batch += 1
    return found


# Distribution toolkit


@claim("sd_kl_axioms")
def sd_kl_axioms(ctx: ClaimContext) -> ClaimResult:
    failures = []
    pairs = random_pairs(ctx.seed_for("sd_kl_axioms"), ctx.count(1000))
    for index, (p, q) in enumerate(pairs):
        sd = statistical_distance(p, q)
        r = p.mix(q, Fraction(1, 3)).mix(Distribution.uniform(p.support_len), Fraction(1, 5))
        midpoint = p.mix(q, Fraction(1, 2))
        checks = {
            "symmetry": sd == statistical_distance(q, p),
            "range": 0 <= sd <= 1,
            "identity": statistical_distance(p, p) == 0,
            "triangle": statistical_distance(p, r) <= sd + statistical_distance(q, r),
            "likelihood test": likelihood_test_advantage(p, q) == sd,
            "kl self": kl_divergence(p, p) == 0,
            "kl positive": (kl_divergence(p, midpoint) > 0) == (p != q),
        }
        failures += [f"pair {index}: {name}" for name, ok in checks.items() if not ok]
    return _exact_result("sd_kl_axioms", len(pairs), failures)


@claim("tensor_monotonicity")
def tensor_monotonicity(ctx: ClaimContext) -> ClaimResult:
    failures = []
    pairs = random_pairs(ctx.seed_for("tensor_monotonicity"), ctx.count(200), max_support_len=2)
    for index, (p, q) in enumerate(pairs):
        previous = Fraction(0)
        for t in range(1, 7):
            current = tensor_sd(p, q, t)
            if current < previous:
                failures.append(f"pair {index}: SD drops at t={t}")
            previous = current
    return _exact_result("tensor_monotonicity", len(pairs), failures)


@claim("probabilistic_argument")
def probabilistic_argument(ctx: ClaimContext) -> ClaimResult:
    failures, checked = [], 0
    for index, (p, q, eps) in enumerate(_qualifying_pairs(ctx.seed_for("probabilistic_argument"), ctx.count(200))):
        t_max = settings.MAX_TUPLE_BITS // p.support_len
        for report in verify_tensor_amplification(p, q, eps, t_max):
            checked += 1
            if not report.holds:
                failures.append(f"pair {index}, t={report.parameters['t']}: {report.observed} <= {report.predicted:.6f}")
    return _exact_result("probabilistic_argument", checked, failures)


@claim("statistical_distance")
def statistical_distance_claim(ctx: ClaimContext) -> ClaimResult:
    failures, checked = [], 0
    for index, (p, q, _) in enumerate(_qualifying_pairs(ctx.seed_for("probabilistic_argument"), ctx.count(200))):
        for first, second in ((p, q), (q, p)):
            sd = statistical_distance(first, second)
            for alpha in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
                if sd > alpha:
                    checked += 1
                    if not likelihood_test_mass(first, second) > alpha:
                        failures.append(f"pair {index}, alpha={alpha}")
    return _exact_result("statistical_distance", checked, failures)


# Puzzles


@claim("useful")
def useful(ctx: ClaimContext) -> ClaimResult:
    families = {"biased_k4": biased_family(4), "point_mass_k3": identity_family(3)}
    eps = 1
    trials = ctx.count(200)
    seed = ctx.seed_for("useful")
    failures, checked, worst = [], 0, None
    for name, fam in families.items():
        k = fam.param_bits
        t = 16 * eps * eps * k
        claimed = 1 - 2.0 ** (-k + 1)
        for i, z in enumerate(fam.parameters()):
            checked += 1
            result = useful_probability(fam, z, eps, t, trials, lab_rng.derive_seed(seed, checked))
            if result.exact:
                ok = result.value >= Fraction(claimed)
            else:
                estimate = rate_estimate(round(result.value * result.trials), result.trials, claimed)
                ok = bool(estimate.consistent)
                if worst is None or estimate.rate < worst.rate:
                    worst = estimate
            if not ok:
                failures.append(f"{name} z={z}: {float(result.value):.4f} < {claimed}")
    result = _exact_result("useful", checked, failures)
    result.rate = worst
    return result


@claim("owpuzz_completeness")
def owpuzz_completeness(ctx: ClaimContext) -> ClaimResult:
    seed = ctx.seed_for("owpuzz_completeness")
    inst = load_fixture_instance("owpuzz_biased_k4")
    rate = owp_completeness(inst, ctx.count(500), seed, claimed=0.99)
    failures = [] if rate.consistent else [f"acceptance {rate.rate:.4f} below 0.99"]

    small = load_fixture_instance("owpuzz_identity_k2")
    attack = owp_best_attack(small)
    honest = owp_completeness(small, ctx.count(100), seed)
    if attack.success < honest.lower:
        failures.append(f"best attack {attack.success} below honest completeness {honest.rate}")
    return ClaimResult(
        claim="owpuzz_completeness",
        passed=not failures,
        checked=rate.trials + honest.trials,
        failures=len(failures),
        detail="; ".join(failures),
        rate=rate,
    )


# Learner


def _distinguishing_advantage(ctx: ClaimContext, est, fam: DistributionFamily, l: str, m: str, eps: int) -> Fraction:
    p_l, p_m = fam.distribution(l), fam.distribution(m)
    outcomes = sorted(set(p_l.support()) | set(p_m.support()))
    total = sum(
        (ctx.dis(est, l, m, x, eps, 0) * (p_l.prob(x) - p_m.prob(x)) for x in outcomes), Fraction(0)
    )
    return abs(total)


def _pointwise_violation(fam: DistributionFamily, l: str, m: str, x: str, eps: int, bit: int) -> bool:
    p_l, p_m = fam.prob(l, x), fam.prob(m, x)
    if p_l >= (1 + Fraction(1, 8 * eps)) * p_m and bit != 1:
        return True
    return p_m > p_l and bit != 0


@claim("NP_distinguish")
def np_distinguish(ctx: ClaimContext) -> ClaimResult:
    failures, checked = [], 0
    families = fixture_families()
    for name, fam in families.items():
        est = exact_estimator(fam)
        params = list(fam.parameters())
        outcomes = list(all_strings(fam.out_bits))
        for l in params:
            for m in params:
                sd = statistical_distance(fam.distribution(l), fam.distribution(m))
                for eps in (1, 2, 4):
                    if l != m and sd >= Fraction(1, eps):
                        checked += 1
                        advantage = _distinguishing_advantage(ctx, est, fam, l, m, eps)
                        slack = Fraction(1, 4 * eps)
                        if sd > (1 + slack) * advantage + slack:
                            failures.append(f"{name} ({l},{m}) eps={eps}: SD {sd} vs advantage {advantage}")
                for x in outcomes:
                    bit = ctx.dis(est, l, m, x, 1, 0)
                    if _pointwise_violation(fam, l, m, x, 1, bit):
                        failures.append(f"{name} ({l},{m},{x}): exact dis = {bit}")

    # Noisy estimator: violations only where a query failed
    fam = families["biased_k4"]
    eps = 1
    est = dis_estimator(fam, eps, ctx.seed_for("NP_distinguish"))
    queries = violations = 0
    for l in fam.parameters():
        for m in fam.parameters():
            for x in all_strings(fam.out_bits):
                bit = ctx.dis(est, l, m, x, eps, queries)
                flagged = est.estimate(l, x, queries, 0).failed or est.estimate(m, x, queries, 1).failed
                if _pointwise_violation(fam, l, m, x, eps, bit):
                    violations += 1
                    if not flagged:
                        failures.append(f"noisy ({l},{m},{x}) violated without a failed query")
                queries += 1
    lower, _ = wilson_interval(violations, queries)
    allowed = 2 / (settings.DIS_PRECISION_FACTOR * eps)
    if lower > allowed:
        failures.append(f"noisy violation rate {violations}/{queries} exceeds {allowed}")
    return _exact_result("NP_distinguish", checked + queries, failures)


@claim("ag_SD")
def ag_sd(ctx: ClaimContext) -> ClaimResult:
    eps, delta = 4, 10
    runs = ctx.count(200)
    seed = ctx.seed_for("ag_SD")
    failures, worst, total = [], None, 0
    for f_index, fixture in enumerate(agnostic_fixtures()):
        fam, target = fixture.family, fixture.target
        t = default_learner_t(fam.param_bits, eps, delta)
        successes = 0
        for run in range(runs):
            run_seed = lab_rng.derive_seed(seed, f_index, run)
            samples = SampleSet(
                tuple(sample_distribution(target, t, lab_rng.generator(run_seed))), run_seed
            )
            report = learn_sd_agnostic(fam, samples, eps, delta, run_seed, target=target)
            successes += report.within_bound
        total += runs
        estimate = rate_estimate(successes, runs, 1 - 1 / delta)
        logger.info("ag_SD %s: %d / %d within bound", fixture.name, successes, runs)
        if not estimate.consistent:
            failures.append(f"{fixture.name}: {successes}/{runs} within bound")
        if worst is None or estimate.rate < worst.rate:
            worst = estimate
    result = _exact_result("ag_SD", total, failures)
    result.rate = worst
    return result


@claim("behave_well")
def behave_well(ctx: ClaimContext) -> ClaimResult:
    eps = 4
    failures, checked = [], 0
    for fixture in agnostic_fixtures():
        fam, target = fixture.family, fixture.target
        k = fam.param_bits
        oracle = ExactGapOracle(fam, target, eps)
        opt = min(statistical_distance(target, fam.distribution(a)) for a in fam.parameters())
        h, _ = bit_by_bit(oracle, default_rounds(k, eps))
        for stage in range(1, k + 1):
            checked += 1
            reachable = oracle.best_completion(h[:stage])
            allowed = opt + Fraction(stage, 2 * k * eps)
            if reachable > allowed:
                failures.append(f"{fixture.name} stage {stage}: {reachable} > {allowed}")
    return _exact_result("behave_well", checked, failures)


@claim("kl_mle_identity")
def kl_mle_identity(ctx: ClaimContext) -> ClaimResult:
    seed = ctx.seed_for("kl_mle_identity")
    families: dict[str, DistributionFamily] = {
        "biased_k1": biased_family(1),
        "biased_k4": biased_family(4),
        "uniform_k2": uniform_family(2, 2),
    }
    for i in range(ctx.count(4)):
        families[f"table_{i}"] = random_table_family(lab_rng.derive_seed(seed, i), 2, 2, full_support=True)

    failures, checked = [], 0
    for name, fam in families.items():
        params = list(fam.parameters())
        for x in all_strings(fam.out_bits):
            point = Distribution.point_mass(x)
            divergences = [kl_divergence(point, fam.distribution(a)) for a in params]
            best = min(divergences)
            for h, divergence in zip(params, divergences):
                checked += 1
                expected = log2_fraction(Fraction(ml_ratio(fam, x, h)))
                if abs((divergence - best) - expected) > 1e-12:
                    failures.append(f"{name} x={x} h={h}: {divergence - best} vs {expected}")

        z = params[-1]
        samples = SampleSet(tuple(fam.sample(z, 64, lab_rng.generator(seed, checked))), seed)
        h = learn_kl(fam, samples, 1)
        empirical = Distribution.empirical(samples.samples)
        kls = {a: kl_divergence(empirical, fam.distribution(a)) for a in params}
        checked += 1
        if kls[h] - min(kls.values()) > 1e-9:
            failures.append(f"{name}: learned {h} is not KL-optimal on its samples")
    return _exact_result("kl_mle_identity", checked, failures)


# Reductions


@claim("smoothing_ratio")
def smoothing_ratio(ctx: ClaimContext) -> ClaimResult:
    seed = ctx.seed_for("smoothing_ratio")
    families: dict[str, DistributionFamily] = {
        "identity_k1": identity_family(1),
        "point_mass_k3": identity_family(3),
        "biased_k1": biased_family(1),
        "biased_k4": biased_family(4),
        "uniform_k2": uniform_family(2, 2),
        "table_k2": random_table_family(seed, 2, 2),
    }
    failures, checked = [], 0
    for name, fam in families.items():
        for eps in (1, 2):
            smoothed = smooth_family(fam, eps)
            for x in all_strings(fam.out_bits):
                if all(fam.prob(a, x) == 0 for a in fam.parameters()):
                    continue
                for h in fam.parameters():
                    checked += 1
                    if ratio_within(ml_ratio(smoothed, x, h), eps, halve=True) and not ratio_within(
                        ml_ratio(fam, x, h), eps
                    ):
                        failures.append(f"{name} eps={eps} x={x} h={h}")
    return _exact_result("smoothing_ratio", checked, failures)


@claim("postselection")
def postselection(ctx: ClaimContext) -> ClaimResult:
    failures = []
    cases = postselect_corpus(ctx.seed_for("postselection"), ctx.count(50), ctx.count(10))
    for index, case in enumerate(cases):
        decision = decide_by_mle(case.machine, case.x)
        if decision.verdict is not case.expected:
            failures.append(f"machine {index}: {decision.verdict.value} for Pr[b=1|b*=1] = {case.conditional}")
        ratio = INFINITY if decision.ratio is None else decision.ratio
        if case.conditional >= Fraction(2, 3) and ratio < 2:
            failures.append(f"machine {index}: ratio {ratio} < 2")
        if case.conditional <= Fraction(1, 3) and ratio > Fraction(1, 2):
            failures.append(f"machine {index}: ratio {ratio} > 1/2")
    return _exact_result("postselection", len(cases), failures)


@claim("prg_breaker")
def prg_breaker_claim(ctx: ClaimContext) -> ClaimResult:
    prg = parity_prg(4)
    inst = prg_learning_instance(prg)
    learner = mle_learner(inst.family)
    seed = ctx.seed_for("prg_breaker")
    trials = ctx.count(500)
    n, a = prg.out_bits, prg.param_bits
    on_uniform = on_prg = 0
    for i in range(trials):
        gen = lab_rng.generator(seed, i)
        uniform = SampleSet(tuple(from_int(int(v), n) for v in gen.integers(0, 1 << n, size=inst.t)), seed)
        mu = from_int(i % n, a)
        generated = SampleSet(tuple(prg.sample(mu, inst.t, gen)), seed)
        on_uniform += prg_breaker(learner, inst, uniform, ctx.reps, seed=lab_rng.derive_seed(seed, i, 0))
        on_prg += prg_breaker(learner, inst, generated, ctx.reps, seed=lab_rng.derive_seed(seed, i, 1))
    advantage = Fraction(on_uniform - on_prg, trials)

    small = inst.with_params(t=4)
    error = check_error_exact(small, 0, mle_learner(small.family))
    failures = []
    if advantage < Fraction(9, 10):
        failures.append(f"advantage {float(advantage):.3f} < 0.9")
    if error != Fraction(1, 2 ** small.t):
        failures.append(f"exact Check error {error} for t={small.t}")
    result = _exact_result("prg_breaker", 2 * trials, failures)
    result.detail = result.detail or f"advantage {float(advantage):.4f}"
    return result


# Bounds and oracles


@claim("hoeffding")
def hoeffding(ctx: ClaimContext) -> ClaimResult:
    failures = []
    if hoeffding_T(1, 0.1, 0.01, 10) != 1665:
        failures.append("hoeffding_T(1, 0.1, 0.01, 10) != 1665")
    if hoeffding_T(1, 1, 0.5, 0) != 1:
        failures.append("hoeffding_T(1, 1, 1/2, 0) != 1")
    grid = [(M, e, d, f) for M in (1, 2) for e in (0.05, 0.1, 0.2) for d in (0.01, 0.1) for f in (0, 4)]
    for M, e, d, f in grid:
        base = hoeffding_T(M, e, d, f)
        if hoeffding_T(M, e * 2, d, f) > base or hoeffding_T(M, e, d * 2, f) > base:
            failures.append(f"not nonincreasing at {(M, e, d, f)}")
        if hoeffding_T(M * 2, e, d, f) < base or hoeffding_T(M, e, d, f + 1) < base:
            failures.append(f"not nondecreasing at {(M, e, d, f)}")

    seed = ctx.seed_for("hoeffding")
    trials = max(ctx.count(200), 200)
    reports = [
        verify_hoeffding_empirical(and_family(), "", [lambda x: float(x == "1")], 0.05, 0.1, trials, seed),
        verify_hoeffding_empirical(and_family(), "", [lambda x: 0.0], 0.05, 0.1, trials, seed),
        verify_hoeffding_empirical(
            biased_family(2), "10", [lambda x, i=i: float(x[i] == "1") for i in range(2)], 0.1, 0.05, trials, seed
        ),
    ]
    failures += [f"empirical check {r.parameters}" for r in reports if not r.holds]
    return _exact_result("hoeffding", len(grid) + 2 + len(reports), failures)


@claim("estimator_soundness")
def estimator_soundness(ctx: ClaimContext) -> ClaimResult:
    fam = biased_family(2)
    seed = ctx.seed_for("estimator_soundness")
    noisy = noisy_estimator(fam, 4, 2, seed)
    near_exact = noisy_estimator(fam, 10**9, 10**9, seed)
    exact = exact_estimator(fam)
    params = list(fam.parameters())
    outcomes = list(all_strings(fam.out_bits))
    n = ctx.count(10_000)

    failures, failed = [], 0
    for counter in range(n):
        z = params[counter % len(params)]
        x = outcomes[(counter // len(params)) % len(outcomes)]
        p = float(exact.estimate(z, x).value)
        result = noisy.estimate(z, x, counter)
        if result.failed:
            failed += 1
        elif abs(result.value - p) > p / 4 + 1e-15:
            failures.append(f"counter {counter}: {result.value} vs {p}")
        close = near_exact.estimate(z, x, counter)
        if p > 0 and not close.failed and abs(close.value - p) > 1e-8 * p:
            failures.append(f"counter {counter}: near-exact estimator off")
    tolerance = 3 * math.sqrt(0.5 * 0.5 / n)
    if abs(failed / n - 0.5) > tolerance:
        failures.append(f"failure rate {failed / n:.4f} outside 0.5 +- {tolerance:.4f}")
    return _exact_result("estimator_soundness", n, failures)


@claim("mle_oracle")
def mle_oracle(ctx: ClaimContext) -> ClaimResult:
    seed = ctx.seed_for("mle_oracle")
    failures, checked = [], 0
    for i in range(ctx.count(50)):
        fam = random_table_family(lab_rng.derive_seed(seed, i), 2, 2)
        gen = lab_rng.generator(seed, i, 1)
        z = from_int(int(gen.integers(0, 4)), 2)
        samples = fam.sample(z, 6, gen)
        result = eval_mle(fam, samples)
        scores = brute_force_likelihoods(fam, samples)
        best = max(score for _, score in scores)
        expected = min(a for a, score in scores if score == best)
        checked += 1
        if (result.argmax_z, result.max_likelihood) != (expected, best):
            failures.append(f"family {i}: {result.argmax_z} vs {expected}")
        for x in samples:
            top = eval_mle(fam, [x]).argmax_z
            if ml_ratio(fam, x, top) != 1:
                failures.append(f"family {i}: ml_ratio at argmax for {x} is not 1")
    return _exact_result("mle_oracle", checked, failures)


def run_claim(claim_id: str, ctx: ClaimContext) -> ClaimResult:
    if claim_id not in CLAIMS:
        raise PreconditionError(f"unknown claim {claim_id!r}; known: {', '.join(CLAIM_IDS)}")
    logger.info("Checking claim %s", claim_id)
    result = CLAIMS[claim_id](ctx)
    if not result.passed:
        logger.warning("Claim %s failed: %s", claim_id, result.detail)
    return result


def run_suite(
    claims: Optional[Iterable[str]] = None,
    seed: Optional[int] = None,
    scale: float = 1.0,
    dis_fn: Optional[DisFn] = None,
    reps: Optional[int] = None,
) -> SuiteReport:
    """Run the selected claims (all by default) in registry order"""
    selected = list(claims) if claims else list(CLAIM_IDS)
    ctx = ClaimContext(settings.DEFAULT_SEED if seed is None else seed, scale, dis_fn, reps)
    results = [run_claim(claim_id, ctx) for claim_id in selected]
    return SuiteReport(
        version=__version__,
        config={
            "seed": ctx.seed,
            "scale": scale,
            "claims": selected,
            "reps": reps or settings.CHECK_REPS,
            "rng": lab_rng.describe(),
        },
        passed=all(r.passed for r in results),
        claims=results,
    )

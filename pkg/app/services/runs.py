"""
Command runners shared by the CLI and the HTTP API

Each runner takes a resolved ``RunConfig`` plus already-loaded inputs and
returns a ``RunReport`` that embeds the config and the tool version.
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional

from app import __version__
from app.core import rng as lab_rng
from app.core.circuits import CircuitFamily, load_family
from app.core.distributions import Distribution, sample_distribution
from app.core.exceptions import PreconditionError, SizeLimitError
from app.core.families import DistributionFamily
from app.core.fixtures import FIXTURE_DIR, load_fixture, load_fixture_instance
from app.core.instances import LearningInstance, load_instance
from app.core.sampling import SampleSet, read_samples
from app.models.reports import OwpuzzReport, RunReport, SuiteReport
from app.models.run_config import LearnMode, RunConfig
from app.services import learner as learner_service
from app.services.claims import run_suite
from app.services.mle import eval_mle
from app.services.owpuzz import owp_best_attack, owp_completeness, useful_probability
from app.services.reductions import mle_learner

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 500


# Input resolution


def resolve_family(ref: Optional[str]) -> Optional[CircuitFamily]:
    """Circuit file path, or the name of a shipped fixture"""
    if ref is None:
        return None
    if Path(ref).exists() or not (FIXTURE_DIR / f"{ref}.json").exists():
        return load_family(ref)
    return load_fixture(ref)


def resolve_instance(ref: Optional[str]) -> Optional[LearningInstance]:
    if ref is None:
        return None
    if Path(ref).exists() or not (FIXTURE_DIR / f"{ref}.json").exists():
        return load_instance(ref)
    return load_fixture_instance(ref)


def _apply_overrides(inst: LearningInstance, config: RunConfig) -> LearningInstance:
    changes = {key: getattr(config, key) for key in ("eps", "delta", "t") if getattr(config, key) is not None}
    return inst.with_params(**changes) if changes else inst


def _report(config: RunConfig, passed: bool, result: dict) -> RunReport:
    return RunReport(
        version=__version__,
        command=config.subcommand,
        config=config.model_dump(mode="json"),
        passed=passed,
        result=result,
    )


# compile


def execute_compile(config: RunConfig, fam: CircuitFamily) -> RunReport:
    summary = fam.summary(config.param)
    return _report(config, True, summary.model_dump(mode="json", exclude_none=True))


# learn


def _draw_learning_samples(
    inst: LearningInstance, t: int, seed: int
) -> tuple[SampleSet, Distribution]:
    """Samples from the instance target, or from D(z) for z drawn from the sampler"""
    gen = lab_rng.generator(seed)
    if inst.target is not None:
        return SampleSet(tuple(sample_distribution(inst.target, t, gen)), seed), inst.target
    z = inst.draw_parameter(gen)
    samples = SampleSet(tuple(inst.family.sample(z, t, gen)), seed, origin=z)
    return samples, inst.family.distribution(z)


def _proper_learner(name: str, fam: DistributionFamily, eps: int, delta: int):
    if name == "agnostic":
        return learner_service.agnostic_learner(fam, eps, delta)
    if name == "mle":
        return mle_learner(fam)
    if name == "cheating":
        return learner_service.cheating_learner
    if name.startswith("constant:"):
        return learner_service.constant_learner(name.split(":", 1)[1])
    raise PreconditionError(f"unknown learner {name!r}; use agnostic, mle, cheating or constant:<h>")


def execute_learn(
    config: RunConfig,
    inst: Optional[LearningInstance] = None,
    fam: Optional[DistributionFamily] = None,
    samples: Optional[SampleSet] = None,
) -> RunReport:
    if inst is not None:
        inst = _apply_overrides(inst, config)
        fam = inst.family
    if fam is None:
        raise PreconditionError("learn needs --family or --instance")
    eps = config.eps or (inst.eps if inst else None)
    delta = config.delta or (inst.delta if inst else None)
    if config.mode is not LearnMode.MLE and (eps is None or delta is None):
        raise PreconditionError("learn needs --eps and --delta when no instance supplies them")

    if config.mode is LearnMode.PROPER:
        if inst is None:
            raise PreconditionError("benchmark mode needs --instance")
        fn = _proper_learner(config.learner, fam, eps, delta)
        rate = learner_service.learn_proper_avg_benchmark(
            inst, fn, config.trials or 100, config.seed, claimed=1 - 1 / delta
        )
        return _report(config, bool(rate.consistent), rate.model_dump(mode="json"))

    target: Optional[Distribution] = None
    if samples is None:
        if inst is None:
            raise PreconditionError("learn needs --samples or an --instance to draw them from")
        t = config.t or inst.t
        samples, target = _draw_learning_samples(inst, t, config.seed)
    elif inst is not None:
        target = inst.target

    if config.mode is LearnMode.SD:
        report = learner_service.learn_sd_agnostic(
            fam, samples, eps, delta, config.seed, target=target, t=config.t, rounds=config.rounds
        )
        return _report(config, report.within_bound, report.model_dump(mode="json"))

    if config.mode is LearnMode.KL:
        h = learner_service.learn_kl(fam, samples, eps)
        reference = target if target is not None else Distribution.empirical(samples.samples)
        report = learner_service.kl_report(fam, reference, h, eps, len(samples))
        return _report(config, report.within_bound, report.model_dump(mode="json"))

    result = eval_mle(fam, samples)
    return _report(config, True, {
        "argmax_z": result.argmax_z,
        "max_likelihood": str(result.max_likelihood),
        "tie_count": result.tie_count,
        "t": len(samples),
    })


# owpuzz


def execute_owpuzz(config: RunConfig, inst: LearningInstance) -> RunReport:
    inst = _apply_overrides(inst, config)
    trials = config.trials or DEFAULT_TRIALS
    completeness = owp_completeness(inst, trials, config.seed, claimed=1 - 1 / inst.delta)
    attack = owp_best_attack(inst, monte_carlo=True, trials=trials, seed=lab_rng.derive_seed(config.seed, 1))

    useful: Optional[Fraction] = None
    if config.param is not None:
        try:
            useful = useful_probability(inst.family, config.param, inst.eps, inst.t, trials,
                                        lab_rng.derive_seed(config.seed, 2)).value
        except SizeLimitError as e:
            logger.warning("Skipping the useful-probability check: %s", e.detail)
    report = OwpuzzReport(t=inst.t, eps=inst.eps, completeness=completeness, best_attack=attack, useful=useful)
    return _report(config, bool(completeness.consistent), report.model_dump(mode="json"))


# verify


def execute_verify(config: RunConfig, dis_fn=None) -> SuiteReport:
    report = run_suite(config.claim or None, config.seed, config.scale, dis_fn, config.reps)
    report.config.update(format=config.format.value)
    return report


# Path-based entry points for the CLI


def cmd_compile(config: RunConfig) -> RunReport:
    fam = resolve_family(config.family)
    if fam is None:
        raise PreconditionError("compile needs --family")
    return execute_compile(config, fam)


def cmd_learn(config: RunConfig) -> RunReport:
    inst = resolve_instance(config.instance)
    fam = resolve_family(config.family) if inst is None else None
    samples = read_samples(config.samples, config.seed) if config.samples else None
    return execute_learn(config, inst=inst, fam=fam, samples=samples)


def cmd_owpuzz(config: RunConfig) -> RunReport:
    inst = resolve_instance(config.instance)
    if inst is None:
        raise PreconditionError("owpuzz needs --instance")
    return execute_owpuzz(config, inst)


def cmd_verify(config: RunConfig) -> SuiteReport:
    return execute_verify(config)

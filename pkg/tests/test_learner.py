"""
Test the distinguisher, the bit-by-bit agnostic learner and the KL learner
"""

from fractions import Fraction

import pytest

from app.core import rng as lab_rng
from app.core.distributions import Distribution, sample_distribution
from app.core.exceptions import LengthMismatchError, SupportViolationError
from app.core.fixtures import biased_family, identity_family, load_fixture_instance
from app.core.sampling import SampleSet, draw_samples
from app.services.estimator import exact_estimator, noisy_estimator
from app.services.learner import (
    EmpiricalGapOracle,
    ExactGapOracle,
    LearnerRandomness,
    bit_by_bit,
    cheating_learner,
    constant_learner,
    default_learner_t,
    default_rounds,
    dis,
    empirical_gap,
    learn_kl,
    learn_proper_avg_benchmark,
    learn_sd_agnostic,
    sigma3_query,
)


def _point_mass_samples(s: str, t: int) -> SampleSet:
    return SampleSet((s,) * t, 0)


def test_defaults():
    assert default_learner_t(1, 1, 1) == 100
    assert default_rounds(3, 4) == 5
    assert default_rounds(4, 1) == 4


def test_dis_examples():
    # D(0)(0) = 3/4 and D(1)(0) = 1/4 in the biased family
    est = exact_estimator(biased_family(1))
    assert dis(est, "0", "1", "0", eps=1) == 1
    assert dis(est, "0", "0", "0", eps=1) == 0
    assert dis(exact_estimator(identity_family(1)), "0", "1", "0", eps=1) == 1


def test_empirical_gap_examples():
    fam = identity_family(1)
    est = exact_estimator(fam)
    fresh = LearnerRandomness.draw(fam, 20, seed=1)
    assert empirical_gap(fam, est, "0", "1", _point_mass_samples("0", 20), fresh, eps=2) == 0
    assert empirical_gap(fam, est, "0", "1", _point_mass_samples("1", 20), fresh, eps=2) == 1


def test_empirical_gap_checks_coin_count():
    fam = identity_family(1)
    with pytest.raises(LengthMismatchError):
        empirical_gap(fam, exact_estimator(fam), "0", "1", _point_mass_samples("0", 5),
                      LearnerRandomness.draw(fam, 4, seed=0), eps=1)


def test_oracle_agrees_with_single_pair_gaps():
    fam = biased_family(2)
    est = exact_estimator(fam)
    samples = draw_samples(fam, "10", 60, seed=3)
    fresh = LearnerRandomness.draw(fam, 60, seed=3)
    oracle = EmpiricalGapOracle(fam, est, samples, fresh, eps=2)
    for a_index, a in enumerate(fam.parameters()):
        gaps = [empirical_gap(fam, est, a, b, samples, fresh, eps=2) for b in fam.parameters()]
        assert oracle.worst_gap(a_index) == max(gaps)


@pytest.mark.parametrize("base", [0, 7])
def test_oracle_agrees_with_single_pair_gaps_noisy(base):
    fam = biased_family(2)
    est = noisy_estimator(fam, eps_mult=8, fail=4, seed=11)
    samples = draw_samples(fam, "01", 80, seed=5)
    fresh = LearnerRandomness.draw(fam, 80, seed=5, base=base)
    oracle = EmpiricalGapOracle(fam, est, samples, fresh, eps=1)
    params = list(fam.parameters())
    for a_index, a in enumerate(params):
        for b_index, b in enumerate(params):
            expected = empirical_gap(fam, est, a, b, samples, fresh, eps=1)
            assert oracle.gap(a_index, b_index) == expected, (a, b)


def test_sigma3_query_examples(point_mass3):
    est = exact_estimator(point_mass3)
    samples = _point_mass_samples("101", 30)
    randomness = LearnerRandomness.draw(point_mass3, 30, seed=2)
    assert sigma3_query(point_mass3, est, "0", Fraction(1), samples, randomness, eps=1)
    assert not sigma3_query(point_mass3, est, "0", Fraction(-1), samples, randomness, eps=1)
    assert sigma3_query(point_mass3, est, "1", Fraction(0), samples, randomness, eps=1)
    assert not sigma3_query(point_mass3, est, "0", Fraction(0), samples, randomness, eps=1)


def test_point_mass_learned_exactly(point_mass3):
    report = learn_sd_agnostic(point_mass3, _point_mass_samples("101", 50), eps=4, delta=10, seed=1,
                               target=Distribution.point_mass("101"), estimator="exact")
    assert report.hypothesis == "101"
    assert report.achieved_sd == 0
    assert report.opt == 0
    assert report.within_bound
    assert [stage.index for stage in report.trace] == [1, 2, 3]


def test_point_mass_learned_with_noisy_estimator(point_mass3):
    report = learn_sd_agnostic(point_mass3, _point_mass_samples("101", 200), eps=4, delta=10, seed=7)
    assert report.hypothesis == "101"
    assert report.mode == "empirical/noisy"
    assert not report.target_known


def test_sample_count_checked(point_mass3):
    with pytest.raises(LengthMismatchError):
        learn_sd_agnostic(point_mass3, _point_mass_samples("101", 5), eps=1, delta=2, seed=0, t=6)


def test_uniform_family_always_within_bound(uniform2):
    samples = draw_samples(uniform2, "00", 40, seed=5)
    report = learn_sd_agnostic(uniform2, samples, eps=2, delta=4, seed=5,
                               target=Distribution.uniform(2), estimator="exact")
    assert report.within_bound
    assert report.achieved_sd == 0


def test_oracle_mode_bit_by_bit(point_mass3):
    oracle = ExactGapOracle(point_mass3, Distribution.point_mass("110"), eps=2)
    h, trace = bit_by_bit(oracle, rounds=default_rounds(3, 2))
    assert h == "110"
    assert len(trace) == 3


def test_exhausted_search_outputs_one(uniform2):
    """Identical members give equal answers for both bits, so every stage runs out of rounds"""
    oracle = ExactGapOracle(uniform2, Distribution.uniform(2), eps=1)
    h, trace = bit_by_bit(oracle, rounds=3)
    assert h == "11"
    assert all(stage.exhausted for stage in trace)


@pytest.mark.slow
def test_mixed_fixture_within_bound():
    inst = load_fixture_instance("learn_biased_k4_mixed")
    samples = SampleSet(tuple(sample_distribution(inst.target, inst.t, lab_rng.generator(12))), 12)
    report = learn_sd_agnostic(inst.family, samples, inst.eps, inst.delta, seed=12, target=inst.target)
    assert report.within_bound
    assert report.target_known


def test_learn_kl_examples(biased1, uniform2, point_mass3):
    samples = draw_samples(biased1, "1", 200, seed=3)
    assert learn_kl(biased1, samples, eps=2) == "1"
    assert learn_kl(uniform2, draw_samples(uniform2, "11", 10, seed=1), eps=1) == "00"
    with pytest.raises(SupportViolationError):
        learn_kl(point_mass3, _point_mass_samples("101", 3), eps=1)


def test_benchmark_with_cheating_and_constant_learners():
    inst = load_fixture_instance("owpuzz_identity_k2").with_params(eps=2)
    assert learn_proper_avg_benchmark(inst, cheating_learner, trials=40, seed=1).rate == 1.0
    rate = learn_proper_avg_benchmark(inst, constant_learner("00"), trials=400, seed=1)
    assert 0.15 <= rate.rate <= 0.35

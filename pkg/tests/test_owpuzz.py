"""
Test the one-way puzzle built from a learning instance
"""

from fractions import Fraction

import pytest

from app.core.distributions import Distribution
from app.core.exceptions import LengthMismatchError, PreconditionError, SizeLimitError
from app.core.fixtures import biased_family, load_fixture_instance
from app.core.instances import LearningInstance
from app.core.sampling import SampleSet
from app.models.params import LearnParams
from app.services.owpuzz import (
    owp_best_attack,
    owp_completeness,
    owp_default_t,
    owp_samp,
    owp_vrfy,
    useful_probability,
    vrfy_threshold,
)


@pytest.fixture
def identity_inst():
    return load_fixture_instance("owpuzz_identity_k2")


@pytest.fixture
def biased_pair():
    """SD(D(0), D(1)) = 1/2, eps = 2, one sample"""
    return LearningInstance(Distribution.uniform(1), biased_family(1), LearnParams(eps=2, delta=10, t=1))


def test_default_t():
    assert owp_default_t(1, 1) == 16
    assert owp_default_t(2, 3) == 192
    with pytest.raises(PreconditionError):
        owp_default_t(1, 0)


def test_samp_with_point_mass_sampler():
    inst = load_fixture_instance("learn_point_mass_k3")
    puzzle = owp_samp(inst, seed=4)
    assert puzzle.ans == "101"
    assert set(puzzle.puzz.samples) == {"101"}
    assert len(puzzle.puzz) == inst.t


def test_samp_replays(identity_inst):
    assert owp_samp(identity_inst, 99) == owp_samp(identity_inst, 99)


def test_vrfy(identity_inst):
    puzzle = owp_samp(identity_inst, 1)
    assert owp_vrfy(identity_inst, puzzle.puzz, puzzle.ans)
    other = "00" if puzzle.ans != "00" else "11"
    strict = identity_inst.with_params(eps=2)
    assert not owp_vrfy(strict, puzzle.puzz, other)


def test_vrfy_boundary_is_inclusive(biased_pair):
    # SD 1/2 against threshold 3/(2 eps) = 1/2 at eps = 3
    inst = biased_pair.with_params(eps=3)
    assert vrfy_threshold(3) == Fraction(1, 2)
    assert owp_vrfy(inst, SampleSet(("0",), 0), "1")


def test_vrfy_checks_puzzle_size(identity_inst):
    with pytest.raises(LengthMismatchError):
        owp_vrfy(identity_inst, SampleSet(("00",), 0), "00")


def test_vrfy_depends_only_on_distribution():
    inst = load_fixture_instance("owpuzz_uniform_k2")
    puzzle = owp_samp(inst, 3)
    assert owp_vrfy(inst, puzzle.puzz, "01") == owp_vrfy(inst, puzzle.puzz, "10")


def test_completeness_identity(identity_inst):
    rate = owp_completeness(identity_inst, trials=50, seed=0)
    assert rate.rate == 1.0


def test_completeness_needs_trials(identity_inst):
    with pytest.raises(PreconditionError):
        owp_completeness(identity_inst, trials=0, seed=0)


@pytest.mark.slow
def test_completeness_biased_fixture():
    inst = load_fixture_instance("owpuzz_biased_k4")
    rate = owp_completeness(inst, trials=500, seed=2024, claimed=0.99)
    assert rate.consistent
    assert rate.rate >= 0.99


def test_best_attack_trivial_instances(identity_inst):
    assert owp_best_attack(identity_inst).success == 1
    assert owp_best_attack(load_fixture_instance("owpuzz_uniform_k2")).success == 1


def test_best_attack_two_parameters(biased_pair):
    report = owp_best_attack(biased_pair)
    assert report.exact
    assert report.success == 1
    assert report.map_recovery == Fraction(3, 4)


def test_best_attack_dominates_completeness(biased_pair):
    inst = biased_pair.with_params(eps=1, t=6)
    attack = owp_best_attack(inst)
    rate = owp_completeness(inst, trials=200, seed=6)
    assert float(attack.success) >= rate.lower


def test_best_attack_size_cap():
    inst = load_fixture_instance("owpuzz_biased_k4")
    with pytest.raises(SizeLimitError):
        owp_best_attack(inst)
    report = owp_best_attack(inst, monte_carlo=True, trials=20, seed=1)
    assert not report.exact
    assert report.puzzles == 20


def test_useful_probability_identity():
    from app.core.fixtures import identity_family

    result = useful_probability(identity_family(2), "10", eps=1, t=4)
    assert result.exact
    assert result.value == 1

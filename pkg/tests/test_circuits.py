"""
Test circuit compilation and exact evaluation
"""

import json
from fractions import Fraction

import numpy as np
import pytest

from app.core.circuits import CircuitBuilder, compile_family, dist_vector, exact_prob
from app.core.exceptions import CircuitError, LengthMismatchError, SizeLimitError
from app.core.fixtures import FIXTURE_DIR, biased_family, fixture_families, load_fixture, parity_prg
from app.core.distributions import Distribution

IDENTITY = {"param_bits": 1, "rand_bits": 0, "out_bits": 1, "outputs": [0]}
AND_TWO = {
    "param_bits": 0,
    "rand_bits": 2,
    "out_bits": 1,
    "gates": [{"op": "AND", "in": [0, 1]}],
    "outputs": [2],
}


def test_identity_circuit_is_point_mass():
    fam = compile_family(json.dumps(IDENTITY))
    assert exact_prob(fam, "1", "1") == 1
    assert exact_prob(fam, "1", "0") == 0
    assert dist_vector(fam, "0") == Distribution.point_mass("0")


def test_and_of_two_random_bits():
    fam = compile_family(AND_TWO)
    assert exact_prob(fam, "", "1") == Fraction(1, 4)
    assert exact_prob(fam, "", "0") == Fraction(3, 4)
    assert dist_vector(fam, "").to_json()["probs"] == {"0": "3/4", "1": "1/4"}


def test_uniform_output_has_equal_entries(uniform2):
    dist = dist_vector(uniform2, "10")
    assert all(p == Fraction(1, 4) for _, p in dist.items())
    assert dist.is_full_support()


def test_gate_reading_missing_wire_is_rejected():
    bad = {"param_bits": 1, "rand_bits": 1, "out_bits": 1,
           "gates": [{"op": "AND", "in": [0, 99]}], "outputs": [2]}
    with pytest.raises(CircuitError):
        compile_family(bad)


def test_output_wire_out_of_range():
    with pytest.raises(CircuitError):
        compile_family({**IDENTITY, "outputs": [3]})


def test_unparseable_json():
    with pytest.raises(CircuitError):
        compile_family("{not json")


def test_not_gate_takes_one_input():
    bad = {"param_bits": 2, "rand_bits": 0, "out_bits": 1,
           "gates": [{"op": "NOT", "in": [0, 1]}], "outputs": [2]}
    with pytest.raises(CircuitError):
        compile_family(bad)


def test_size_caps():
    with pytest.raises(SizeLimitError):
        compile_family({"param_bits": 0, "rand_bits": 40, "out_bits": 1, "outputs": [0]})


def test_parameter_length_checked(identity1):
    with pytest.raises(LengthMismatchError):
        exact_prob(identity1, "01", "1")


def test_builder_mux_and_less_than():
    builder = CircuitBuilder(0, 3)
    coin = builder.less_than([builder.rand(0), builder.rand(1)], 3)
    out = builder.mux(coin, builder.const(False), builder.rand(2))
    fam = builder.build([out])
    # coin = 1 on 3 of 4 values, then the output is a fair bit
    assert fam.prob("", "1") == Fraction(3, 8)


def test_parity_prg_outputs_even_strings():
    dist = parity_prg(4).distribution("01")
    assert len(dist.support()) == 8
    assert all(x.count("1") % 2 == 0 for x in dist.support())


def test_shipped_fixtures_match_builders():
    for name, fam in fixture_families().items():
        shipped = load_fixture(name)
        for z in fam.parameters():
            assert shipped.distribution(z) == fam.distribution(z), name


def test_fixture_files_parse():
    assert (FIXTURE_DIR / "and_two.json").exists()
    assert load_fixture("and_two").prob("", "1") == Fraction(1, 4)


def test_large_coin_batches_match_direct_evaluation():
    fam = biased_family(4)
    coins = np.random.default_rng(4).integers(0, fam.coin_space, size=3 * fam.coin_space)
    for z in ("0000", "1011", "1111"):
        direct = fam.evaluate(int(z, 2), coins)
        assert np.array_equal(fam.outcome_ints(z, coins), direct)

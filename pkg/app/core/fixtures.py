"""
Built-in families, instances and generated corpora

The JSON files under app/fixtures/v1 are the shipped, versioned form of the
named families below; ``load_fixture`` reads them and the builders here produce
the same circuits programmatically.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from app.core import rng as lab_rng
from app.core.circuits import CircuitBuilder, CircuitFamily, compile_family
from app.core.distributions import Distribution
from app.core.exceptions import PreconditionError
from app.core.families import TableFamily
from app.core.instances import LearningInstance, parse_instance
from app.utils.bits import all_strings, from_int

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "v1"


# Families


def identity_family(k: int = 1) -> CircuitFamily:
    """D(z) is the point mass on z"""
    return CircuitBuilder(k, 0).build(range(k))


def and_family() -> CircuitFamily:
    """One output bit, the AND of two random bits: Pr[1] = 1/4"""
    builder = CircuitBuilder(0, 2)
    return builder.build([builder.and_(builder.rand(0), builder.rand(1))])


def biased_family(k: int, noise_bits: int = 2) -> CircuitFamily:
    """Each output bit is z_i flipped by the AND of ``noise_bits`` fresh random bits"""
    builder = CircuitBuilder(k, k * noise_bits)
    outputs = []
    for i in range(k):
        coins = [builder.rand(noise_bits * i + j) for j in range(noise_bits)]
        outputs.append(builder.xor_(builder.param(i), builder.and_(*coins)))
    return builder.build(outputs)


def uniform_family(k: int, m: int) -> CircuitFamily:
    """D(z) uniform over m bits for every z"""
    return CircuitBuilder(k, m).build(range(k, k + m))


def advice_bits(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def parity_prg(n: int = 4) -> CircuitFamily:
    """Gen(mu): uniform over n-bit strings of even parity, for every advice mu"""
    builder = CircuitBuilder(advice_bits(n), n - 1)
    free = [builder.rand(j) for j in range(n - 1)]
    return builder.build(free + [builder.xor_(*free)], role="prg")


def constant_prg(s: str) -> CircuitFamily:
    """Gen(mu) = s for every advice mu"""
    builder = CircuitBuilder(advice_bits(len(s)), 0)
    return builder.build([builder.const(bit == "1") for bit in s], role="prg")


def postselect_machine(x_bits: int, width: int, threshold: int) -> CircuitFamily:
    """b* = r0 OR r1 and b = [r_2..r_{width+1} < threshold], independent of x

    Pr[b* = 1] = 3/4 and Pr[b = 1 | b* = 1] = threshold / 2^width.
    """
    builder = CircuitBuilder(x_bits, 2 + width)
    bstar = builder.or_(builder.rand(0), builder.rand(1))
    b = builder.less_than([builder.rand(2 + j) for j in range(width)], threshold)
    return builder.build([b, bstar], role="postselect", b_wire=b, bstar_wire=bstar)


# Shipped files


def load_fixture(name: str) -> CircuitFamily:
    path = FIXTURE_DIR / f"{name}.json"
    if not path.exists():
        raise PreconditionError(f"unknown fixture family {name!r}")
    raw = json.loads(path.read_text())
    if "family" in raw:
        raise PreconditionError(f"fixture {name!r} is a learning instance, not a family")
    return compile_family(raw)


def load_fixture_instance(name: str) -> LearningInstance:
    path = FIXTURE_DIR / f"{name}.json"
    if not path.exists():
        raise PreconditionError(f"unknown fixture instance {name!r}")
    return parse_instance(json.loads(path.read_text()))


def _fixture_files() -> dict[str, dict]:
    return {path.stem: json.loads(path.read_text()) for path in sorted(FIXTURE_DIR.glob("*.json"))}


def family_fixture_names() -> list[str]:
    """Shipped circuit families; instance files carry a "family" key"""
    return [name for name, raw in _fixture_files().items() if "family" not in raw]


def instance_fixture_names() -> list[str]:
    return [name for name, raw in _fixture_files().items() if "family" in raw]


def fixture_families() -> dict[str, CircuitFamily]:
    """The named families every claim suite runs over (k <= 6)"""
    return {
        "identity_k1": identity_family(1),
        "point_mass_k3": identity_family(3),
        "biased_k1": biased_family(1),
        "biased_k4": biased_family(4),
        "uniform_k2": uniform_family(2, 2),
    }


@dataclass(frozen=True)
class AgnosticFixture:
    name: str
    family: CircuitFamily
    center: str
    noise: Fraction

    @property
    def target(self) -> Distribution:
        base = self.family.distribution(self.center)
        return base.mix(Distribution.uniform(self.family.out_bits), self.noise)


def agnostic_fixtures() -> list[AgnosticFixture]:
    """Family members mixed with at most 20% uniform noise"""
    return [
        AgnosticFixture("biased_k4", biased_family(4), "1011", Fraction(1, 10)),
        AgnosticFixture("point_mass_k3", identity_family(3), "101", Fraction(1, 5)),
        AgnosticFixture("biased_k1", biased_family(1), "1", Fraction(1, 10)),
        AgnosticFixture("biased_k3", biased_family(3), "011", Fraction(1, 20)),
        AgnosticFixture("biased_k2_light", biased_family(2, noise_bits=3), "10", Fraction(3, 20)),
    ]


# Random corpora


def random_distribution(rng: np.random.Generator, support_len: int, max_weight: int = 8) -> Distribution:
    """Random rational distribution; roughly a third of the outcomes get weight 0"""
    size = 1 << support_len
    while True:
        weights = rng.integers(0, max_weight + 1, size=size)
        weights[rng.random(size) < 0.3] = 0
        if weights.sum() > 0:
            break
    return Distribution.from_counts(
        {from_int(i, support_len): int(w) for i, w in enumerate(weights) if w}, support_len
    )


def random_full_distribution(rng: np.random.Generator, support_len: int, max_weight: int = 8) -> Distribution:
    weights = rng.integers(1, max_weight + 1, size=1 << support_len)
    return Distribution.from_counts(
        {from_int(i, support_len): int(w) for i, w in enumerate(weights)}, support_len
    )


def random_pairs(seed: int, count: int, max_support_len: int = 4) -> list[tuple[Distribution, Distribution]]:
    """Pairs over a common support of 1..max_support_len bits (at most 16 outcomes)"""
    gen = lab_rng.generator(seed)
    pairs = []
    for _ in range(count):
        support_len = int(gen.integers(1, max_support_len + 1))
        pairs.append((random_distribution(gen, support_len), random_distribution(gen, support_len)))
    return pairs


def random_table_family(seed: int, k: int, m: int, full_support: bool = False) -> TableFamily:
    gen = lab_rng.generator(seed)
    draw = random_full_distribution if full_support else random_distribution
    return TableFamily({z: draw(gen, m) for z in all_strings(k)}, k)

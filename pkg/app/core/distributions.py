"""
Exact discrete distributions over fixed-length bit strings

Probabilities are ``fractions.Fraction`` values; only positive entries are stored
and iteration is in lexicographic (MSB-first) order. Statistical distance is
exact; KL divergence is reported in bits as a float.
"""

import bisect
import itertools
import math
from collections import Counter
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import (
    LengthMismatchError,
    PreconditionError,
    SizeLimitError,
    SupportViolationError,
)
from app.utils.bits import all_strings, check_bits

ProbabilityLike = Fraction | int | str


class Distribution:
    """Immutable probability vector over ``support_len``-bit strings"""

    __slots__ = ("support_len", "_probs")

    def __init__(self, probs: Mapping[str, ProbabilityLike], support_len: int | None = None):
        if support_len is None:
            if not probs:
                raise PreconditionError("cannot infer support_len of an empty distribution")
            support_len = len(next(iter(probs)))
        entries: dict[str, Fraction] = {}
        for outcome, value in probs.items():
            check_bits(outcome, support_len, "outcome")
            p = Fraction(value)
            if p < 0:
                raise PreconditionError(f"negative probability {p} for outcome {outcome}")
            if p:
                entries[outcome] = entries.get(outcome, Fraction(0)) + p
        total = sum(entries.values(), Fraction(0))
        if total != 1:
            raise PreconditionError(f"probabilities sum to {total}, not 1")
        self.support_len = support_len
        self._probs = dict(sorted(entries.items()))

    # Constructors

    @classmethod
    def point_mass(cls, outcome: str) -> "Distribution":
        return cls({outcome: 1}, len(outcome))

    @classmethod
    def uniform(cls, support_len: int) -> "Distribution":
        weight = Fraction(1, 1 << support_len)
        return cls({x: weight for x in all_strings(support_len)}, support_len)

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], support_len: int | None = None) -> "Distribution":
        total = sum(counts.values())
        if total <= 0:
            raise PreconditionError("counts must contain at least one observation")
        return cls({x: Fraction(c, total) for x, c in counts.items()}, support_len)

    @classmethod
    def empirical(cls, samples: Sequence[str]) -> "Distribution":
        """Empirical distribution of an ordered sample list"""
        if not samples:
            raise PreconditionError("empirical distribution of zero samples")
        return cls.from_counts(Counter(samples), len(samples[0]))

    # Access

    def prob(self, outcome: str) -> Fraction:
        check_bits(outcome, self.support_len, "outcome")
        return self._probs.get(outcome, Fraction(0))

    def items(self) -> Iterator[tuple[str, Fraction]]:
        return iter(self._probs.items())

    def support(self) -> tuple[str, ...]:
        return tuple(self._probs)

    def is_full_support(self) -> bool:
        return len(self._probs) == 1 << self.support_len

    def mix(self, other: "Distribution", weight: ProbabilityLike) -> "Distribution":
        """(1 - weight) * self + weight * other"""
        _check_same_support(self, other)
        w = Fraction(weight)
        if not 0 <= w <= 1:
            raise PreconditionError(f"mixture weight {w} outside [0, 1]")
        keys = set(self._probs) | set(other._probs)
        return Distribution(
            {x: (1 - w) * self.prob(x) + w * other.prob(x) for x in keys}, self.support_len
        )

    def to_json(self) -> dict:
        return {
            "support_len": self.support_len,
            "probs": {x: str(p) for x, p in self._probs.items()},
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.support_len == other.support_len and self._probs == other._probs

    def __hash__(self) -> int:
        return hash((self.support_len, tuple(self._probs.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{x}:{p}" for x, p in self._probs.items())
        return f"Distribution({{{body}}})"


def _check_same_support(p: Distribution, q: Distribution) -> None:
    if p.support_len != q.support_len:
        raise LengthMismatchError(
            f"distributions over {p.support_len}-bit and {q.support_len}-bit outcomes"
        )


def statistical_distance(p: Distribution, q: Distribution) -> Fraction:
    """Half the l1 distance, computed exactly"""
    _check_same_support(p, q)
    keys = set(p.support()) | set(q.support())
    return sum((abs(p.prob(x) - q.prob(x)) for x in keys), Fraction(0)) / 2


def likelihood_test_advantage(p: Distribution, q: Distribution) -> Fraction:
    """Distinguishing advantage of the test "P(x) > Q(x)": sum of P(x) - Q(x) over that set"""
    _check_same_support(p, q)
    return sum((px - q.prob(x) for x, px in p.items() if px > q.prob(x)), Fraction(0))


def likelihood_test_mass(p: Distribution, q: Distribution) -> Fraction:
    """Pr over x drawn from P that P(x) > Q(x)"""
    _check_same_support(p, q)
    return sum((px for x, px in p.items() if px > q.prob(x)), Fraction(0))


def log2_fraction(value: Fraction) -> float:
    """log2 of a positive rational without underflow"""
    return math.log2(value.numerator) - math.log2(value.denominator)


def kl_divergence(p: Distribution, q: Distribution) -> float:
    """D_KL(P || Q) in bits"""
    _check_same_support(p, q)
    terms = []
    for x, px in p.items():
        qx = q.prob(x)
        if qx == 0:
            raise SupportViolationError(f"Q(x) = 0 where P(x) = {px} for x = {x}")
        terms.append(float(px) * log2_fraction(px / qx))
    return max(0.0, math.fsum(terms))


def tensor_power(p: Distribution, t: int) -> Distribution:
    """Product distribution of t independent copies; outcomes are concatenations"""
    if t < 1:
        raise PreconditionError("tensor power needs t >= 1")
    if p.support_len * t > settings.MAX_TUPLE_BITS:
        raise SizeLimitError(
            f"{t}-fold tuples of {p.support_len}-bit outcomes exceed {settings.MAX_TUPLE_BITS} bits"
        )
    entries = list(p.items())
    probs: dict[str, Fraction] = {}
    for combo in itertools.product(entries, repeat=t):
        outcome = "".join(x for x, _ in combo)
        probs[outcome] = math.prod((px for _, px in combo), start=Fraction(1))
    return Distribution(probs, p.support_len * t)


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def multinomial(counts: Iterable[int]) -> int:
    result, running = 1, 0
    for c in counts:
        running += c
        result *= math.comb(running, c)
    return result


def tensor_sd(p: Distribution, q: Distribution, t: int) -> Fraction:
    """SD(P^t, Q^t) exactly, summed over count types instead of individual tuples"""
    _check_same_support(p, q)
    if t < 1:
        raise PreconditionError("tensor power needs t >= 1")
    if p.support_len * t > settings.MAX_TUPLE_BITS:
        raise SizeLimitError(
            f"{t}-fold tuples of {p.support_len}-bit outcomes exceed {settings.MAX_TUPLE_BITS} bits"
        )
    keys = sorted(set(p.support()) | set(q.support()))
    ps = [p.prob(x) for x in keys]
    qs = [q.prob(x) for x in keys]
    total = Fraction(0)
    for counts in compositions(t, len(keys)):
        pp = math.prod((a**c for a, c in zip(ps, counts) if c), start=Fraction(1))
        qq = math.prod((b**c for b, c in zip(qs, counts) if c), start=Fraction(1))
        if pp != qq:
            total += multinomial(counts) * abs(pp - qq)
    return total / 2


def sample_distribution(p: Distribution, n: int, rng: np.random.Generator) -> list[str]:
    """n exact draws by integer inverse-CDF sampling"""
    if n < 1:
        raise PreconditionError("sample count must be >= 1")
    outcomes = p.support()
    denominator = math.lcm(*(px.denominator for _, px in p.items()))
    cumulative = list(itertools.accumulate(int(px * denominator) for _, px in p.items()))
    if denominator < (1 << 62):
        u = rng.integers(0, denominator, size=n, dtype=np.int64)
        index = np.searchsorted(np.asarray(cumulative, dtype=np.int64), u, side="right")
        return [outcomes[i] for i in index]
    # Big common denominators: rejection sampling over 32-bit words
    words = -(-denominator.bit_length() // 32)
    draws = []
    while len(draws) < n:
        value = 0
        for word in rng.integers(0, 1 << 32, size=words, dtype=np.uint64):
            value = (value << 32) | int(word)
        value >>= words * 32 - denominator.bit_length()
        if value < denominator:
            draws.append(outcomes[bisect.bisect_right(cumulative, value)])
    return draws

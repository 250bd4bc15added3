"""
Parameterized distribution families

A family maps a ``param_bits``-bit parameter z to a distribution D(z) over
``out_bits``-bit outcomes. Circuit families, explicit tables and repeated
families all share this interface so the estimators, MLE and learners never need
to know how D is realized.
"""

import functools
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from app.core.config import settings
from app.core.distributions import Distribution
from app.core.exceptions import LengthMismatchError, PreconditionError, SizeLimitError
from app.utils.bits import all_strings, check_bits, from_int, to_int


class DistributionFamily(ABC):
    """Base class: exact per-parameter distributions plus sampling"""

    param_bits: int
    out_bits: int

    def __init__(self, param_bits: int, out_bits: int):
        self.param_bits = param_bits
        self.out_bits = out_bits
        self._dist_cache: dict[str, Distribution] = {}

    @abstractmethod
    def _compute_distribution(self, z: str) -> Distribution:
        """Exact D(z); z is already validated"""

    @property
    @abstractmethod
    def coin_space(self) -> int:
        """Number of equally likely coin values one draw consumes"""

    @abstractmethod
    def outcome_ints(self, z: str, coins: np.ndarray) -> np.ndarray:
        """Packed outcomes D(z; c) for an array of coins c in [0, coin_space)"""

    def draw_coins(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.coin_space >= 1 << 62:
            raise SizeLimitError("coin space of this family exceeds 62 bits")
        return rng.integers(0, self.coin_space, size=n, dtype=np.int64)

    def sample(self, z: str, n: int, rng: np.random.Generator) -> list[str]:
        """n independent draws from D(z)"""
        check_bits(z, self.param_bits, "parameter")
        return [from_int(int(v), self.out_bits) for v in self.outcome_ints(z, self.draw_coins(n, rng))]

    def distribution(self, z: str) -> Distribution:
        check_bits(z, self.param_bits, "parameter")
        cached = self._dist_cache.get(z)
        if cached is None:
            cached = self._compute_distribution(z)
            self._dist_cache[z] = cached
        return cached

    def prob(self, z: str, x: str) -> Fraction:
        check_bits(x, self.out_bits, "outcome")
        return self.distribution(z).prob(x)

    def parameters(self) -> Iterator[str]:
        """All parameters in lexicographic order"""
        if self.param_bits > settings.MAX_PARAM_BITS:
            raise SizeLimitError(
                f"{self.param_bits} parameter bits exceed the enumeration cap {settings.MAX_PARAM_BITS}"
            )
        return all_strings(self.param_bits)

    def is_fully_supported(self) -> bool:
        """Every outcome has positive probability under every parameter"""
        return all(self.distribution(z).is_full_support() for z in self.parameters())

    def count_matrix(self, outcomes: list[str]) -> tuple[np.ndarray, int]:
        """Integer numerators of Pr[x <- D(a)] for every a (rows) and listed x (columns)

        Returns the matrix and the common denominator.
        """
        dists = [self.distribution(a) for a in self.parameters()]
        denominator = 1
        for dist in dists:
            for x in outcomes:
                denominator = math.lcm(denominator, dist.prob(x).denominator)
        if denominator >= 1 << 62:
            raise SizeLimitError("common probability denominator exceeds 62 bits")
        counts = np.zeros((len(dists), len(outcomes)), dtype=np.int64)
        for row, dist in enumerate(dists):
            for col, x in enumerate(outcomes):
                p = dist.prob(x)
                counts[row, col] = p.numerator * (denominator // p.denominator)
        return counts, denominator

    def describe(self) -> dict:
        return {"kind": type(self).__name__, "param_bits": self.param_bits, "out_bits": self.out_bits}


class TableFamily(DistributionFamily):
    """Family given by an explicit distribution for every parameter"""

    def __init__(self, table: Mapping[str, Distribution], param_bits: int | None = None):
        if not table:
            raise PreconditionError("table family needs at least one parameter")
        if param_bits is None:
            param_bits = len(next(iter(table)))
        out_bits = next(iter(table.values())).support_len
        super().__init__(param_bits, out_bits)
        missing = [z for z in all_strings(param_bits) if z not in table]
        if missing:
            raise PreconditionError(f"table family is missing parameters {missing[:4]}")
        for z, dist in table.items():
            check_bits(z, param_bits, "parameter")
            if dist.support_len != out_bits:
                raise LengthMismatchError(f"D({z}) has {dist.support_len}-bit outcomes, expected {out_bits}")
        self._table = dict(table)

    def _compute_distribution(self, z: str) -> Distribution:
        return self._table[z]

    @functools.cached_property
    def coin_space(self) -> int:
        return math.lcm(*(p.denominator for dist in self._table.values() for _, p in dist.items()))

    @functools.cache
    def _cumulative(self, z: str) -> tuple[np.ndarray, np.ndarray]:
        dist = self.distribution(z)
        outcomes = np.array([to_int(x) for x in dist.support()], dtype=np.int64)
        weights = [int(p * self.coin_space) for _, p in dist.items()]
        return outcomes, np.cumsum(np.array(weights, dtype=np.int64))

    def outcome_ints(self, z: str, coins: np.ndarray) -> np.ndarray:
        outcomes, cumulative = self._cumulative(z)
        return outcomes[np.searchsorted(cumulative, coins, side="right")]

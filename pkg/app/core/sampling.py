"""
Sample sets and seeded draws
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from app.core import rng as lab_rng
from app.core.exceptions import LengthMismatchError, PreconditionError
from app.core.families import DistributionFamily
from app.utils.bits import check_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleSet:
    """Ordered draws plus the seed that produced them

    ``origin`` is the parameter the samples were drawn from, when known. Only
    test learners that deliberately cheat look at it.
    """

    samples: tuple[str, ...]
    seed: int
    origin: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise PreconditionError("a sample set needs at least one sample")
        width = len(self.samples[0])
        for x in set(self.samples):
            check_bits(x, width, "sample")

    @property
    def t(self) -> int:
        return len(self.samples)

    @property
    def width(self) -> int:
        return len(self.samples[0])

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def check_width(self, out_bits: int) -> None:
        if self.width != out_bits:
            raise LengthMismatchError(f"samples have {self.width} bits, family outputs {out_bits}")


def draw_samples(fam: DistributionFamily, z: str, t: int, seed: int) -> SampleSet:
    """t i.i.d. draws from D(z); identical for identical (fam, z, t, seed)"""
    if t < 1:
        raise PreconditionError("sample count t must be >= 1")
    check_bits(z, fam.param_bits, "parameter")
    samples = fam.sample(z, t, lab_rng.generator(seed))
    return SampleSet(tuple(samples), lab_rng.normalize_seed(seed), origin=z)


def from_list(samples: Sequence[str], seed: int = 0) -> SampleSet:
    return SampleSet(tuple(samples), seed)


def read_samples(path: str | Path, seed: int = 0) -> SampleSet:
    """Newline-delimited bit strings; blank lines are ignored"""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise PreconditionError(f"cannot read sample file {path}: {e.strerror}") from e
    lines = [line.strip() for line in text.splitlines()]
    samples = [line for line in lines if line]
    logger.info("Read %d samples from %s", len(samples), path)
    return SampleSet(tuple(samples), seed)


def write_samples(sample_set: SampleSet, path: str | Path) -> None:
    Path(path).write_text("\n".join(sample_set.samples) + "\n")

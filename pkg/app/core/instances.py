"""
Learning instances: parameter sampler S, family D and learning parameters
"""

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import ValidationError

from app.core.circuits import CircuitFamily, compile_family
from app.core.distributions import Distribution, sample_distribution
from app.core.exceptions import CircuitError, LengthMismatchError, PreconditionError
from app.core.families import DistributionFamily
from app.models.circuit import CircuitSpec
from app.models.instance import DistributionSpec, InstanceSpec
from app.models.params import LearnParams

logger = logging.getLogger(__name__)


def distribution_from_spec(spec: DistributionSpec) -> Distribution:
    return Distribution(dict(spec.probs), spec.support_len)


def distribution_to_spec(dist: Distribution) -> DistributionSpec:
    return DistributionSpec(support_len=dist.support_len, probs=dict(dist.items()))


class LearningInstance:
    """S samples a parameter z, D(z) produces samples, params fix eps/delta/t"""

    def __init__(
        self,
        sampler: Distribution | CircuitFamily,
        family: DistributionFamily,
        params: LearnParams,
        target: Optional[Distribution] = None,
    ):
        if isinstance(sampler, CircuitFamily):
            if sampler.param_bits != 0:
                raise PreconditionError("a circuit sampler takes no parameter bits")
            width = sampler.out_bits
        else:
            width = sampler.support_len
        if width != family.param_bits:
            raise LengthMismatchError(
                f"sampler emits {width}-bit parameters, family expects {family.param_bits}"
            )
        if target is not None and target.support_len != family.out_bits:
            raise LengthMismatchError(
                f"target has {target.support_len}-bit outcomes, family outputs {family.out_bits}"
            )
        self.sampler = sampler
        self.family = family
        self.params = params
        self.target = target

    @property
    def eps(self) -> int:
        return self.params.eps

    @property
    def delta(self) -> int:
        return self.params.delta

    @property
    def t(self) -> int:
        return self.params.t

    def sampler_distribution(self) -> Distribution:
        if isinstance(self.sampler, CircuitFamily):
            return self.sampler.distribution("")
        return self.sampler

    def draw_parameter(self, rng: np.random.Generator) -> str:
        if isinstance(self.sampler, CircuitFamily):
            return self.sampler.sample("", 1, rng)[0]
        return sample_distribution(self.sampler, 1, rng)[0]

    def with_params(self, **changes) -> "LearningInstance":
        params = self.params.model_copy(update=changes)
        return LearningInstance(self.sampler, self.family, params, self.target)

    @classmethod
    def from_spec(cls, spec: InstanceSpec) -> "LearningInstance":
        if isinstance(spec.sampler, CircuitSpec):
            sampler = compile_family(spec.sampler)
        else:
            sampler = distribution_from_spec(spec.sampler)
        target = distribution_from_spec(spec.target) if spec.target is not None else None
        return cls(sampler, compile_family(spec.family), spec.params, target)

    def describe(self) -> dict:
        return {
            "family": self.family.describe(),
            "params": self.params.model_dump(),
            "has_target": self.target is not None,
        }


def parse_instance(data: str | dict) -> LearningInstance:
    try:
        raw = json.loads(data) if isinstance(data, str) else data
        spec = InstanceSpec.model_validate(raw)
    except json.JSONDecodeError as e:
        raise CircuitError(f"instance JSON does not parse: {e}") from e
    except ValidationError as e:
        first = e.errors()[0]
        raise CircuitError(f"invalid instance: {first['msg']} at {first['loc']}") from e
    return LearningInstance.from_spec(spec)


def load_instance(path: str | Path) -> LearningInstance:
    logger.info("Loading instance %s", path)
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise PreconditionError(f"cannot read instance file {path}: {e.strerror}") from e
    return parse_instance(text)

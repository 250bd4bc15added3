"""
Learning instance JSON schema
"""

from typing import Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from app.models.circuit import CircuitSpec
from app.models.common import Rational
from app.models.params import LearnParams


class DistributionSpec(BaseModel):
    """Explicit distribution: outcome bit string -> probability ("p/q")"""
    model_config = ConfigDict(frozen=True)

    support_len: int = Field(..., ge=0)
    probs: Dict[str, Rational]


class InstanceSpec(BaseModel):
    """Sampler S over parameters, family D and learning parameters

    The sampler is either an explicit distribution over parameters or a circuit
    with no parameter bits whose output is the parameter. ``target`` optionally
    replaces D(z) as the sample source for agnostic experiments.
    """
    model_config = ConfigDict(frozen=True)

    sampler: Union[CircuitSpec, DistributionSpec]
    family: CircuitSpec
    params: LearnParams
    target: Optional[DistributionSpec] = None

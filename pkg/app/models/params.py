"""
Learning parameters
"""

from pydantic import BaseModel, ConfigDict, Field


class LearnParams(BaseModel):
    """Precision 1/eps, confidence 1/delta and sample count t"""
    model_config = ConfigDict(frozen=True)

    eps: int = Field(..., ge=1)
    delta: int = Field(..., ge=1)
    t: int = Field(..., ge=1)

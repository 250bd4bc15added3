"""
Circuit JSON schema
"""

from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class GateOp(str, Enum):
    """Gate operations"""
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    XOR = "XOR"


class GateSpec(BaseModel):
    """One gate; its output wire id is param_bits + rand_bits + gate index"""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    op: GateOp
    inputs: List[int] = Field(..., alias="in", min_length=1)


class CircuitSpec(BaseModel):
    """Circuit JSON as shipped in fixture files and accepted by the API"""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    param_bits: int = Field(..., ge=0)
    rand_bits: int = Field(..., ge=0)
    out_bits: int = Field(..., ge=1)
    gates: List[GateSpec] = Field(default_factory=list)
    outputs: List[int]

    # Role annotations for reductions
    role: Optional[Literal["family", "prg", "postselect"]] = None
    b_wire: Optional[int] = None
    bstar_wire: Optional[int] = None


class FamilySummary(BaseModel):
    """Response model describing a compiled family"""
    param_bits: int
    rand_bits: int
    out_bits: int
    gate_count: int
    role: Optional[str] = None
    distribution: Optional[dict] = None

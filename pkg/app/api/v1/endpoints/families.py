"""
Circuit family endpoints
"""

from typing import Any, Dict, List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.core.circuits import compile_family, exact_prob
from app.core.exceptions import LabError
from app.core.fixtures import (
    family_fixture_names,
    instance_fixture_names,
    load_fixture,
    load_fixture_instance,
)
from app.models.circuit import CircuitSpec, FamilySummary
from app.models.common import Rational

router = APIRouter()


class CompileRequest(BaseModel):
    """Circuit to validate, optionally with a parameter to expand"""
    circuit: CircuitSpec
    param: Optional[str] = Field(None, description="Return the exact distribution D(param)")


class ProbabilityRequest(BaseModel):
    circuit: CircuitSpec
    param: str
    outcome: str


class ProbabilityResponse(BaseModel):
    param: str
    outcome: str
    probability: Rational


@router.get("/fixtures", response_model=List[str])
def list_fixtures():
    """Names of the shipped circuit families"""
    return family_fixture_names()


@router.get("/fixtures/{name}", response_model=FamilySummary)
def get_fixture(name: str, param: Optional[str] = None):
    try:
        return load_fixture(name).summary(param)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)


@router.get("/instances", response_model=List[str])
def list_instances():
    """Names of the shipped learning instances"""
    return instance_fixture_names()


@router.get("/instances/{name}", response_model=Dict[str, Any])
def get_instance(name: str):
    try:
        return load_fixture_instance(name).describe()
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)


@router.post("/compile", response_model=FamilySummary)
def compile_circuit(request: CompileRequest):
    """Validate a circuit and summarize the family it defines"""
    try:
        return compile_family(request.circuit).summary(request.param)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)


@router.post("/probability", response_model=ProbabilityResponse)
def probability(request: ProbabilityRequest):
    """Pr[outcome <- D(param)], exactly"""
    try:
        value = exact_prob(compile_family(request.circuit), request.param, request.outcome)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)
    return ProbabilityResponse(param=request.param, outcome=request.outcome, probability=value)

"""
Learning and puzzle experiment endpoints

Request bodies carry the instance inline; the runners are the ones the CLI uses.
"""

from typing import List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.exceptions import LabError
from app.core.instances import LearningInstance
from app.core.sampling import SampleSet
from app.models.instance import InstanceSpec
from app.models.reports import RunReport
from app.models.run_config import LearnMode, RunConfig
from app.services import runs
from app.services.owpuzz import owp_samp, owp_vrfy

router = APIRouter()


class LearnRequest(BaseModel):
    instance: InstanceSpec
    samples: Optional[List[str]] = Field(None, description="Drawn from the instance when omitted")
    mode: LearnMode = LearnMode.SD
    learner: str = "agnostic"
    eps: Optional[int] = Field(None, ge=1)
    delta: Optional[int] = Field(None, ge=1)
    t: Optional[int] = Field(None, ge=1)
    trials: Optional[int] = Field(None, ge=1)
    rounds: Optional[int] = Field(None, ge=1)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)


class OwpuzzRequest(BaseModel):
    instance: InstanceSpec
    param: Optional[str] = None
    eps: Optional[int] = Field(None, ge=1)
    delta: Optional[int] = Field(None, ge=1)
    t: Optional[int] = Field(None, ge=1)
    trials: Optional[int] = Field(None, ge=1)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)


class PuzzleRequest(BaseModel):
    instance: InstanceSpec
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)


class PuzzleResponse(BaseModel):
    puzzle: List[str]
    answer: str


class VerifyPuzzleRequest(BaseModel):
    instance: InstanceSpec
    puzzle: List[str]
    answer: str


class VerifyPuzzleResponse(BaseModel):
    accepted: bool


def _config(subcommand: str, request: BaseModel) -> RunConfig:
    fields = request.model_dump(exclude={"instance", "samples"}, exclude_none=True)
    return RunConfig(subcommand=subcommand, **fields)


@router.post("/learn", response_model=RunReport)
def learn(request: LearnRequest):
    """Run a learner (sd, kl, mle) or the proper-learning benchmark"""
    try:
        inst = LearningInstance.from_spec(request.instance)
        samples = SampleSet(tuple(request.samples), request.seed) if request.samples else None
        return runs.execute_learn(_config("learn", request), inst=inst, samples=samples)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)


@router.post("/owpuzz", response_model=RunReport)
def owpuzz(request: OwpuzzRequest):
    """Completeness rate and optimal attack for the puzzle of an instance"""
    try:
        return runs.execute_owpuzz(_config("owpuzz", request), LearningInstance.from_spec(request.instance))
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)


@router.post("/owpuzz/sample", response_model=PuzzleResponse)
def sample_puzzle(request: PuzzleRequest):
    try:
        puzzle = owp_samp(LearningInstance.from_spec(request.instance), request.seed)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)
    return PuzzleResponse(puzzle=list(puzzle.puzz.samples), answer=puzzle.ans)


@router.post("/owpuzz/verify", response_model=VerifyPuzzleResponse)
def verify_puzzle(request: VerifyPuzzleRequest):
    try:
        inst = LearningInstance.from_spec(request.instance)
        accepted = owp_vrfy(inst, SampleSet(tuple(request.puzzle), 0), request.answer)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)
    return VerifyPuzzleResponse(accepted=accepted)

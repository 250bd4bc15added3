"""
Claim suite endpoints
"""

from typing import List, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from app.core.exceptions import LabError
from app.models.reports import SuiteReport
from app.services.claims import CLAIM_IDS, run_suite

router = APIRouter()


class VerifyRequest(BaseModel):
    claims: List[str] = Field(default_factory=list, description="Claim ids; all when empty")
    seed: Optional[int] = None
    scale: float = Field(1.0, gt=0, le=1)
    reps: Optional[int] = Field(None, ge=1)


@router.get("/", response_model=List[str])
def list_claims():
    return list(CLAIM_IDS)


@router.post("/verify", response_model=SuiteReport)
def verify(request: VerifyRequest):
    """Run the selected claims; failures are reported, not raised"""
    try:
        return run_suite(request.claims or None, request.seed, request.scale, reps=request.reps)
    except LabError as e:
        raise HTTPException(status_code=e.status_code, detail=e.detail)

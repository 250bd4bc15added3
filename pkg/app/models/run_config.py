"""
Resolved run configuration for the CLI
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field

from app.core.config import settings


class LearnMode(str, Enum):
    SD = "sd"
    KL = "kl"
    PROPER = "proper"
    MLE = "mle"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """Everything a run depends on; embedded verbatim in its report"""

    subcommand: str
    family: Optional[str] = None
    instance: Optional[str] = None
    samples: Optional[str] = None
    param: Optional[str] = None
    eps: Optional[int] = Field(None, ge=1)
    delta: Optional[int] = Field(None, ge=1)
    t: Optional[int] = Field(None, ge=1)
    trials: Optional[int] = Field(None, ge=1)
    reps: Optional[int] = Field(None, ge=1)
    rounds: Optional[int] = Field(None, ge=1)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    mode: LearnMode = LearnMode.SD
    learner: str = "agnostic"
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.JSON
    claim: List[str] = Field(default_factory=list)
    scale: float = Field(1.0, gt=0, le=1)

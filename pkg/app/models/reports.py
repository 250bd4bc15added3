"""
Report models written by the CLI and returned by the API

Every report is plain data: no timestamps, so identical runs serialize to
identical bytes.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.common import Rational


class StageTrace(BaseModel):
    """One output bit of the bit-by-bit learner"""
    index: int
    bit: str
    rounds_used: int
    threshold: Rational
    exhausted: bool = False


class LearnReport(BaseModel):
    """Agnostic SD learner outcome, checked exactly after the fact"""
    hypothesis: str
    achieved_sd: Rational
    opt: Rational
    bound: Rational = Field(..., description="(3 + 1/eps) * opt + 1/eps")
    within_bound: bool
    eps: int
    delta: int
    t: int
    rounds: int
    mode: str
    target_known: bool = True
    trace: List[StageTrace] = Field(default_factory=list)


class KlReport(BaseModel):
    """KL learner outcome against a known target"""
    hypothesis: str
    kl: float
    opt: float
    bound: float
    within_bound: bool
    eps: int
    t: int


class RateEstimate(BaseModel):
    """Monte Carlo success rate with a Wilson interval"""
    successes: int
    trials: int
    rate: float
    lower: float
    upper: float
    claimed: Optional[float] = None
    consistent: Optional[bool] = None


class AttackReport(BaseModel):
    """Optimal unbounded adversary against a puzzle instance"""
    success: Rational
    map_recovery: Rational
    exact: bool
    t: int
    puzzles: int = Field(..., description="multisets enumerated, or trials when not exact")


class OwpuzzReport(BaseModel):
    t: int
    eps: int
    completeness: RateEstimate
    best_attack: AttackReport
    useful: Optional[Rational] = None


class BoundReport(BaseModel):
    """Predicted bound against an observed value"""
    claim: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    predicted: float
    observed: Rational
    holds: bool
    vacuous: bool = False


class Verdict(str, Enum):
    IN_LANGUAGE = "in_language"
    NOT_IN_LANGUAGE = "not_in_language"
    PROMISE_VIOLATION = "promise_violation"


class DecisionReport(BaseModel):
    """MLE decision on the postselection gadget

    ``ratio`` is Pr[x <- M*(x,1)] / Pr[x <- M*(x,0)]; None stands for +infinity.
    """
    verdict: Verdict
    mle_flag: str
    ratio: Optional[Rational] = None
    conditional: Rational


class ClaimResult(BaseModel):
    claim: str
    passed: bool
    checked: int = 0
    failures: int = 0
    detail: str = ""
    rate: Optional[RateEstimate] = None


class SuiteReport(BaseModel):
    version: str
    config: Dict[str, Any]
    passed: bool
    claims: List[ClaimResult]


class RunReport(BaseModel):
    """Envelope for single-command reports"""
    version: str
    command: str
    config: Dict[str, Any]
    passed: bool
    result: Dict[str, Any]

"""
Pydantic models for every record the verifier emits.

Each record carries `record_type` (the discriminator used by the reader) and
the schema version it was written with.
"""

from enum import Enum
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, Field, model_validator

from src.core.config import RECORD_SCHEMA_VERSION
from src.provers.symbols import QuerySymbol

Probability = Annotated[float, Field(ge=0.0, le=1.0)]
Sign = Literal[1, -1]


class Branch(str, Enum):
    TEST = "TEST"
    CALCULATE = "CALCULATE"


class Decision(str, Enum):
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


class QueryEvent(BaseModel):
    """One query and the prover's response."""
    vertex: int
    symbol: QuerySymbol
    outcome: Sign


class TrialRecord(BaseModel):
    """One INTERACTIVEPROOF trial."""
    record_type: Literal["trial"] = "trial"
    schema_version: str = RECORD_SCHEMA_VERSION
    index: int = Field(default=0, ge=0)
    seed: Optional[int] = None
    branch: Branch
    setting_index: Optional[int] = None
    setting: Optional[str] = None
    family: Optional[str] = None
    pattern: Optional[str] = None
    transcript: list[QueryEvent]
    combined_outcome: Sign
    accept: bool

    @model_validator(mode="after")
    def _branch_rule(self) -> "TrialRecord":
        if self.branch is Branch.TEST:
            if self.setting_index is None:
                raise ValueError("TEST records must name the chosen setting")
            if self.accept != (self.combined_outcome == 1):
                raise ValueError("TEST accepts exactly when the combined outcome is +1")
        elif self.pattern is None:
            raise ValueError("CALCULATE records must name the pattern")
        return self


class FamilyAcceptance(BaseModel):
    """Acceptance of TEST trials that drew a setting from one family."""
    family: str
    trials: int = Field(ge=0)
    accepted: int = Field(ge=0)
    rate: Optional[Probability] = None
    ci_low: Optional[Probability] = None
    ci_high: Optional[Probability] = None

    @model_validator(mode="after")
    def _ci_contains_rate(self) -> "FamilyAcceptance":
        if self.accepted > self.trials:
            raise ValueError("accepted exceeds trials")
        if self.rate is not None:
            if self.ci_low is None or self.ci_high is None:
                raise ValueError("a rate needs its confidence interval")
            if not self.ci_low <= self.rate <= self.ci_high:
                raise ValueError("confidence interval must contain the point estimate")
        return self


class RunSummary(BaseModel):
    """Aggregate of one amplified run."""
    record_type: Literal["summary"] = "summary"
    schema_version: str = RECORD_SCHEMA_VERSION
    config: dict[str, Any]
    master_seed: int
    trials: int = Field(ge=1)
    accepted: int = Field(ge=0)
    branch_counts: dict[Branch, int]
    branch_accepted: dict[Branch, int]
    families: list[FamilyAcceptance]
    acceptance: Probability
    ci_low: Probability
    ci_high: Probability
    threshold: float
    threshold_rule: str
    c_ip: Probability
    s_ip: Probability
    decision: Decision
    wall_time_s: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _consistent(self) -> "RunSummary":
        if sum(self.branch_counts.values()) != self.trials:
            raise ValueError("branch counts must sum to the trial count")
        if sum(self.branch_accepted.values()) != self.accepted:
            raise ValueError("branch accept counts must sum to the accept count")
        if not self.ci_low <= self.acceptance <= self.ci_high:
            raise ValueError("confidence interval must contain the point estimate")
        expected = Decision.ACCEPT if self.accepted > self.threshold else Decision.REJECT
        if self.decision is not expected:
            raise ValueError("decision must be ACCEPT exactly when accepted > threshold")
        return self


class SettingDeviation(BaseModel):
    setting: str
    family: str
    honest_expectation: float
    measured: float
    deviation: float = Field(ge=0.0)
    std_error: Optional[float] = None
    within_tolerance: bool


class DResidual(BaseModel):
    vertex: int
    plus: float = Field(ge=0.0)
    minus: float = Field(ge=0.0)


class DerivationRecord(BaseModel):
    triangle: tuple[int, int, int]
    pivot: int
    omitted: Optional[int] = None
    conclusive: bool
    residual: Optional[float] = Field(default=None, ge=0.0)
    reason: str = ""


class LogicalActionRecord(BaseModel):
    vertex: int
    symbol: QuerySymbol
    fidelity: Probability


class AuditReport(BaseModel):
    """Self-test audit of one strategy on one graph."""
    record_type: Literal["audit"] = "audit"
    schema_version: str = RECORD_SCHEMA_VERSION
    strategy: str
    graph: str = ""
    mode: Literal["exact", "statistical"] = "exact"
    tolerance: float
    applicable: bool = True
    inapplicable_reason: Optional[str] = None
    settings: list[SettingDeviation] = Field(default_factory=list)
    max_deviation: float = Field(default=0.0, ge=0.0)
    anticommutation: dict[int, float] = Field(default_factory=dict)
    d_residuals: list[DResidual] = Field(default_factory=list)
    derivations: list[DerivationRecord] = Field(default_factory=list)
    extraction_fidelity: Optional[Probability] = None
    logical_action: list[LogicalActionRecord] = Field(default_factory=list)
    passed: bool = False

    @model_validator(mode="after")
    def _non_negative(self) -> "AuditReport":
        if any(r < 0 for r in self.anticommutation.values()):
            raise ValueError("residuals must be non-negative")
        return self


class WitnessEntry(BaseModel):
    vertex: int
    symbol: QuerySymbol
    value: Sign


class OracleReport(BaseModel):
    """Best deterministic classical strategy against the TEST family."""
    record_type: Literal["oracle"] = "oracle"
    schema_version: str = RECORD_SCHEMA_VERSION
    graph: str
    settings: int
    accepted_settings: int
    classical_optimum: Probability
    honest_test_acceptance: Probability
    gap: float
    witness: list[WitnessEntry]


class SweepRecord(BaseModel):
    """One cell of a (q, strategy) acceptance sweep."""
    record_type: Literal["sweep"] = "sweep"
    schema_version: str = RECORD_SCHEMA_VERSION
    q: Probability
    strategy: str
    kind: str
    eps: Optional[float] = None
    theta: Optional[float] = None
    trials: int = Field(ge=1)
    accepted: int = Field(ge=0)
    acceptance: Probability
    ci_low: Probability
    ci_high: Probability
    exact_test_acceptance: Probability
    honest_acceptance: Probability
    gap: float


Record = Annotated[
    Union[TrialRecord, RunSummary, AuditReport, OracleReport, SweepRecord],
    Field(discriminator="record_type"),
]

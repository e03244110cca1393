"""
Pydantic models for spec files and emitted records.

Centralizes all data validation schemas used across the application.
"""

from src.models.records import (
    AuditReport,
    Branch,
    Decision,
    FamilyAcceptance,
    OracleReport,
    QueryEvent,
    Record,
    RunSummary,
    SweepRecord,
    TrialRecord,
)
from src.models.specs import (
    GraphSpec,
    PatternFileSpec,
    ProtocolConfig,
    StrategySpec,
    SweepConfig,
)

__all__ = [
    "AuditReport",
    "Branch",
    "Decision",
    "FamilyAcceptance",
    "GraphSpec",
    "OracleReport",
    "PatternFileSpec",
    "ProtocolConfig",
    "QueryEvent",
    "Record",
    "RunSummary",
    "StrategySpec",
    "SweepConfig",
    "SweepRecord",
    "TrialRecord",
]

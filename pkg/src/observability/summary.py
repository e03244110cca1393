"""Aggregate trial records into a RunSummary."""

from typing import Any, Sequence

from src.core.config import CI_LEVEL
from src.models.records import Branch, FamilyAcceptance, RunSummary, TrialRecord
from src.observability.statistics import clopper_pearson
from src.protocol.settings import SettingFamily
from src.protocol.verifier import AmplificationResult, Calibration, branch_counts


def family_breakdown(records: Sequence[TrialRecord], level: float = CI_LEVEL) -> list[FamilyAcceptance]:
    """Per-family TEST acceptance with Clopper–Pearson intervals, in family order."""
    rows = []
    for family in SettingFamily:
        drawn = [r for r in records if r.branch is Branch.TEST and r.family == family.value]
        accepted = sum(r.accept for r in drawn)
        if drawn:
            low, high = clopper_pearson(accepted, len(drawn), level)
            rows.append(FamilyAcceptance(
                family=family.value, trials=len(drawn), accepted=accepted,
                rate=accepted / len(drawn), ci_low=low, ci_high=high,
            ))
        else:
            rows.append(FamilyAcceptance(family=family.value, trials=0, accepted=0))
    return rows


def build_run_summary(
    result: AmplificationResult,
    calibration: Calibration,
    threshold_rule: str,
    master_seed: int,
    config: dict[str, Any],
    wall_time_s: float,
    level: float = CI_LEVEL,
) -> RunSummary:
    counts, accepted = branch_counts(result.records)
    low, high = clopper_pearson(result.accepted, result.trials, level)
    return RunSummary(
        config=config,
        master_seed=master_seed,
        trials=result.trials,
        accepted=result.accepted,
        branch_counts=dict(counts),
        branch_accepted=dict(accepted),
        families=family_breakdown(result.records, level),
        acceptance=result.acceptance,
        ci_low=low,
        ci_high=high,
        threshold=result.threshold,
        threshold_rule=threshold_rule,
        c_ip=calibration.c_ip,
        s_ip=calibration.s_ip,
        decision=result.decision,
        wall_time_s=wall_time_s,
    )

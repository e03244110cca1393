"""
The classical verifier: TEST, CALCULATE, INTERACTIVEPROOF and AMPLIFYGAP.

Every trial gets its own seed, derived from the master seed and the trial
index, which is split into a verifier stream (branch and setting choice)
and a prover stream (measurement draws and noise). Trials share nothing
mutable, so they may run on a thread pool; results are collected in
trial-index order.

Usage:
    from src.protocol.verifier import amplify_gap, hoeffding_trials

    n_trials = hoeffding_trials(gap=0.1, confidence=2 / 3)
    result = amplify_gap(g, settings, pattern, strategy, q=0.5,
                         trials=n_trials, threshold=..., master_seed=7)
"""

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence
import logging
import math

import numpy as np

from src.core.config import CALIBRATION_TRIALS, HOEFFDING_TRIALS_CAP, ORACLE_BIT_CAP
from src.core.errors import CapacityExceeded, ConfigError, ContractViolation, PatternError
from src.core.utils import calibration_seed, derive_seeds, trial_generators
from src.graph.lattice import Graph
from src.mbqc.pattern import MeasurementPattern, execute
from src.models.records import Branch, Decision, QueryEvent, TrialRecord
from src.protocol.settings import MeasurementSetting, exact_test_acceptance
from src.provers.oracle import optimal_classical_acceptance
from src.provers.session import ProverSession
from src.provers.strategies import ProverStrategy, honest_strategy

logger = logging.getLogger(__name__)

THRESHOLD_RULES = ("midpoint", "paper-literal")


def _transcript(session: ProverSession) -> list[QueryEvent]:
    return [QueryEvent(vertex=e.vertex, symbol=e.symbol, outcome=e.outcome) for e in session.log]


def _check_session(g: Graph, session: ProverSession) -> None:
    if session.strategy.n != g.n:
        raise ValueError(f"Strategy has {session.strategy.n} provers, graph has {g.n} vertices")
    if not session.fresh:
        raise ContractViolation("Each trial needs a fresh prover session")


def run_test(
    g: Graph,
    settings: Sequence[MeasurementSetting],
    session: ProverSession,
    rng: np.random.Generator,
    order: Optional[Sequence[int]] = None,
) -> TrialRecord:
    """
    TEST: pick a setting uniformly, query every prover once, accept iff sign · ∏ responses = +1.

    Args:
        g: Graph the settings were built for
        settings: Setting family
        session: Fresh prover session
        rng: Verifier randomness
        order: Query order; pass the pattern's vertex order so provers see CALCULATE timing

    Returns:
        TrialRecord for the TEST branch
    """
    _check_session(g, session)
    if not settings:
        raise ValueError("Setting list is empty")

    order = tuple(range(g.n)) if order is None else tuple(order)
    if sorted(order) != list(range(g.n)):
        raise PatternError(f"Query order {list(order)} does not cover vertices 0..{g.n - 1}")

    index = int(rng.integers(len(settings)))
    setting = settings[index]
    responses = [session.query(v, setting.symbol_for(v)) for v in order]
    combined = setting.sign * math.prod(responses)

    return TrialRecord(
        branch=Branch.TEST,
        setting_index=index,
        setting=setting.tag,
        family=str(setting.family),
        transcript=_transcript(session),
        combined_outcome=combined,
        accept=combined == 1,
    )


def run_calculate(g: Graph, pattern: MeasurementPattern, session: ProverSession) -> TrialRecord:
    """CALCULATE: execute the adaptive pattern and report its RESULT."""
    _check_session(g, session)
    result = execute(pattern, session)
    return TrialRecord(
        branch=Branch.CALCULATE,
        pattern=pattern.name,
        transcript=_transcript(session),
        combined_outcome=result.product,
        accept=result.accept,
    )


def run_interactive_proof(
    g: Graph,
    settings: Sequence[MeasurementSetting],
    pattern: MeasurementPattern,
    strategy: ProverStrategy,
    q: float,
    seed: int,
    index: int = 0,
) -> TrialRecord:
    """
    INTERACTIVEPROOF: CALCULATE with probability q, TEST otherwise, on fresh provers.

    The trial is fully determined by `seed`.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    verifier_rng, prover_rng = trial_generators(seed)
    session = ProverSession(strategy, prover_rng)
    if verifier_rng.random() < q:
        record = run_calculate(g, pattern, session)
    else:
        record = run_test(g, settings, session, verifier_rng, order=pattern.vertex_order)
    return record.model_copy(update={"index": index, "seed": seed})


def run_trials(
    g: Graph,
    settings: Sequence[MeasurementSetting],
    pattern: MeasurementPattern,
    strategy: ProverStrategy,
    q: float,
    trials: int,
    master_seed: int,
    workers: int = 1,
) -> list[TrialRecord]:
    """Independent INTERACTIVEPROOF trials, returned in trial-index order."""
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")
    seeds = derive_seeds(master_seed, trials)

    def one(i: int) -> TrialRecord:
        return run_interactive_proof(g, settings, pattern, strategy, q, seeds[i], index=i)

    if workers <= 1:
        return [one(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(trials)))


@dataclass(frozen=True)
class AmplificationResult:
    decision: Decision
    accepted: int
    trials: int
    threshold: float
    records: list[TrialRecord]

    @property
    def acceptance(self) -> float:
        return self.accepted / self.trials


def amplify_gap(
    g: Graph,
    settings: Sequence[MeasurementSetting],
    pattern: MeasurementPattern,
    strategy: ProverStrategy,
    q: float,
    trials: int,
    threshold: float,
    master_seed: int,
    workers: int = 1,
) -> AmplificationResult:
    """
    AMPLIFYGAP: run `trials` independent trials and ACCEPT iff the accept count M > threshold.

    Raises:
        ValueError: If threshold lies outside [0, trials]
    """
    if not 0 <= threshold <= trials:
        raise ValueError(f"Threshold {threshold} outside [0, {trials}]")
    records = run_trials(g, settings, pattern, strategy, q, trials, master_seed, workers)
    accepted = sum(r.accept for r in records)
    decision = Decision.ACCEPT if accepted > threshold else Decision.REJECT
    logger.info(f"{strategy.label}: M = {accepted}/{trials}, threshold {threshold:.3f} -> {decision.value}")
    return AmplificationResult(decision, accepted, trials, threshold, records)


def hoeffding_trials(gap: float, confidence: float, cap: int = HOEFFDING_TRIALS_CAP) -> int:
    """
    Smallest N with 2·exp(-N·gap²/2) <= 1 - confidence.

    Raises:
        ValueError: If gap <= 0 or confidence outside (0, 1)
        CapacityExceeded: If N would exceed cap
    """
    if gap <= 0:
        raise ValueError(f"Gap must be positive, got {gap}")
    if not 0 < confidence < 1:
        raise ValueError(f"Confidence must lie in (0, 1), got {confidence}")

    delta = 1 - confidence

    def bound(n: int) -> float:
        return 2 * math.exp(-n * gap * gap / 2)

    estimate = 2 * math.log(2 / delta) / (gap * gap)
    if estimate > cap:
        raise CapacityExceeded(f"Gap {gap} needs about {estimate:.0f} trials, cap is {cap}")
    n = max(1, math.ceil(estimate))
    while n > 1 and bound(n - 1) <= delta:
        n -= 1
    while bound(n) > delta:
        n += 1
    if n > cap:
        raise CapacityExceeded(f"Gap {gap} needs {n} trials, cap is {cap}")
    return n


def compute_threshold(trials: int, c_ip: float, s_ip: float, rule: str = "midpoint") -> float:
    """
    Accept-count cutoff: N(c + s)/2 for "midpoint", N(c - s)/2 for "paper-literal".

    Raises:
        ValueError: On an unknown rule or probabilities outside [0, 1]
    """
    if rule not in THRESHOLD_RULES:
        raise ValueError(f"Unknown threshold rule {rule!r}; expected one of {THRESHOLD_RULES}")
    for name, p in (("c_ip", c_ip), ("s_ip", s_ip)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    if rule == "midpoint":
        return trials * (c_ip + s_ip) / 2
    return max(trials * (c_ip - s_ip) / 2, 0.0)


@dataclass(frozen=True)
class BranchAcceptance:
    """Per-branch acceptance of one strategy."""

    calculate: float
    test: float

    def mixed(self, q: float) -> float:
        return q * self.calculate + (1 - q) * self.test


@dataclass(frozen=True)
class QChoice:
    q: float
    gap: float
    gaps: dict[float, float]


def optimize_q(
    honest: BranchAcceptance,
    adversaries: Mapping[str, BranchAcceptance],
    grid: Sequence[float],
) -> QChoice:
    """
    Pick q maximizing the worst-case acceptance gap over the given adversaries.

    Honest-vs-noisy gaps favor high q and honest-vs-dishonest gaps favor low q;
    ties keep the first grid point.
    """
    if not grid:
        raise ValueError("q grid is empty")
    if not adversaries:
        raise ValueError("Need at least one adversary to compare against")
    gaps = {
        float(q): min(honest.mixed(q) - adv.mixed(q) for adv in adversaries.values())
        for q in grid
    }
    best = max(gaps, key=lambda q: gaps[q])
    logger.info(f"Best q = {best:.3f} with worst-case gap {gaps[best]:.4f}")
    return QChoice(best, gaps[best], gaps)


def estimate_calculate_acceptance(
    g: Graph,
    pattern: MeasurementPattern,
    strategy: ProverStrategy,
    trials: int,
    master_seed: int,
) -> float:
    """Empirical CALCULATE acceptance over independent fresh sessions."""
    accepted = 0
    for seed in derive_seeds(master_seed, trials):
        _, prover_rng = trial_generators(seed)
        accepted += run_calculate(g, pattern, ProverSession(strategy, prover_rng)).accept
    return accepted / trials


@dataclass(frozen=True)
class Calibration:
    honest: BranchAcceptance
    c_ip: float
    s_ip: float
    classical_test_optimum: Optional[float]

    @property
    def gap(self) -> float:
        return self.c_ip - self.s_ip


def calibrate(
    g: Graph,
    settings: Sequence[MeasurementSetting],
    pattern: MeasurementPattern,
    q: float,
    c_ip: Optional[float] = None,
    s_ip: Optional[float] = None,
    master_seed: int = 0,
    calibration_trials: int = CALIBRATION_TRIALS,
) -> Calibration:
    """
    Fill in c_ip and s_ip for a run.

    c_ip mixes the exact honest TEST acceptance with the pattern's honest
    CALCULATE acceptance (known analytically, or estimated). s_ip defaults to
    q·1 + (1 - q)·(classical TEST optimum), since a dishonest prover may
    accept every CALCULATE run.

    Raises:
        ConfigError: If s_ip is not given and the graph is too large for the oracle
    """
    honest = honest_strategy(g)
    if pattern.honest_acceptance is not None:
        calc = pattern.honest_acceptance
    else:
        seed = calibration_seed(master_seed)
        calc = estimate_calculate_acceptance(g, pattern, honest, calibration_trials, seed)
        logger.info(f"Estimated honest CALCULATE acceptance {calc:.4f} over {calibration_trials} runs")
    branch = BranchAcceptance(calculate=calc, test=exact_test_acceptance(honest, settings))

    classical = None
    if s_ip is None:
        if 4 * g.n > ORACLE_BIT_CAP:
            raise ConfigError(
                f"s_ip must be configured: {g} is too large for the exhaustive classical oracle"
            )
        classical = optimal_classical_acceptance(g, settings).probability
        s_ip = q + (1 - q) * classical

    calibration = Calibration(
        honest=branch,
        c_ip=branch.mixed(q) if c_ip is None else c_ip,
        s_ip=s_ip,
        classical_test_optimum=classical,
    )
    logger.info(f"Calibrated c_ip = {calibration.c_ip:.4f}, s_ip = {calibration.s_ip:.4f}")
    return calibration


def branch_counts(records: Sequence[TrialRecord]) -> tuple[Counter, Counter]:
    """(trials per branch, accepts per branch), both with every branch present."""
    counts: Counter = Counter({b: 0 for b in Branch})
    accepted: Counter = Counter({b: 0 for b in Branch})
    for r in records:
        counts[r.branch] += 1
        accepted[r.branch] += r.accept
    return counts, accepted

"""
Numerical audit of the self-testing argument on an explicit strategy.

Every check works on the strategy's joint state ψ' and its observable
table. Residuals are vector norms, so 0 means the identity holds exactly on
ψ' and values grow continuously as the strategy drifts away from honest.

Logical-qubit extraction adjoins one |0⟩ ancilla per prover (ancilla v is
site v, prover v becomes site n + v) and applies, per prover with the
ancilla as control:

    C-X'_v,  H,  C-Z'_v,  H,  C-X'_v

For honest provers this is a swap, so the ancillas end up in |G⟩.

Usage:
    from src.selftest.audit import run_audit

    report = run_audit(strategy, g, build_settings(g))
"""

from dataclasses import dataclass
from typing import Optional, Sequence
import logging
import math

import numpy as np

from src.core.config import AUDIT_TOL, DIMENSION_CAP, EXTRACTION_TOL, STATISTICAL_SIGMAS
from src.core.errors import CapacityExceeded, InapplicableStrategy
from src.graph.lattice import Graph, Triangle, adjacency_image, characteristic_vector, stabilizer_sign
from src.models.records import (
    AuditReport,
    DerivationRecord,
    DResidual,
    LogicalActionRecord,
    SettingDeviation,
)
from src.observability.statistics import mean_standard_error
from src.protocol.settings import MeasurementSetting, setting_expectation
from src.provers.session import ProverSession
from src.provers.strategies import ProverStrategy
from src.provers.symbols import QuerySymbol
from src.quantum.operators import HADAMARD, PAULI_X, PAULI_Z
from src.quantum.state import (
    LocalObservable,
    PureState,
    SettingOperator,
    apply_controlled,
    apply_unitary,
    apply_word,
    expectation,
    fidelity,
    make_graph_state,
    tensor_product,
)

logger = logging.getLogger(__name__)


def _residual(vector: np.ndarray) -> float:
    return float(np.linalg.norm(vector))


def _matrix(strategy: ProverStrategy, v: int, symbol: QuerySymbol) -> np.ndarray:
    return strategy.observable(v, symbol).matrix


# -----------------------------------------------------------------------------
# Expectations
# -----------------------------------------------------------------------------

def _sampled_outcomes(
    strategy: ProverStrategy, setting: MeasurementSetting, shots: int, rng: np.random.Generator
) -> np.ndarray:
    outcomes = np.empty(shots)
    for i in range(shots):
        session = ProverSession(strategy, rng)
        responses = [session.query(v, setting.symbol_for(v)) for v in range(strategy.n)]
        outcomes[i] = setting.sign * math.prod(responses)
    return outcomes


def audit_expectations(
    strategy: ProverStrategy,
    settings: Sequence[MeasurementSetting],
    tolerance: float = AUDIT_TOL,
    shots: Optional[int] = None,
    seed: int = 0,
) -> AuditReport:
    """
    Compare each setting's combined expectation with its honest value.

    Args:
        strategy: Strategy under audit
        settings: Setting family
        tolerance: Allowed deviation in exact mode
        shots: If given, estimate expectations from this many sampled sessions
            per setting and allow STATISTICAL_SIGMAS standard errors instead
        seed: Seed for the statistical mode

    Returns:
        AuditReport with only the expectation part filled in
    """
    rng = np.random.default_rng(seed)
    rows = []
    for setting in settings:
        if shots is None:
            measured = setting_expectation(strategy, setting)
            std_error = None
            allowed = tolerance
        else:
            outcomes = _sampled_outcomes(strategy, setting, shots, rng)
            measured = float(outcomes.mean())
            std_error = mean_standard_error(outcomes)
            allowed = max(STATISTICAL_SIGMAS * std_error, tolerance) if np.isfinite(std_error) else 1.0
        deviation = abs(measured - setting.honest_expectation)
        rows.append(SettingDeviation(
            setting=setting.tag,
            family=str(setting.family),
            honest_expectation=setting.honest_expectation,
            measured=measured,
            deviation=deviation,
            std_error=std_error,
            within_tolerance=deviation <= allowed,
        ))

    max_deviation = max((r.deviation for r in rows), default=0.0)
    return AuditReport(
        strategy=strategy.label,
        mode="exact" if shots is None else "statistical",
        tolerance=tolerance,
        settings=rows,
        max_deviation=max_deviation,
        passed=all(r.within_tolerance for r in rows),
    )


# -----------------------------------------------------------------------------
# Operator identities on ψ'
# -----------------------------------------------------------------------------

def check_anticommutation(strategy: ProverStrategy, v: int) -> float:
    """‖(X'_v Z'_v + Z'_v X'_v) ψ'‖."""
    x, z = _matrix(strategy, v, QuerySymbol.X), _matrix(strategy, v, QuerySymbol.Z)
    psi = strategy.joint_state
    return _residual(apply_word(psi, [(v, x), (v, z)]) + apply_word(psi, [(v, z), (v, x)]))


def check_d_observables(strategy: ProverStrategy, v: int) -> tuple[float, float]:
    """(‖(D'+ - (X' + Z')/√2) ψ'‖, ‖(D'- - (X' - Z')/√2) ψ'‖) at vertex v."""
    x, z = _matrix(strategy, v, QuerySymbol.X), _matrix(strategy, v, QuerySymbol.Z)
    psi = strategy.joint_state
    residuals = []
    for symbol, sign in ((QuerySymbol.DPLUS, 1), (QuerySymbol.DMINUS, -1)):
        difference = _matrix(strategy, v, symbol) - (x + sign * z) / math.sqrt(2)
        residuals.append(_residual(apply_word(psi, [(v, difference)])))
    return residuals[0], residuals[1]


def _generator(strategy: ProverStrategy, g: Graph, x: int) -> SettingOperator:
    factors = {w: strategy.observable(w, QuerySymbol.Z) for w in g.neighbors(x)}
    factors[x] = strategy.observable(x, QuerySymbol.X)
    return SettingOperator(factors)


def _generator_word(strategy: ProverStrategy, g: Graph, x: int) -> list[tuple[int, np.ndarray]]:
    return [(x, _matrix(strategy, x, QuerySymbol.X))] + [
        (w, _matrix(strategy, w, QuerySymbol.Z)) for w in g.neighbors(x)
    ]


@dataclass(frozen=True)
class DerivationCheck:
    triangle: Triangle
    pivot: int
    omitted: Optional[int]
    conclusive: bool
    residual: Optional[float]
    reason: str = ""

    def to_record(self) -> DerivationRecord:
        return DerivationRecord(
            triangle=self.triangle,
            pivot=self.pivot,
            omitted=self.omitted,
            conclusive=self.conclusive,
            residual=self.residual,
            reason=self.reason,
        )


def derive_anticommutation_from_stabilizers(
    strategy: ProverStrategy,
    g: Graph,
    triangle: Triangle,
    pivot: Optional[int] = None,
    omit: Optional[int] = None,
    tolerance: float = AUDIT_TOL,
) -> DerivationCheck:
    """
    Replay the cancellation argument sign · X'^τ Z'^{Aτ} S'_a S'_p S'_b ψ' = ψ'.

    The triangle is ordered (a, p, b) with p the pivot. All factors away from
    the pivot cancel pairwise, leaving sign · X'_p Z'_p X'_p Z'_p, so the
    chain forces X'_p and Z'_p to anticommute on ψ'. The residual is the
    larger of the composite residual and the residual of that endpoint word.
    `omit` drops one generator from the chain.

    Returns:
        DerivationCheck; conclusive=False when some factor is not an exact stabilizer of ψ'
    """
    tri = tuple(sorted(triangle))
    if len(set(tri)) != 3 or not all(g.adjacency[a, b] for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2]))):
        raise ValueError(f"{triangle} is not a triangle of {g}")
    pivot = tri[1] if pivot is None else pivot
    if pivot not in tri:
        raise ValueError(f"Pivot {pivot} is not in triangle {tri}")
    if omit is not None and omit not in tri:
        raise ValueError(f"Omitted generator {omit} is not in triangle {tri}")
    a, b = (w for w in tri if w != pivot)

    psi = strategy.joint_state
    tau = characteristic_vector(g.n, tri)
    z_support = [int(w) for w in np.flatnonzero(adjacency_image(g, tau))]
    sign = stabilizer_sign(g, tau)

    triangle_op = SettingOperator(
        {
            **{w: strategy.observable(w, QuerySymbol.Z) for w in z_support},
            **{w: strategy.observable(w, QuerySymbol.X) for w in tri},
        },
        sign=sign,
    )
    for label, op in [("triangle stabilizer", triangle_op)] + [
        (f"generator S'_{x}", _generator(strategy, g, x)) for x in tri
    ]:
        value = expectation(psi, op)
        if value < 1 - tolerance:
            return DerivationCheck(
                tri, pivot, omit, conclusive=False, residual=None,
                reason=f"{label} has expectation {value:.6g}, not 1",
            )

    word = [(w, _matrix(strategy, w, QuerySymbol.X)) for w in tri]
    word += [(w, _matrix(strategy, w, QuerySymbol.Z)) for w in z_support]
    for x in (a, pivot, b):
        if x != omit:
            word += _generator_word(strategy, g, x)

    composite = _residual(sign * apply_word(psi, word) - psi.amplitudes)
    endpoint_word = [(site, m) for site, m in word if site == pivot]
    endpoint = _residual(sign * apply_word(psi, endpoint_word) - psi.amplitudes)
    return DerivationCheck(tri, pivot, omit, conclusive=True, residual=max(composite, endpoint))


# -----------------------------------------------------------------------------
# Logical-qubit extraction
# -----------------------------------------------------------------------------

def check_extractable(strategy: ProverStrategy) -> None:
    """
    Raises:
        InapplicableStrategy: If some X' or Z' lacks one of the eigenvalues ±1
    """
    for v in range(strategy.n):
        for symbol in (QuerySymbol.X, QuerySymbol.Z):
            if strategy.observable(v, symbol).eigenvalue_signs() != {1, -1}:
                raise InapplicableStrategy(
                    f"{symbol}' at prover {v} has no ±1 eigenvalue pair, so there is no logical qubit to extract"
                )


def _swap_out(strategy: ProverStrategy, prover_state: PureState, dimension_cap: int) -> PureState:
    n = strategy.n
    ancillas = PureState.product([np.array([1.0, 0.0])] * n)
    joint = tensor_product(ancillas, prover_state, dimension_cap)
    for v in range(n):
        x = LocalObservable(n + v, _matrix(strategy, v, QuerySymbol.X))
        z = LocalObservable(n + v, _matrix(strategy, v, QuerySymbol.Z))
        joint = apply_controlled(joint, v, x)
        joint = apply_unitary(joint, v, HADAMARD)
        joint = apply_controlled(joint, v, z)
        joint = apply_unitary(joint, v, HADAMARD)
        joint = apply_controlled(joint, v, x)
    return joint


@dataclass(frozen=True)
class Extraction:
    extracted: PureState
    fidelity: float
    joint: PureState


def extract_logical_state(
    strategy: ProverStrategy, g: Graph, dimension_cap: int = DIMENSION_CAP
) -> Extraction:
    """
    Swap each prover's logical qubit onto an ancilla and compare the ancillas with |G⟩.

    The fidelity is ‖(⟨G| ⊗ I) Φ‖², the best squared overlap over junk
    states; the extracted state is the dominant Schmidt vector of the
    ancilla register.

    Raises:
        InapplicableStrategy: If the strategy has no logical qubits
        CapacityExceeded: If ancillas plus provers exceed dimension_cap
    """
    if strategy.n != g.n:
        raise ValueError(f"Strategy has {strategy.n} provers, graph has {g.n} vertices")
    check_extractable(strategy)
    total = 2**g.n * strategy.joint_state.dimension
    if total > dimension_cap:
        raise CapacityExceeded(f"Extraction needs dimension {total}, cap is {dimension_cap}")

    joint = _swap_out(strategy, strategy.joint_state, dimension_cap)
    register = joint.amplitudes.reshape(2**g.n, -1)
    target = make_graph_state(g).amplitudes
    overlap = target.conj() @ register
    value = float(min(np.vdot(overlap, overlap).real, 1.0))

    left, _, _ = np.linalg.svd(register, full_matrices=False)
    extracted = PureState.from_vector((2,) * g.n, left[:, 0])
    logger.debug(f"Extraction fidelity for {strategy.label}: {value:.12f}")
    return Extraction(extracted=extracted, fidelity=value, joint=joint)


def check_logical_action(
    strategy: ProverStrategy,
    g: Graph,
    v: int,
    symbol: QuerySymbol = QuerySymbol.X,
    dimension_cap: int = DIMENSION_CAP,
) -> float:
    """
    Fidelity between "apply X'_v (or Z'_v), then extract" and "extract, then apply X (Z) to ancilla v".

    Raises:
        InapplicableStrategy: If the strategy has no logical qubits
        ValueError: If symbol is not X or Z
    """
    symbol = QuerySymbol(symbol)
    if symbol not in (QuerySymbol.X, QuerySymbol.Z):
        raise ValueError(f"Logical action is defined for X and Z, got {symbol}")
    check_extractable(strategy)
    pauli = PAULI_X if symbol is QuerySymbol.X else PAULI_Z

    before = apply_unitary(strategy.joint_state, v, _matrix(strategy, v, symbol))
    acted_then_swapped = _swap_out(strategy, before, dimension_cap)
    swapped_then_acted = apply_unitary(_swap_out(strategy, strategy.joint_state, dimension_cap), v, pauli)
    return fidelity(acted_then_swapped, swapped_then_acted)


# -----------------------------------------------------------------------------
# Full audit
# -----------------------------------------------------------------------------

def run_audit(
    strategy: ProverStrategy,
    g: Graph,
    settings: Sequence[MeasurementSetting],
    tolerance: float = AUDIT_TOL,
    shots: Optional[int] = None,
    seed: int = 0,
    dimension_cap: int = DIMENSION_CAP,
) -> AuditReport:
    """
    Run every self-test check and decide pass/fail.

    Extraction is skipped (and the report marked inapplicable) when the
    strategy has no logical qubits.
    """
    report = audit_expectations(strategy, settings, tolerance, shots, seed)
    cover, _ = g.require_protocol_data()

    anticommutation = {v: check_anticommutation(strategy, v) for v in range(g.n)}
    d_residuals = [DResidual(vertex=v, plus=p, minus=m) for v, (p, m) in
                   ((v, check_d_observables(strategy, v)) for v in range(g.n))]
    derivations = [derive_anticommutation_from_stabilizers(strategy, g, tri, tolerance=tolerance) for tri in cover]

    applicable, reason = True, None
    extraction_fidelity = None
    logical = []
    try:
        extraction_fidelity = extract_logical_state(strategy, g, dimension_cap).fidelity
        logical = [
            LogicalActionRecord(vertex=v, symbol=s, fidelity=check_logical_action(strategy, g, v, s, dimension_cap))
            for v in range(g.n)
            for s in (QuerySymbol.X, QuerySymbol.Z)
        ]
    except InapplicableStrategy as e:
        applicable, reason = False, str(e)
        logger.warning(f"Extraction inapplicable for {strategy.label}: {e}")

    passed = (
        applicable
        and report.passed
        and all(r <= tolerance for r in anticommutation.values())
        and all(r.plus <= tolerance and r.minus <= tolerance for r in d_residuals)
        and all(d.conclusive and d.residual <= tolerance for d in derivations)
        and extraction_fidelity is not None
        and extraction_fidelity >= 1 - EXTRACTION_TOL
        and all(r.fidelity >= 1 - EXTRACTION_TOL for r in logical)
    )
    logger.info(f"Audit of {strategy.label} on {g}: {'PASS' if passed else 'FAIL'}")

    return report.model_copy(update={
        "graph": repr(g),
        "applicable": applicable,
        "inapplicable_reason": reason,
        "anticommutation": anticommutation,
        "d_residuals": d_residuals,
        "derivations": [d.to_record() for d in derivations],
        "extraction_fidelity": extraction_fidelity,
        "logical_action": logical,
        "passed": passed,
    })

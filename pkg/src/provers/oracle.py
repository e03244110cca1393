"""
Brute-force soundness oracle over deterministic classical strategies.

Each assignment is an integer with one bit per (vertex, symbol): bit
4·v + index(symbol) set means the prover answers -1. A setting accepts an
assignment iff the parity of the bits it reads equals 1 for sign -1 and 0
for sign +1. Assignments are scanned in numpy batches; ties keep the
smallest assignment, so the witness is deterministic.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence
import logging
import time

import numpy as np

from src.core.config import ORACLE_BIT_CAP, ORACLE_CHUNK_SIZE
from src.core.errors import CapacityExceeded
from src.graph.lattice import Graph
from src.provers.symbols import SYMBOL_INDEX, QuerySymbol

if TYPE_CHECKING:
    from src.protocol.settings import MeasurementSetting

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    probability: float
    witness: dict[tuple[int, QuerySymbol], int]
    accepted_settings: int
    total_settings: int
    assignments_searched: int


def _parity(x: np.ndarray) -> np.ndarray:
    for shift in (32, 16, 8, 4, 2, 1):
        x = x ^ (x >> np.uint64(shift))
    return x & np.uint64(1)


def _decode(n: int, assignment: int) -> dict[tuple[int, QuerySymbol], int]:
    return {
        (v, symbol): -1 if (assignment >> (4 * v + idx)) & 1 else 1
        for v in range(n)
        for symbol, idx in SYMBOL_INDEX.items()
    }


def optimal_classical_acceptance(
    g: Graph,
    settings: Sequence["MeasurementSetting"],
    bit_cap: int = ORACLE_BIT_CAP,
    chunk_size: int = ORACLE_CHUNK_SIZE,
) -> OracleResult:
    """
    Maximize the fraction of accepted settings over all deterministic assignments.

    Args:
        g: Graph whose vertices are the provers
        settings: Settings weighted uniformly
        bit_cap: Largest 4·n allowed
        chunk_size: Assignments evaluated per batch

    Returns:
        OracleResult with the optimum and one assignment attaining it

    Raises:
        CapacityExceeded: If 4·n exceeds bit_cap
    """
    bits = 4 * g.n
    if bits > bit_cap:
        raise CapacityExceeded(f"Oracle search needs 2^{bits} assignments, cap is 2^{bit_cap}")

    if not settings:
        return OracleResult(1.0, _decode(g.n, 0), 0, 0, 0)

    masks = []
    targets = []
    for setting in settings:
        mask = 0
        for v, symbol in setting.assignment.items():
            if not 0 <= v < g.n:
                raise ValueError(f"Setting {setting.tag} queries vertex {v} outside the graph")
            mask |= 1 << (4 * v + SYMBOL_INDEX[QuerySymbol(symbol)])
        masks.append(np.uint64(mask))
        targets.append(np.uint64(1 if setting.sign == -1 else 0))

    total = 1 << bits
    best_count = -1
    best_assignment = 0
    searched = 0
    started = time.perf_counter()

    for start in range(0, total, chunk_size):
        block = np.arange(start, min(start + chunk_size, total), dtype=np.uint64)
        searched += block.size
        counts = np.zeros(block.size, dtype=np.int32)
        for mask, target in zip(masks, targets):
            counts += _parity(block & mask) == target
        idx = int(np.argmax(counts))
        if counts[idx] > best_count:
            best_count = int(counts[idx])
            best_assignment = start + idx
            if best_count == len(settings):
                break

    elapsed = time.perf_counter() - started
    probability = best_count / len(settings)
    logger.info(
        f"Classical optimum for {g}: {best_count}/{len(settings)} = {probability:.6f} "
        f"({elapsed:.2f}s, {searched} of 2^{bits} assignments searched)"
    )
    return OracleResult(
        probability=probability,
        witness=_decode(g.n, best_assignment),
        accepted_settings=best_count,
        total_settings=len(settings),
        assignments_searched=searched,
    )

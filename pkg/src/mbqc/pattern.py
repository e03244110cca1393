"""
Adaptive measurement patterns and their execution over prover sessions.

A pattern is a vertex order, a basis function choosing the symbol for the
next vertex from the outcomes seen so far, and a result function deciding
ACCEPT/REJECT from the full transcript. Outcome maps are keyed by vertex
and iterate in measurement order.

Patterns loaded from files use parity rules: a vertex's basis is either a
constant symbol or chosen by the parity of earlier outcomes (an outcome of
-1 counts as 1), and the result is the product of selected outcomes
compared against ±1.

Usage:
    from src.mbqc.pattern import parity_pattern, execute

    all_x = parity_pattern("all-x", order=[0, 1, 2], bases={}, default="X",
                           result_vertices=[0, 1, 2], result_equals=-1)
    result = execute(all_x, session)
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Mapping, Optional, Sequence, Union
import logging
import math

import numpy as np

from src.core.config import PATTERN_EXHAUSTIVE_LIMIT, PATTERN_SAMPLED_PREFIXES
from src.core.errors import ContractViolation, PatternError
from src.graph.lattice import Graph
from src.provers.session import ProverSession
from src.provers.symbols import QuerySymbol

logger = logging.getLogger(__name__)

Outcomes = Mapping[int, int]
BasisFn = Callable[[int, Outcomes], QuerySymbol]
ResultFn = Callable[[Outcomes], bool]


@dataclass(frozen=True)
class ParityChoice:
    """Pick `even` or `odd` by the parity of -1 outcomes on `vertices`."""

    vertices: tuple[int, ...]
    even: QuerySymbol
    odd: QuerySymbol

    def choose(self, prefix: Outcomes) -> QuerySymbol:
        try:
            flips = sum(prefix[w] == -1 for w in self.vertices)
        except KeyError as e:
            raise PatternError(f"Basis depends on vertex {e.args[0]}, which is not measured yet") from e
        return self.odd if flips % 2 else self.even


BasisRule = Union[QuerySymbol, ParityChoice]


@dataclass(frozen=True)
class MeasurementPattern:
    """
    Classical program of one CALCULATE run.

    `honest_acceptance` is the analytically known ACCEPT probability against
    honest provers, when there is one.
    """

    name: str
    vertex_order: tuple[int, ...]
    basis_fn: BasisFn = field(compare=False)
    result_fn: ResultFn = field(compare=False)
    honest_acceptance: Optional[float] = None
    description: str = ""

    @property
    def deterministic(self) -> bool:
        return self.honest_acceptance is not None and self.honest_acceptance in (0.0, 1.0)


@dataclass(frozen=True)
class ExecutionResult:
    outcomes: dict[int, int]
    bases: dict[int, QuerySymbol]
    accept: bool

    @property
    def product(self) -> int:
        return math.prod(self.outcomes.values())


def parity_pattern(
    name: str,
    order: Sequence[int],
    bases: Mapping[int, BasisRule],
    default: Union[QuerySymbol, str],
    result_vertices: Sequence[int],
    result_equals: int,
    honest_acceptance: Optional[float] = None,
    description: str = "",
) -> MeasurementPattern:
    """
    Build a pattern from parity rules.

    Args:
        name: Pattern name
        order: Measurement order
        bases: Per-vertex constant symbol or ParityChoice; others use `default`
        default: Symbol for vertices without a rule
        result_vertices: Outcomes multiplied together by the result function
        result_equals: ACCEPT iff that product equals this (±1)
        honest_acceptance: Known honest ACCEPT probability, if any
        description: Free text

    Raises:
        PatternError: If result_equals is not ±1
    """
    if result_equals not in (1, -1):
        raise PatternError(f"Result target must be ±1, got {result_equals}")
    rules = {int(v): rule for v, rule in bases.items()}
    default_symbol = QuerySymbol(default)
    selected = tuple(int(v) for v in result_vertices)

    def basis_fn(v: int, prefix: Outcomes) -> QuerySymbol:
        rule = rules.get(v, default_symbol)
        if isinstance(rule, ParityChoice):
            return rule.choose(prefix)
        return QuerySymbol(rule)

    def result_fn(outcomes: Outcomes) -> bool:
        try:
            return math.prod(outcomes[w] for w in selected) == result_equals
        except KeyError as e:
            raise PatternError(f"Result reads vertex {e.args[0]}, which was never measured") from e

    return MeasurementPattern(
        name=name,
        vertex_order=tuple(int(v) for v in order),
        basis_fn=basis_fn,
        result_fn=result_fn,
        honest_acceptance=honest_acceptance,
        description=description,
    )


def execute(pattern: MeasurementPattern, session: ProverSession) -> ExecutionResult:
    """
    Run the pattern on a fresh session, one query per prover in vertex order.

    Raises:
        ContractViolation: If the session was already used or the pattern asks a prover to idle
        PatternError: If the order does not cover every prover exactly once
    """
    n = session.strategy.n
    if sorted(pattern.vertex_order) != list(range(n)):
        raise PatternError(
            f"Pattern {pattern.name!r} order {list(pattern.vertex_order)} does not cover vertices 0..{n - 1}"
        )
    if not session.fresh:
        raise ContractViolation("CALCULATE requires a fresh prover session")

    outcomes: dict[int, int] = {}
    bases: dict[int, QuerySymbol] = {}
    for v in pattern.vertex_order:
        symbol = QuerySymbol(pattern.basis_fn(v, dict(outcomes)))
        if symbol is QuerySymbol.IDENTITY:
            raise ContractViolation(
                f"Pattern {pattern.name!r} asked prover {v} to idle after outcomes {outcomes}"
            )
        bases[v] = symbol
        outcomes[v] = session.query(v, symbol)

    accept = bool(pattern.result_fn(dict(outcomes)))
    return ExecutionResult(outcomes=outcomes, bases=bases, accept=accept)


def _outcome_vectors(n: int, seed: int) -> Iterator[tuple[int, ...]]:
    if n <= PATTERN_EXHAUSTIVE_LIMIT:
        yield from product((1, -1), repeat=n)
        return
    rng = np.random.default_rng(seed)
    for _ in range(PATTERN_SAMPLED_PREFIXES):
        yield tuple(int(x) for x in rng.choice((1, -1), size=n))


def _walk(pattern: MeasurementPattern, n: int, seed: int) -> Iterator[tuple[int, dict[int, int], object]]:
    """Yield (vertex, prefix, basis or raised exception) along every enumerated outcome vector."""
    seen: set[tuple[int, tuple[tuple[int, int], ...]]] = set()
    for vector in _outcome_vectors(n, seed):
        prefix: dict[int, int] = {}
        for position, v in enumerate(pattern.vertex_order):
            key = (v, tuple(prefix.items()))
            if key not in seen:
                seen.add(key)
                try:
                    basis: object = QuerySymbol(pattern.basis_fn(v, dict(prefix)))
                except (PatternError, ValueError, KeyError) as e:
                    basis = e
                yield v, dict(prefix), basis
            prefix[v] = vector[position]


def validate_pattern(pattern: MeasurementPattern, g: Graph, seed: int = 0) -> list[str]:
    """
    Check order coverage, basis totality and Identity absence.

    Prefixes are enumerated exhaustively for small graphs and sampled with
    `seed` otherwise.

    Returns:
        Diagnostics; an empty list means the pattern is valid
    """
    diagnostics: list[str] = []
    order = list(pattern.vertex_order)

    out_of_range = sorted({v for v in order if not 0 <= v < g.n})
    if out_of_range:
        diagnostics.append(f"order contains vertices outside the graph: {out_of_range}")
    duplicates = sorted({v for v in order if order.count(v) > 1})
    if duplicates:
        diagnostics.append(f"order measures vertices more than once: {duplicates}")
    for v in range(g.n):
        if v not in order:
            diagnostics.append(f"order skips vertex {v}")
    if diagnostics:
        return diagnostics

    for v, prefix, basis in _walk(pattern, g.n, seed):
        if isinstance(basis, Exception):
            diagnostics.append(f"basis for vertex {v} undefined after prefix {prefix}: {basis}")
        elif basis is QuerySymbol.IDENTITY:
            diagnostics.append(f"basis for vertex {v} is Identity after prefix {prefix}")

    for vector in _outcome_vectors(g.n, seed):
        outcomes = dict(zip(order, vector))
        try:
            pattern.result_fn(outcomes)
        except (PatternError, ValueError, KeyError) as e:
            diagnostics.append(f"result undefined on outcomes {outcomes}: {e}")
            break

    if diagnostics:
        logger.warning(f"Pattern {pattern.name!r} has {len(diagnostics)} problem(s)")
    return diagnostics


def reachable_symbols(pattern: MeasurementPattern, g: Graph, seed: int = 0) -> dict[int, set[QuerySymbol]]:
    """Every symbol the pattern may send to each vertex."""
    reachable: dict[int, set[QuerySymbol]] = {v: set() for v in range(g.n)}
    for v, _, basis in _walk(pattern, g.n, seed):
        if isinstance(basis, QuerySymbol) and 0 <= v < g.n:
            reachable[v].add(basis)
    return reachable

"""
Prover sessions: the only way the verifier talks to provers.

A session owns the current shared state. Each query collapses that state
with a measurement on the queried prover's own site, using only that
prover's observable for the symbol it was sent. Every prover answers at
most once per session.
"""

from typing import NamedTuple
import logging

import numpy as np

from src.core.errors import ContractViolation
from src.provers.strategies import ProverStrategy
from src.provers.symbols import QuerySymbol
from src.quantum.state import PureState, measure


class QueryLogEntry(NamedTuple):
    vertex: int
    symbol: QuerySymbol
    outcome: int


class ProverSession:
    """
    One protocol run against a fresh set of provers.

    Usage:
        session = ProverSession(strategy, rng)
        a = session.query(0, QuerySymbol.X)
    """

    def __init__(self, strategy: ProverStrategy, rng: np.random.Generator):
        self.strategy = strategy
        self.rng = rng
        self.state: PureState = strategy.joint_state
        self.log: list[QueryLogEntry] = []
        self._queried: set[int] = set()
        self.logger = logging.getLogger(self.__class__.__name__)

    @property
    def fresh(self) -> bool:
        return not self._queried

    def queried(self, v: int) -> bool:
        return v in self._queried

    def query(self, v: int, symbol: QuerySymbol) -> int:
        """
        Send `symbol` to prover v and return its ±1 response.

        Raises:
            ContractViolation: If prover v was already queried in this session
            ValueError: If v is not a prover of this strategy
        """
        symbol = QuerySymbol(symbol)
        if not 0 <= v < self.strategy.n:
            raise ValueError(f"No prover {v}; strategy has {self.strategy.n} provers")
        if v in self._queried:
            raise ContractViolation(f"Prover {v} was already queried in this session")
        self._queried.add(v)

        if symbol is QuerySymbol.IDENTITY:
            outcome = 1
        elif self.strategy.classical_fallback is not None:
            outcome = self.strategy.classical_fallback[(v, symbol)]
        else:
            outcome, self.state = measure(self.state, self.strategy.observable(v, symbol), self.rng)

        if symbol is not QuerySymbol.IDENTITY and self.strategy.flip_probability > 0.0:
            if self.rng.random() < self.strategy.flip_probability:
                outcome = -outcome

        self.log.append(QueryLogEntry(v, symbol, outcome))
        self.logger.debug(f"prover {v} <- {symbol}: {outcome:+d}")
        return outcome

"""Strategy spec files."""

from pathlib import Path
from typing import Union
import logging

import numpy as np
from pydantic import TypeAdapter, ValidationError

from src.core.errors import ConfigError
from src.graph.lattice import Graph
from src.models.specs import (
    ClassicalStrategySpec,
    CustomStrategySpec,
    HonestStrategySpec,
    NoisyStrategySpec,
    PerturbedStrategySpec,
    StrategySpec,
    parse_complex,
)
from src.provers.strategies import (
    ProverStrategy,
    classical_strategy,
    custom_strategy,
    honest_strategy,
    noisy_strategy,
    perturbed_strategy,
)
from src.provers.symbols import QuerySymbol
from src.quantum.state import PureState

logger = logging.getLogger(__name__)

_strategy_adapter: TypeAdapter = TypeAdapter(StrategySpec)


def strategy_from_spec(spec: StrategySpec, g: Graph) -> ProverStrategy:
    """
    Instantiate a strategy for the provers of g.

    Raises:
        ConfigError: If the spec does not fit the graph (wrong prover count, bad matrices)
    """
    try:
        if isinstance(spec, HonestStrategySpec):
            return honest_strategy(g)
        if isinstance(spec, NoisyStrategySpec):
            return noisy_strategy(g, spec.eps)
        if isinstance(spec, PerturbedStrategySpec):
            return perturbed_strategy(g, spec.theta, spec.rotate)
        if isinstance(spec, ClassicalStrategySpec):
            table = {}
            if spec.default is not None:
                table = {(v, s): spec.default for v in range(g.n) for s in QuerySymbol.measured()}
            for entry in spec.assignment:
                if entry.symbol is QuerySymbol.IDENTITY:
                    raise ValueError("Identity responses are fixed at +1 and cannot be assigned")
                table[(entry.vertex, entry.symbol)] = entry.value
            return classical_strategy(table, n=g.n)
        if isinstance(spec, CustomStrategySpec):
            if len(spec.local_dims) != g.n:
                raise ValueError(f"Custom strategy has {len(spec.local_dims)} provers, graph has {g.n}")
            state = PureState(
                tuple(spec.local_dims), np.array([parse_complex(a) for a in spec.state])
            )
            observables = {
                (entry.vertex, entry.symbol): np.array(
                    [[parse_complex(a) for a in row] for row in entry.matrix]
                )
                for entry in spec.observables
            }
            return custom_strategy(state, observables, spec.flip_probability, spec.label)
    except ValueError as e:
        raise ConfigError(f"Strategy spec does not fit {g}: {e}") from e
    raise ConfigError(f"Unsupported strategy spec {spec!r}")


def parse_strategy_spec(text: str, source: str = "<string>") -> StrategySpec:
    try:
        return _strategy_adapter.validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"Invalid strategy spec {source}: {e}") from e


def load_strategy(path: Union[str, Path], g: Graph) -> ProverStrategy:
    """
    Load a strategy spec file and instantiate it for g.

    Raises:
        ConfigError: If the file is missing or invalid
    """
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError as e:
        raise ConfigError(f"Strategy file not found: {path}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read strategy file {path}: {e}") from e
    strategy = strategy_from_spec(parse_strategy_spec(text, str(path)), g)
    logger.info(f"Loaded {strategy} from {path}")
    return strategy

"""
Pydantic models for the JSON spec files: graphs, strategies, patterns, runs and sweeps.

Complex matrix entries in custom strategies may be written as a JSON number,
a string such as "0.5-0.5j", or a [re, im] pair.
"""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, model_validator

from src.core.config import DEFAULT_CONFIDENCE, DEFAULT_WORKERS
from src.provers.symbols import QuerySymbol

ComplexEntry = Union[float, str, tuple[float, float]]


def parse_complex(entry: ComplexEntry) -> complex:
    """Decode one complex matrix entry."""
    if isinstance(entry, (tuple, list)):
        real, imag = entry
        return complex(real, imag)
    if isinstance(entry, str):
        return complex(entry.replace(" ", "").replace("i", "j"))
    return complex(entry)


class SpecModel(BaseModel):
    """Base for spec files: unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")


# -----------------------------------------------------------------------------
# Graphs
# -----------------------------------------------------------------------------

class LatticeSpec(SpecModel):
    """Triangular lattice dimensions."""
    rows: PositiveInt
    cols: PositiveInt


class GraphSpec(SpecModel):
    """Either `n` with `edges`, or `lattice`; cover and neighbors are optional overrides."""
    n: Optional[PositiveInt] = None
    edges: Optional[list[tuple[int, int]]] = None
    lattice: Optional[LatticeSpec] = None
    triangles: Optional[list[tuple[int, int, int]]] = None
    designated_neighbors: Optional[list[int]] = None

    @model_validator(mode="after")
    def _one_source(self) -> "GraphSpec":
        if self.lattice is not None and (self.n is not None or self.edges is not None):
            raise ValueError("Give either 'lattice' or 'n'/'edges', not both")
        if self.lattice is None and self.n is None:
            raise ValueError("Graph spec needs 'n' (with 'edges') or 'lattice'")
        return self


# -----------------------------------------------------------------------------
# Strategies
# -----------------------------------------------------------------------------

class HonestStrategySpec(SpecModel):
    kind: Literal["honest"] = "honest"


class NoisyStrategySpec(SpecModel):
    kind: Literal["noisy"] = "noisy"
    eps: float = Field(ge=0.0, le=1.0)


class PerturbedStrategySpec(SpecModel):
    kind: Literal["perturbed"] = "perturbed"
    theta: float
    rotate: list[QuerySymbol] = Field(default_factory=lambda: [QuerySymbol.X])


class ClassicalEntrySpec(SpecModel):
    vertex: int = Field(ge=0)
    symbol: QuerySymbol
    value: Literal[1, -1]


class ClassicalStrategySpec(SpecModel):
    """Explicit responses; `default` fills every (vertex, symbol) not listed."""
    kind: Literal["classical"] = "classical"
    default: Optional[Literal[1, -1]] = None
    assignment: list[ClassicalEntrySpec] = Field(default_factory=list)


class ObservableEntrySpec(SpecModel):
    vertex: int = Field(ge=0)
    symbol: QuerySymbol
    matrix: list[list[ComplexEntry]]


class CustomStrategySpec(SpecModel):
    """Arbitrary joint state (site 0 most significant) and explicit observables."""
    kind: Literal["custom"] = "custom"
    local_dims: list[PositiveInt]
    state: list[ComplexEntry]
    observables: list[ObservableEntrySpec]
    flip_probability: float = Field(default=0.0, ge=0.0, le=1.0)
    label: str = "custom"


StrategySpec = Annotated[
    Union[
        HonestStrategySpec,
        NoisyStrategySpec,
        PerturbedStrategySpec,
        ClassicalStrategySpec,
        CustomStrategySpec,
    ],
    Field(discriminator="kind"),
]


# -----------------------------------------------------------------------------
# Patterns
# -----------------------------------------------------------------------------

class ParityBasisSpec(SpecModel):
    """Use `even` or `odd` depending on the parity of -1 outcomes on `parity`."""
    parity: list[int]
    even: QuerySymbol
    odd: QuerySymbol


class ResultSpec(SpecModel):
    """ACCEPT iff the product of the selected outcomes equals `equals`."""
    parity: Union[Literal["all"], list[int]]
    equals: Literal[1, -1]


class PatternFileSpec(SpecModel):
    name: str = "custom"
    order: list[int]
    basis: dict[int, Union[QuerySymbol, ParityBasisSpec]] = Field(default_factory=dict)
    default: QuerySymbol = QuerySymbol.X
    result: ResultSpec
    honest_acceptance: Optional[float] = Field(default=None, ge=0.0, le=1.0)


class BuiltinPatternSpec(SpecModel):
    builtin: str


PatternSpec = Union[BuiltinPatternSpec, PatternFileSpec]


# -----------------------------------------------------------------------------
# Runs
# -----------------------------------------------------------------------------

ThresholdRule = Literal["midpoint", "paper-literal"]
FourthFamilySign = Literal["default", "paper-literal"]


class ProtocolConfig(SpecModel):
    """
    One amplified run. `graph`, `strategy` and `pattern` are inline specs or
    paths (relative to the config file).

    `trials` defaults to the Hoeffding count for the calibrated gap; an explicit
    `threshold` (accept count cutoff) overrides `threshold_rule`.
    """
    graph: Union[GraphSpec, str]
    strategy: Union[StrategySpec, str] = Field(default_factory=HonestStrategySpec)
    pattern: Union[PatternSpec, str] = Field(
        default_factory=lambda: BuiltinPatternSpec(builtin="generator-parity")
    )
    q: float = Field(default=0.5, ge=0.0, le=1.0)
    trials: Optional[PositiveInt] = None
    threshold: Optional[float] = Field(default=None, ge=0.0)
    threshold_rule: ThresholdRule = "midpoint"
    c_ip: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    s_ip: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    confidence: float = Field(default=DEFAULT_CONFIDENCE, gt=0.0, lt=1.0)
    master_seed: int = Field(default=0, ge=0)
    fourth_family_sign: FourthFamilySign = "default"
    workers: PositiveInt = DEFAULT_WORKERS

    @model_validator(mode="after")
    def _threshold_within_trials(self) -> "ProtocolConfig":
        if self.threshold is not None and self.trials is not None and self.threshold > self.trials:
            raise ValueError(f"threshold {self.threshold} exceeds trials {self.trials}")
        return self


class SweepConfig(SpecModel):
    """
    Grid of acceptance estimates. Every q is crossed with the honest strategy,
    noisy(eps) for each eps, perturbed(theta) for each theta, and any extra
    adversaries.
    """
    graph: Union[GraphSpec, str]
    pattern: Union[PatternSpec, str] = Field(
        default_factory=lambda: BuiltinPatternSpec(builtin="generator-parity")
    )
    q_grid: list[Annotated[float, Field(ge=0.0, le=1.0)]] = Field(min_length=1)
    eps_grid: list[Annotated[float, Field(ge=0.0, le=1.0)]] = Field(default_factory=list)
    theta_grid: list[float] = Field(default_factory=list)
    adversaries: list[StrategySpec] = Field(default_factory=list)
    trials: PositiveInt = 2000
    master_seed: int = Field(default=0, ge=0)
    fourth_family_sign: FourthFamilySign = "default"
    workers: PositiveInt = DEFAULT_WORKERS

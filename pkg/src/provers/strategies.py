"""
Prover strategies.

A strategy is a joint pure state over one local space per prover plus a
table of ±1 observables, one per (vertex, symbol). Deterministic classical
strategies additionally carry a lookup table that answers queries without
consulting any state; their observables are ±1 on one-dimensional spaces,
so the same exact-expectation code can evaluate them.

Usage:
    from src.provers.strategies import honest_strategy, noisy_strategy

    honest = honest_strategy(g)
    noisy = noisy_strategy(g, eps=0.1)
"""

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional
import logging
import math

import numpy as np
import numpy.typing as npt

from src.graph.lattice import Graph
from src.provers.symbols import QuerySymbol
from src.quantum.operators import xz_plane_observable
from src.quantum.state import LocalObservable, PureState, make_graph_state

logger = logging.getLogger(__name__)

TableKey = tuple[int, QuerySymbol]

# Angle of each honest observable in the X–Z plane
HONEST_ANGLES = {
    QuerySymbol.X: 0.0,
    QuerySymbol.Z: math.pi / 2,
    QuerySymbol.DPLUS: math.pi / 4,
    QuerySymbol.DMINUS: -math.pi / 4,
}


@dataclass(frozen=True, eq=False)
class ProverStrategy:
    """Shared state plus strictly local observables, one table entry per (vertex, symbol)."""

    kind: str
    joint_state: PureState
    observable_table: Mapping[TableKey, LocalObservable]
    classical_fallback: Optional[Mapping[TableKey, int]] = None
    flip_probability: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        n = self.joint_state.num_sites
        expected_keys = {(v, s) for v in range(n) for s in QuerySymbol.measured()}
        if set(self.observable_table) != expected_keys:
            missing = sorted(expected_keys - set(self.observable_table), key=str)
            extra = sorted(set(self.observable_table) - expected_keys, key=str)
            raise ValueError(
                f"Observable table must cover X, Z, D+, D- for every vertex "
                f"(missing {missing}, unexpected {extra})"
            )
        for (v, symbol), obs in self.observable_table.items():
            if obs.site != v:
                raise ValueError(f"Observable for ({v}, {symbol}) acts on site {obs.site}")
            if obs.dim != self.joint_state.local_dims[v]:
                raise ValueError(
                    f"Observable for ({v}, {symbol}) has dimension {obs.dim}, "
                    f"prover space has {self.joint_state.local_dims[v]}"
                )
        if self.classical_fallback is not None:
            if set(self.classical_fallback) != expected_keys:
                raise ValueError("Classical table must cover every (vertex, symbol) pair")
            if any(value not in (1, -1) for value in self.classical_fallback.values()):
                raise ValueError("Classical responses must be ±1")
        if not 0.0 <= self.flip_probability <= 1.0:
            raise ValueError(f"Flip probability must lie in [0, 1], got {self.flip_probability}")
        if not self.label:
            object.__setattr__(self, "label", self.kind)

    @property
    def n(self) -> int:
        return self.joint_state.num_sites

    @property
    def is_classical(self) -> bool:
        return self.classical_fallback is not None

    def observable(self, v: int, symbol: QuerySymbol) -> LocalObservable:
        return self.observable_table[(v, QuerySymbol(symbol))]

    def __repr__(self) -> str:
        return f"ProverStrategy({self.label}, n={self.n})"


def _xz_plane_table(n: int, angles: Mapping[QuerySymbol, float]) -> dict[TableKey, LocalObservable]:
    return {
        (v, symbol): LocalObservable(v, xz_plane_observable(angle))
        for v in range(n)
        for symbol, angle in angles.items()
    }


def honest_strategy(g: Graph) -> ProverStrategy:
    """Graph state |G⟩ measured in X, Z, (X+Z)/√2, (X−Z)/√2."""
    return ProverStrategy(
        kind="honest",
        joint_state=make_graph_state(g),
        observable_table=_xz_plane_table(g.n, HONEST_ANGLES),
    )


def noisy_strategy(g: Graph, eps: float) -> ProverStrategy:
    """Honest strategy whose every response is flipped independently with probability eps."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    return replace(honest_strategy(g), kind="noisy", flip_probability=eps, label=f"noisy(eps={eps:g})")


def perturbed_strategy(
    g: Graph,
    theta: float,
    rotate: Iterable[QuerySymbol] = (QuerySymbol.X,),
) -> ProverStrategy:
    """Honest strategy with the chosen observables rotated by theta in the X–Z plane."""
    rotated = {QuerySymbol(s) for s in rotate}
    if QuerySymbol.IDENTITY in rotated:
        raise ValueError("The identity query has no observable to rotate")
    angles = {
        symbol: angle + (theta if symbol in rotated else 0.0)
        for symbol, angle in HONEST_ANGLES.items()
    }
    names = ",".join(sorted(str(s) for s in rotated))
    logger.debug(f"Rotating {names} by theta={theta:g} on {g.n} provers")
    return ProverStrategy(
        kind="perturbed",
        joint_state=make_graph_state(g),
        observable_table=_xz_plane_table(g.n, angles),
        label=f"perturbed(theta={theta:g};{names})",
    )


def classical_strategy(assignment: Mapping[TableKey, int], n: Optional[int] = None) -> ProverStrategy:
    """
    Deterministic responses read from `assignment`.

    Raises:
        ValueError: If the assignment is not total over vertices x measured symbols
    """
    table = {(int(v), QuerySymbol(s)): int(value) for (v, s), value in assignment.items()}
    if n is None:
        n = max((v for v, _ in table), default=-1) + 1
    if n < 1:
        raise ValueError("Classical assignment is empty")
    expected = {(v, s) for v in range(n) for s in QuerySymbol.measured()}
    missing = expected - set(table)
    if missing:
        raise ValueError(f"Classical assignment is not total; missing {sorted(missing, key=str)}")
    return ProverStrategy(
        kind="classical",
        joint_state=PureState((1,) * n, np.ones(1)),
        observable_table={
            (v, s): LocalObservable(v, np.array([[value]])) for (v, s), value in table.items()
        },
        classical_fallback=table,
    )


def constant_classical_strategy(n: int, value: int = 1) -> ProverStrategy:
    """Every prover answers `value` to every query."""
    return classical_strategy({(v, s): value for v in range(n) for s in QuerySymbol.measured()}, n=n)


def custom_strategy(
    joint_state: PureState,
    observables: Mapping[TableKey, npt.ArrayLike],
    flip_probability: float = 0.0,
    label: str = "custom",
) -> ProverStrategy:
    """Adversarial strategy from explicit matrices on an arbitrary joint state."""
    return ProverStrategy(
        kind="custom",
        joint_state=joint_state,
        observable_table={
            (int(v), QuerySymbol(s)): LocalObservable(int(v), matrix)
            for (v, s), matrix in observables.items()
        },
        flip_probability=flip_probability,
        label=label,
    )


def with_observable(
    strategy: ProverStrategy, v: int, symbol: QuerySymbol, matrix: npt.ArrayLike
) -> ProverStrategy:
    """Copy of `strategy` with one table entry replaced."""
    table = dict(strategy.observable_table)
    table[(v, QuerySymbol(symbol))] = LocalObservable(v, matrix)
    return ProverStrategy(
        kind="custom",
        joint_state=strategy.joint_state,
        observable_table=table,
        flip_probability=strategy.flip_probability,
        label=f"{strategy.label}+override({v},{symbol})",
    )

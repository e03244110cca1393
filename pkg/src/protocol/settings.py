"""
The TEST measurement-setting family for a graph.

For every vertex v with designated neighbor u, and every triangle τ of the cover:

    generator(v)      X_v Z^{N(v)}                    sign +1   honest  1
    triangle(τ)       X^τ Z^{Aτ}                      sign -1   honest  1
    d_plus_z(v)       D+_v Z^{N(v)}                   sign +1   honest  1/√2
    d_minus_z(v)      D-_v Z^{N(v)}                   sign +1   honest  1/√2
    d_plus_x(v, u)    D+_v X_u Z^{N(u) minus v}       sign +1   honest  1/√2
    d_minus_x(v, u)   D-_v X_u Z^{N(u) minus v}       sign -1   honest  1/√2

The sign is folded into the combined outcome, so a setting accepts iff
sign · ∏ responses = +1. With `fourth_family_sign="paper-literal"` the two
X-type D settings take the opposite signs and an honest expectation of -1/√2.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence
import logging
import math

import numpy as np

from src.graph.lattice import Graph, adjacency_image, characteristic_vector, stabilizer_sign
from src.provers.strategies import ProverStrategy
from src.provers.symbols import QuerySymbol
from src.quantum.state import SettingOperator, expectation

logger = logging.getLogger(__name__)

INV_SQRT2 = 1 / math.sqrt(2)
FOURTH_FAMILY_SIGN_RULES = ("default", "paper-literal")


class SettingFamily(str, Enum):
    GENERATOR = "generator"
    TRIANGLE = "triangle"
    D_PLUS_Z = "d_plus_z"
    D_MINUS_Z = "d_minus_z"
    D_PLUS_X = "d_plus_x"
    D_MINUS_X = "d_minus_x"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MeasurementSetting:
    """
    One query per prover plus a global sign.

    `assignment` lists only the measured vertices; every other vertex is
    queried with the identity.
    """

    family: SettingFamily
    anchor: tuple[int, ...]
    assignment: Mapping[int, QuerySymbol] = field(hash=False)
    sign: int
    honest_expectation: float

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"Setting sign must be ±1, got {self.sign}")
        if any(s is QuerySymbol.IDENTITY for s in self.assignment.values()):
            raise ValueError("Identity queries are implicit and must not appear in an assignment")

    def symbol_for(self, v: int) -> QuerySymbol:
        return self.assignment.get(v, QuerySymbol.IDENTITY)

    @property
    def tag(self) -> str:
        return f"{self.family}({','.join(str(a) for a in self.anchor)})"

    @property
    def honest_acceptance(self) -> float:
        return (1 + self.honest_expectation) / 2

    def __str__(self) -> str:
        sign = "+" if self.sign == 1 else "-"
        body = " ".join(f"{s}{v}" for v, s in sorted(self.assignment.items()))
        return f"{self.tag}: {sign}[{body}]"


def _z_on(vertices: Iterable[int]) -> dict[int, QuerySymbol]:
    return {int(w): QuerySymbol.Z for w in vertices}


def build_settings(g: Graph, fourth_family_sign: str = "default") -> list[MeasurementSetting]:
    """
    Build the full TEST family: n generators, |T| triangles, then four D settings per vertex.

    Args:
        g: Graph with a triangle cover and designated neighbors
        fourth_family_sign: "default" or "paper-literal"

    Returns:
        Settings in a fixed order (generators, triangles, per-vertex D settings)

    Raises:
        TriangleCoverError: If some vertex lies in no triangle
        ValueError: If protocol data is missing or the sign rule is unknown
    """
    if fourth_family_sign not in FOURTH_FAMILY_SIGN_RULES:
        raise ValueError(
            f"Unknown fourth_family_sign {fourth_family_sign!r}; expected one of {FOURTH_FAMILY_SIGN_RULES}"
        )
    cover, designated = g.require_protocol_data()
    literal = fourth_family_sign == "paper-literal"

    settings = [
        MeasurementSetting(
            family=SettingFamily.GENERATOR,
            anchor=(v,),
            assignment={**_z_on(g.neighbors(v)), v: QuerySymbol.X},
            sign=1,
            honest_expectation=1.0,
        )
        for v in range(g.n)
    ]

    for tri in cover:
        tau = characteristic_vector(g.n, tri)
        z_support = np.flatnonzero(adjacency_image(g, tau))
        if set(z_support) & set(tri):
            raise ValueError(f"Triangle {tri} has overlapping X and Z supports")
        settings.append(
            MeasurementSetting(
                family=SettingFamily.TRIANGLE,
                anchor=tuple(tri),
                assignment={**_z_on(z_support), **{w: QuerySymbol.X for w in tri}},
                sign=stabilizer_sign(g, tau),
                honest_expectation=1.0,
            )
        )

    for v in range(g.n):
        u = designated[v]
        z_type = _z_on(g.neighbors(v))
        x_type = {**_z_on(w for w in g.neighbors(u) if w != v), u: QuerySymbol.X}
        x_expectation = -INV_SQRT2 if literal else INV_SQRT2
        settings.extend([
            MeasurementSetting(SettingFamily.D_PLUS_Z, (v,), {**z_type, v: QuerySymbol.DPLUS}, 1, INV_SQRT2),
            MeasurementSetting(SettingFamily.D_MINUS_Z, (v,), {**z_type, v: QuerySymbol.DMINUS}, 1, INV_SQRT2),
            MeasurementSetting(
                SettingFamily.D_PLUS_X, (v, u), {**x_type, v: QuerySymbol.DPLUS},
                -1 if literal else 1, x_expectation,
            ),
            MeasurementSetting(
                SettingFamily.D_MINUS_X, (v, u), {**x_type, v: QuerySymbol.DMINUS},
                1 if literal else -1, x_expectation,
            ),
        ])

    logger.debug(f"Built {len(settings)} settings for {g} (fourth family: {fourth_family_sign})")
    return settings


def setting_operator(strategy: ProverStrategy, setting: MeasurementSetting) -> SettingOperator:
    """The strategy's observable product for a setting, with the setting's sign."""
    return SettingOperator(
        factors={v: strategy.observable(v, s) for v, s in setting.assignment.items()},
        sign=setting.sign,
    )


def setting_expectation(strategy: ProverStrategy, setting: MeasurementSetting) -> float:
    """
    Exact mean of the combined outcome sign · ∏ responses.

    Independent outcome flips scale each measured factor by (1 - 2ε).
    """
    value = expectation(strategy.joint_state, setting_operator(strategy, setting))
    if strategy.flip_probability:
        value *= (1 - 2 * strategy.flip_probability) ** len(setting.assignment)
    return value


def honest_test_acceptance(g: Graph) -> float:
    """(n + |T| + 4n·(1 + 1/√2)/2) / (5n + |T|) for the default sign convention."""
    cover, _ = g.require_protocol_data()
    n, t = g.n, len(cover)
    return (n + t + 4 * n * (1 + INV_SQRT2) / 2) / (5 * n + t)


def exact_test_acceptance(strategy: ProverStrategy, settings: Sequence[MeasurementSetting]) -> float:
    """Mean over settings of (1 + E)/2 with E the exact combined expectation."""
    if not settings:
        raise ValueError("Setting list is empty")
    value = float(np.mean([(1 + setting_expectation(strategy, s)) / 2 for s in settings]))
    return min(max(value, 0.0), 1.0)


def family_acceptance(
    strategy: ProverStrategy, settings: Sequence[MeasurementSetting]
) -> dict[SettingFamily, float]:
    """Exact acceptance averaged within each setting family present."""
    grouped: dict[SettingFamily, list[float]] = {}
    for s in settings:
        grouped.setdefault(s.family, []).append((1 + setting_expectation(strategy, s)) / 2)
    return {family: float(np.mean(values)) for family, values in grouped.items()}


def uncovered_queries(
    settings: Sequence[MeasurementSetting],
    reachable: Mapping[int, Iterable[QuerySymbol]],
) -> list[tuple[int, QuerySymbol]]:
    """
    (vertex, symbol) pairs a pattern may send that no TEST setting ever sends.

    An empty result means a prover cannot tell CALCULATE from TEST by its query alone.
    """
    tested = {(v, s) for setting in settings for v, s in setting.assignment.items()}
    missing = [
        (v, QuerySymbol(s))
        for v in sorted(reachable)
        for s in sorted(set(reachable[v]), key=lambda sym: sym.value)
        if (v, QuerySymbol(s)) not in tested
    ]
    return missing

"""
Built-in patterns with analytically known honest acceptance.

    generator-parity   X on 0, Z elsewhere; product over {0} ∪ N(0) is +1      honest 1
    triangle-parity    X on the first cover triangle τ, Z elsewhere;
                       product over τ ∪ Aτ equals the triangle sign             honest 1
    d-plus-parity      D+ on 0, Z elsewhere; product over {0} ∪ N(0) is +1     honest (1 + 1/√2)/2
    adaptive-demo      Z on 0 first, then D+ on w = u(0) if a_0 = +1 else D-,
                       Z elsewhere; product over {w} ∪ N(w) is +1             honest (1 + 1/√2)/2
    coin               X on 0, Z elsewhere; ACCEPT iff a_0 = +1                honest 1/2

In adaptive-demo the D- branch undoes the Z byproduct that a -1 outcome on
vertex 0 leaves on its neighbors, so the corrected product measures
(Z_0 X_w + Z_w) Z^{N(w) minus 0} / √2.
"""

from typing import Callable
import logging
import math

import numpy as np

from src.core.errors import PatternError
from src.graph.lattice import Graph, adjacency_image, characteristic_vector, stabilizer_sign
from src.mbqc.pattern import MeasurementPattern, ParityChoice, parity_pattern
from src.provers.symbols import QuerySymbol

logger = logging.getLogger(__name__)

D_ACCEPTANCE = (1 + 1 / math.sqrt(2)) / 2


def _needs_neighbor(g: Graph, name: str) -> None:
    if not g.neighbors(0):
        raise PatternError(f"Pattern {name!r} needs vertex 0 to have a neighbor")


def generator_parity(g: Graph) -> MeasurementPattern:
    return parity_pattern(
        "generator-parity",
        order=range(g.n),
        bases={0: QuerySymbol.X},
        default=QuerySymbol.Z,
        result_vertices=(0, *g.neighbors(0)),
        result_equals=1,
        honest_acceptance=1.0,
        description="stabilizer generator S_0 read off as a parity",
    )


def triangle_parity(g: Graph) -> MeasurementPattern:
    cover, _ = g.require_protocol_data()
    tri = cover[0]
    tau = characteristic_vector(g.n, tri)
    z_support = [int(w) for w in np.flatnonzero(adjacency_image(g, tau))]
    return parity_pattern(
        "triangle-parity",
        order=range(g.n),
        bases={w: QuerySymbol.X for w in tri},
        default=QuerySymbol.Z,
        result_vertices=(*tri, *z_support),
        result_equals=stabilizer_sign(g, tau),
        honest_acceptance=1.0,
        description=f"triangle stabilizer on {tri}",
    )


def d_plus_parity(g: Graph) -> MeasurementPattern:
    _needs_neighbor(g, "d-plus-parity")
    return parity_pattern(
        "d-plus-parity",
        order=range(g.n),
        bases={0: QuerySymbol.DPLUS},
        default=QuerySymbol.Z,
        result_vertices=(0, *g.neighbors(0)),
        result_equals=1,
        honest_acceptance=D_ACCEPTANCE,
        description="(X+Z)/√2 on vertex 0 against Z on its neighbors",
    )


def adaptive_demo(g: Graph) -> MeasurementPattern:
    _needs_neighbor(g, "adaptive-demo")
    w = g.designated_neighbor[0] if g.designated_neighbor is not None else g.neighbors(0)[0]
    order = (0, w, *(v for v in range(g.n) if v not in (0, w)))
    return parity_pattern(
        "adaptive-demo",
        order=order,
        bases={
            0: QuerySymbol.Z,
            w: ParityChoice(vertices=(0,), even=QuerySymbol.DPLUS, odd=QuerySymbol.DMINUS),
        },
        default=QuerySymbol.Z,
        result_vertices=(w, *g.neighbors(w)),
        result_equals=1,
        honest_acceptance=D_ACCEPTANCE,
        description=f"basis of vertex {w} corrected by the outcome of vertex 0",
    )


def coin(g: Graph) -> MeasurementPattern:
    _needs_neighbor(g, "coin")
    return parity_pattern(
        "coin",
        order=range(g.n),
        bases={0: QuerySymbol.X},
        default=QuerySymbol.Z,
        result_vertices=(0,),
        result_equals=1,
        honest_acceptance=0.5,
        description="unbiased X outcome on vertex 0",
    )


BUILTIN_PATTERNS: dict[str, Callable[[Graph], MeasurementPattern]] = {
    "generator-parity": generator_parity,
    "triangle-parity": triangle_parity,
    "d-plus-parity": d_plus_parity,
    "adaptive-demo": adaptive_demo,
    "coin": coin,
}


def builtin_pattern(name: str, g: Graph) -> MeasurementPattern:
    """
    Build one named built-in pattern for g.

    Raises:
        PatternError: If the name is unknown or g lacks what the pattern needs
    """
    try:
        factory = BUILTIN_PATTERNS[name]
    except KeyError:
        raise PatternError(f"Unknown built-in pattern {name!r}; choose from {sorted(BUILTIN_PATTERNS)}")
    return factory(g)


def builtin_patterns(g: Graph) -> dict[str, MeasurementPattern]:
    """Every built-in applicable to g, keyed by name."""
    patterns = {}
    for name, factory in BUILTIN_PATTERNS.items():
        try:
            patterns[name] = factory(g)
        except (PatternError, ValueError) as e:
            logger.debug(f"Skipping built-in {name!r} for {g}: {e}")
    return patterns

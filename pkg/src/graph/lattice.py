"""
Graphs underlying the protocol.

Vertices are integers 0..n-1. Triangular lattices are numbered row-major:
vertex (r, c) has index r * cols + c. Rows are joined vertically, and each
cell gets one diagonal whose direction alternates with the row parity:

    even r:  (r, c+1) -- (r+1, c)
    odd r:   (r, c)   -- (r+1, c+1)

so odd rows sit half a cell to the right of even rows. A single row is
read as the zig-zag strip (vertex i joined to i+1 and i+2), which is the
two-row lattice listed in zig-zag order.

Usage:
    from src.graph.lattice import build_triangular_lattice, neighborhood

    g = build_triangular_lattice(4, 5)
    nbrs = neighborhood(g, 7)
"""

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Optional
import logging

import networkx as nx
import numpy as np
import numpy.typing as npt

from src.core.errors import TriangleCoverError

logger = logging.getLogger(__name__)

Triangle = tuple[int, int, int]
BitVector = npt.NDArray[np.uint8]


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Simple undirected graph plus the protocol data attached to it.

    `triangle_cover` and `designated_neighbor` are None when they have not
    been populated (e.g. triangle-free graphs used only for state preparation).
    """

    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: npt.NDArray[np.uint8]
    triangle_cover: Optional[tuple[Triangle, ...]] = None
    designated_neighbor: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"Graph needs at least one vertex, got n={self.n}")

        adjacency = np.asarray(self.adjacency, dtype=np.uint8)
        if adjacency.shape != (self.n, self.n):
            raise ValueError(f"Adjacency shape {adjacency.shape} does not match n={self.n}")
        if not np.array_equal(adjacency, adjacency.T):
            raise ValueError("Adjacency matrix must be symmetric")
        if np.any(np.diag(adjacency)):
            raise ValueError("Adjacency matrix must have zero diagonal")

        expected = np.zeros_like(adjacency)
        for u, v in self.edges:
            self._require_in_range((u, v), f"Edge ({u}, {v})")
            expected[u, v] = expected[v, u] = 1
        if not np.array_equal(expected, adjacency):
            raise ValueError("Edge set and adjacency matrix disagree")

        adjacency.setflags(write=False)
        object.__setattr__(self, "adjacency", adjacency)

        if self.triangle_cover is not None:
            covered: set[int] = set()
            for tri in self.triangle_cover:
                if len(tri) != 3:
                    raise ValueError(f"Cover entry {tri} is not a vertex triple")
                self._require_in_range(tri, f"Cover triangle {tri}")
                a, b, c = tri
                if not (adjacency[a, b] and adjacency[b, c] and adjacency[a, c]):
                    raise ValueError(f"Triple {tri} is not a triangle of the graph")
                covered.update(tri)
            missing = set(range(self.n)) - covered
            if missing:
                raise TriangleCoverError(missing)

        if self.designated_neighbor is not None:
            if len(self.designated_neighbor) != self.n:
                raise ValueError("designated_neighbor must list one neighbor per vertex")
            self._require_in_range(self.designated_neighbor, "Designated neighbor")
            for v, u in enumerate(self.designated_neighbor):
                if not adjacency[v, u]:
                    raise ValueError(f"Designated neighbor {u} is not adjacent to {v}")

    def _require_in_range(self, vertices: Iterable[int], what: str) -> None:
        bad = [int(x) for x in vertices if not 0 <= int(x) < self.n]
        if bad:
            raise ValueError(f"{what} names vertices {bad} outside 0..{self.n - 1}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.triangle_cover == other.triangle_cover
            and self.designated_neighbor == other.designated_neighbor
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.triangle_cover, self.designated_neighbor))

    def __repr__(self) -> str:
        cover = "none" if self.triangle_cover is None else len(self.triangle_cover)
        return f"Graph(n={self.n}, edges={len(self.edges)}, triangles={cover})"

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Sorted neighbors of v."""
        _check_vertex(self, v)
        return tuple(int(u) for u in np.flatnonzero(self.adjacency[v]))

    @property
    def has_protocol_data(self) -> bool:
        return self.triangle_cover is not None and self.designated_neighbor is not None

    def require_protocol_data(self) -> tuple[tuple[Triangle, ...], tuple[int, ...]]:
        """Return (cover, designated neighbors) or raise if either is missing."""
        if self.triangle_cover is None:
            find_triangle_cover(self)  # raises with the uncoverable vertices
            raise ValueError("Graph has no triangle cover attached")
        if self.designated_neighbor is None:
            raise ValueError("Graph has no designated neighbors (some vertex is isolated)")
        return self.triangle_cover, self.designated_neighbor

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(sorted(self.edges))
        return graph


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise ValueError(f"Vertex {v} out of range for graph with n={g.n}")


def _normalize_edges(n: int, edges: Iterable[Iterable[int]]) -> frozenset[tuple[int, int]]:
    normalized = set()
    for edge in edges:
        u, v = (int(x) for x in edge)
        if u == v:
            raise ValueError(f"Self-loop on vertex {u} is not allowed")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"Edge ({u}, {v}) out of range for n={n}")
        normalized.add((min(u, v), max(u, v)))
    return frozenset(normalized)


def smallest_neighbor_rule(adjacency: np.ndarray) -> Optional[tuple[int, ...]]:
    """Designated neighbor u(v) = smallest-index neighbor; None if a vertex is isolated."""
    chosen = []
    for row in adjacency:
        nbrs = np.flatnonzero(row)
        if nbrs.size == 0:
            return None
        chosen.append(int(nbrs[0]))
    return tuple(chosen)


def graph_from_edges(
    n: int,
    edges: Iterable[Iterable[int]],
    triangles: Optional[Iterable[Iterable[int]]] = None,
    designated_neighbors: Optional[Iterable[int]] = None,
    require_cover: bool = False,
) -> Graph:
    """
    Build a Graph from an edge list, filling in protocol data when possible.

    Args:
        n: Vertex count
        edges: Unordered vertex pairs
        triangles: Explicit triangle cover; searched for when omitted
        designated_neighbors: Explicit u(v); smallest-neighbor rule when omitted
        require_cover: Raise TriangleCoverError instead of leaving the cover empty

    Returns:
        Validated Graph
    """
    edge_set = _normalize_edges(n, edges)
    adjacency = np.zeros((n, n), dtype=np.uint8)
    for u, v in edge_set:
        adjacency[u, v] = adjacency[v, u] = 1

    bare = Graph(n=n, edges=edge_set, adjacency=adjacency)

    cover: Optional[tuple[Triangle, ...]]
    if triangles is not None:
        cover = tuple(tuple(sorted(int(x) for x in tri)) for tri in triangles)  # type: ignore[misc]
    else:
        try:
            cover = tuple(find_triangle_cover(bare))
        except TriangleCoverError:
            if require_cover:
                raise
            logger.debug(f"No triangle cover for {bare}; leaving it unset")
            cover = None

    if designated_neighbors is not None:
        neighbors: Optional[tuple[int, ...]] = tuple(int(u) for u in designated_neighbors)
    else:
        neighbors = smallest_neighbor_rule(adjacency)

    return Graph(
        n=n,
        edges=edge_set,
        adjacency=adjacency,
        triangle_cover=cover,
        designated_neighbor=neighbors,
    )


def build_triangular_lattice(rows: int, cols: int, require_cover: bool = True) -> Graph:
    """
    Build the triangular lattice with rows * cols vertices.

    Raises:
        ValueError: If rows or cols is not positive
        TriangleCoverError: If require_cover and some vertex lies in no triangle
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"Lattice dimensions must be positive, got ({rows}, {cols})")

    lattice = nx.Graph()
    lattice.add_nodes_from(range(rows * cols))

    if rows == 1:
        for i in range(cols):
            for j in (i + 1, i + 2):
                if j < cols:
                    lattice.add_edge(i, j)
    else:
        def index(r: int, c: int) -> int:
            return r * cols + c

        for r in range(rows):
            for c in range(cols):
                if c + 1 < cols:
                    lattice.add_edge(index(r, c), index(r, c + 1))
                if r + 1 < rows:
                    lattice.add_edge(index(r, c), index(r + 1, c))
                    if c + 1 < cols:
                        if r % 2 == 0:
                            lattice.add_edge(index(r, c + 1), index(r + 1, c))
                        else:
                            lattice.add_edge(index(r, c), index(r + 1, c + 1))

    g = graph_from_edges(rows * cols, lattice.edges(), require_cover=require_cover)
    logger.debug(f"Built triangular lattice {rows}x{cols}: {g}")
    return g


def characteristic_vector(n: int, vertices: Iterable[int]) -> BitVector:
    """Bit vector with the given vertices set."""
    bits = np.zeros(n, dtype=np.uint8)
    for v in vertices:
        if not 0 <= v < n:
            raise ValueError(f"Vertex {v} out of range for n={n}")
        bits[v] = 1
    return bits


def neighborhood(g: Graph, v: int) -> BitVector:
    """Characteristic vector of N(v), i.e. A·1_v."""
    _check_vertex(g, v)
    return g.adjacency[:, v].astype(np.uint8).copy()


def adjacency_image(g: Graph, t: BitVector) -> BitVector:
    """A·t over GF(2)."""
    t = _check_bitvector(g, t)
    return ((g.adjacency.astype(np.int64) @ t) % 2).astype(np.uint8)


def enumerate_triangles(g: Graph) -> list[Triangle]:
    """All triangles of g as sorted triples, lexicographically ordered."""
    triangles = [
        tuple(sorted(clique))
        for clique in nx.enumerate_all_cliques(g.to_networkx())
        if len(clique) == 3
    ]
    return sorted(triangles)  # type: ignore[return-value]


def find_triangle_cover(g: Graph) -> list[Triangle]:
    """
    Greedy lexicographic triangle cover.

    A triangle is kept when it covers at least one vertex not yet covered.

    Raises:
        TriangleCoverError: Listing every vertex that lies in no triangle
    """
    triangles = enumerate_triangles(g)
    in_some_triangle = {v for tri in triangles for v in tri}
    uncoverable = set(range(g.n)) - in_some_triangle
    if uncoverable:
        raise TriangleCoverError(uncoverable)

    covered: set[int] = set()
    cover: list[Triangle] = []
    for tri in triangles:
        if not covered.issuperset(tri):
            cover.append(tri)
            covered.update(tri)
        if len(covered) == g.n:
            break
    return cover


def stabilizer_sign(g: Graph, t: BitVector) -> int:
    """(-1)^{t·At/2}, i.e. -1 to the number of edges inside the support of t."""
    t = _check_bitvector(g, t).astype(np.int64)
    quadratic = int(t @ g.adjacency.astype(np.int64) @ t)
    return -1 if (quadratic // 2) % 2 else 1


def stabilizer_elements(g: Graph) -> Iterator[tuple[BitVector, BitVector, int]]:
    """
    Every element (t, At, sign) of the stabilizer group, sign · X^t Z^{At}.

    There are 2^n of them, so this is meant for small graphs.
    """
    for bits in product((0, 1), repeat=g.n):
        t = np.array(bits, dtype=np.uint8)
        yield t, adjacency_image(g, t), stabilizer_sign(g, t)


def stabilizer_group(g: Graph) -> list[tuple[BitVector, BitVector, int]]:
    return list(stabilizer_elements(g))


def _check_bitvector(g: Graph, t: npt.ArrayLike) -> np.ndarray:
    bits = np.asarray(t)
    if bits.shape != (g.n,):
        raise ValueError(f"Bit vector has length {bits.shape}, graph has n={g.n}")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("Bit vector entries must be 0 or 1")
    return bits.astype(np.uint8)

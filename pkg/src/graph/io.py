"""
Graph spec files.

Usage:
    from src.graph.io import load_graph, save_graph

    g = load_graph("configs/k3.json")
    save_graph(g, "out/k3.json")
"""

from pathlib import Path
from typing import Union
import logging

from pydantic import ValidationError

from src.core.errors import ConfigError
from src.graph.lattice import Graph, build_triangular_lattice, graph_from_edges
from src.models.specs import GraphSpec

logger = logging.getLogger(__name__)


def graph_from_spec(spec: GraphSpec) -> Graph:
    """Build a Graph from a validated spec; explicit cover/neighbors override the defaults."""
    if spec.lattice is not None:
        lattice = build_triangular_lattice(spec.lattice.rows, spec.lattice.cols, require_cover=False)
        if spec.triangles is None and spec.designated_neighbors is None:
            return lattice
        return graph_from_edges(
            lattice.n,
            lattice.edges,
            triangles=spec.triangles if spec.triangles is not None else lattice.triangle_cover,
            designated_neighbors=spec.designated_neighbors,
        )
    return graph_from_edges(
        spec.n,
        spec.edges or [],
        triangles=spec.triangles,
        designated_neighbors=spec.designated_neighbors,
    )


def graph_to_spec(g: Graph) -> GraphSpec:
    """Explicit spec (edges, cover, neighbors) that rebuilds an equal Graph."""
    return GraphSpec(
        n=g.n,
        edges=sorted(g.edges),
        triangles=list(g.triangle_cover) if g.triangle_cover is not None else None,
        designated_neighbors=list(g.designated_neighbor) if g.designated_neighbor is not None else None,
    )


def load_graph(path: Union[str, Path]) -> Graph:
    """
    Load and validate a graph spec file.

    Raises:
        ConfigError: If the file is missing, not JSON, or does not describe a valid graph
    """
    path = Path(path)
    try:
        spec = GraphSpec.model_validate_json(path.read_text())
        g = graph_from_spec(spec)
    except FileNotFoundError as e:
        raise ConfigError(f"Graph file not found: {path}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read graph file {path}: {e}") from e
    except (ValidationError, ValueError) as e:
        raise ConfigError(f"Invalid graph spec {path}: {e}") from e
    logger.info(f"Loaded {g} from {path}")
    return g


def save_graph(g: Graph, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(graph_to_spec(g).model_dump_json(exclude_none=True, indent=2))


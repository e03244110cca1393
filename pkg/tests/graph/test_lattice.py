"""
Unit tests for graphs and triangular lattices.

Tests lattice construction, neighborhoods, triangle covers, designated
neighbors, stabilizer signs and the stabilizer group.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import TriangleCoverError
from src.graph.lattice import (
    Graph,
    adjacency_image,
    build_triangular_lattice,
    characteristic_vector,
    enumerate_triangles,
    find_triangle_cover,
    graph_from_edges,
    neighborhood,
    stabilizer_group,
    stabilizer_sign,
)


class TestTriangularLattice:
    """Test lattice construction"""

    def test_single_row_of_three_is_triangle(self, k3):
        """A 1x3 lattice is the complete graph K3"""
        assert k3.n == 3
        assert k3.edges == {(0, 1), (0, 2), (1, 2)}
        assert k3.triangle_cover == ((0, 1, 2),)
        assert k3.designated_neighbor == (1, 0, 0)

    def test_two_by_three_edges(self, lattice_2x3):
        """Rows, columns and one alternating diagonal per cell"""
        assert lattice_2x3.edges == {
            (0, 1), (1, 2), (3, 4), (4, 5),
            (0, 3), (1, 4), (2, 5),
            (1, 3), (2, 4),
        }

    def test_two_by_three_cover_is_greedy_lexicographic(self, lattice_2x3):
        """(1, 3, 4) adds no new vertex, so it is skipped"""
        assert lattice_2x3.triangle_cover == ((0, 1, 3), (1, 2, 4), (2, 4, 5))

    def test_four_by_five(self):
        """The 20-vertex lattice is covered and every vertex has neighbors"""
        g = build_triangular_lattice(4, 5)

        assert g.n == 20
        covered = {v for tri in g.triangle_cover for v in tri}
        assert covered == set(range(20))
        assert all(g.neighbors(v) for v in range(20))

    def test_two_vertex_row_has_no_cover(self):
        """A 1x2 lattice is a single edge and cannot be covered"""
        with pytest.raises(TriangleCoverError) as exc_info:
            build_triangular_lattice(1, 2)

        assert exc_info.value.uncovered == [0, 1]

    def test_single_vertex_has_no_cover(self):
        """A lone vertex lies in no triangle"""
        with pytest.raises(TriangleCoverError):
            build_triangular_lattice(1, 1)

    def test_uncovered_lattice_allowed_on_request(self):
        """require_cover=False leaves the cover unset"""
        g = build_triangular_lattice(1, 2, require_cover=False)

        assert g.triangle_cover is None
        assert not g.has_protocol_data

    def test_non_positive_dimensions_rejected(self):
        """Zero rows is a usage error"""
        with pytest.raises(ValueError, match="positive"):
            build_triangular_lattice(0, 3)

    def test_rebuild_is_equal(self):
        """Construction is deterministic"""
        assert build_triangular_lattice(3, 4) == build_triangular_lattice(3, 4)
        assert hash(build_triangular_lattice(3, 4)) == hash(build_triangular_lattice(3, 4))

    def test_networkx_view(self, lattice_2x3):
        """The networkx copy has the same edges"""
        nx_graph = lattice_2x3.to_networkx()

        assert nx_graph.number_of_nodes() == 6
        assert nx_graph.number_of_edges() == len(lattice_2x3.edges)

    @given(rows=st.integers(min_value=2, max_value=5), cols=st.integers(min_value=2, max_value=5))
    @settings(max_examples=25, deadline=None)
    def test_every_lattice_is_covered(self, rows, cols):
        """Every cell is split into two triangles, so every vertex is covered"""
        g = build_triangular_lattice(rows, cols)

        covered = {v for tri in g.triangle_cover for v in tri}
        assert covered == set(range(rows * cols))
        for v, u in enumerate(g.designated_neighbor):
            assert u in g.neighbors(v)
            assert u == min(g.neighbors(v))

    @given(rows=st.integers(min_value=1, max_value=5), cols=st.integers(min_value=3, max_value=5))
    @settings(max_examples=25, deadline=None)
    def test_neighborhoods_are_symmetric(self, rows, cols):
        """u in N(v) iff v in N(u)"""
        g = build_triangular_lattice(rows, cols)

        for v in range(g.n):
            for u in g.neighbors(v):
                assert v in g.neighbors(u)


class TestNeighborhood:
    """Test neighborhood vectors"""

    def test_triangle(self, k3):
        """N(0) in K3 is {1, 2}"""
        assert neighborhood(k3, 0).tolist() == [0, 1, 1]

    def test_single_edge(self, single_edge):
        """N(0) on one edge is {1}"""
        assert neighborhood(single_edge, 0).tolist() == [0, 1]

    def test_path_middle(self):
        """The middle of a path sees both ends"""
        path = graph_from_edges(3, [(0, 1), (1, 2)])

        assert neighborhood(path, 1).tolist() == [1, 0, 1]

    def test_out_of_range_vertex(self, k3):
        """Vertices outside 0..n-1 are rejected"""
        with pytest.raises(ValueError, match="out of range"):
            neighborhood(k3, 3)

    def test_adjacency_image_over_gf2(self, k3):
        """A·1 on K3 is 0 because every vertex has two neighbors"""
        assert adjacency_image(k3, np.ones(3, dtype=np.uint8)).tolist() == [0, 0, 0]

    def test_characteristic_vector(self):
        assert characteristic_vector(4, [0, 3]).tolist() == [1, 0, 0, 1]


class TestTriangleCover:
    """Test triangle enumeration and covering"""

    def test_disjoint_triangles(self, two_triangles):
        """Each component contributes its own triangle"""
        assert find_triangle_cover(two_triangles) == [(0, 1, 2), (3, 4, 5)]

    def test_path_is_uncoverable(self):
        """Every vertex of a path is reported"""
        path = graph_from_edges(3, [(0, 1), (1, 2)])

        with pytest.raises(TriangleCoverError) as exc_info:
            find_triangle_cover(path)

        assert exc_info.value.uncovered == [0, 1, 2]

    def test_only_pendant_vertex_reported(self):
        """A triangle with one pendant vertex reports just the pendant"""
        g = graph_from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])

        with pytest.raises(TriangleCoverError) as exc_info:
            find_triangle_cover(g)

        assert exc_info.value.uncovered == [3]

    def test_require_cover_raises(self):
        """graph_from_edges can insist on a cover"""
        with pytest.raises(TriangleCoverError):
            graph_from_edges(2, [(0, 1)], require_cover=True)

    def test_enumerate_triangles_sorted(self, lattice_2x3):
        assert enumerate_triangles(lattice_2x3) == [(0, 1, 3), (1, 2, 4), (1, 3, 4), (2, 4, 5)]


class TestGraphValidation:
    """Test Graph invariants"""

    def test_non_triangle_in_cover_rejected(self):
        """Cover entries must be triangles of the graph"""
        with pytest.raises(ValueError, match="not a triangle"):
            graph_from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)], triangles=[(0, 1, 3)])

    def test_designated_neighbor_must_be_adjacent(self):
        with pytest.raises(ValueError, match="not adjacent"):
            graph_from_edges(3, [(0, 1), (1, 2), (0, 2)], designated_neighbors=[1, 0, 2])

    @pytest.mark.parametrize("neighbors", [[-1, 0, 0], [1, 3, 0], [1, 2, -3]])
    def test_designated_neighbor_out_of_range(self, neighbors):
        """Negative indices must not wrap around to the last vertex"""
        with pytest.raises(ValueError, match="outside 0..2"):
            graph_from_edges(3, [(0, 1), (1, 2), (0, 2)], designated_neighbors=neighbors)

    @pytest.mark.parametrize("triangle", [(0, 1, 7), (-1, 0, 1)])
    def test_cover_vertex_out_of_range(self, triangle):
        with pytest.raises(ValueError, match="outside 0..2"):
            graph_from_edges(3, [(0, 1), (1, 2), (0, 2)], triangles=[triangle])

    def test_cover_entry_must_be_a_triple(self):
        with pytest.raises(ValueError, match="vertex triple"):
            graph_from_edges(3, [(0, 1), (1, 2), (0, 2)], triangles=[(0, 1)])

    def test_edge_out_of_range_in_direct_construction(self):
        with pytest.raises(ValueError, match="outside 0..1"):
            Graph(n=2, edges=frozenset({(0, 5)}), adjacency=np.zeros((2, 2), dtype=np.uint8))

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="Self-loop"):
            graph_from_edges(2, [(0, 0)])

    def test_asymmetric_adjacency_rejected(self):
        """Graph checks the adjacency matrix directly"""
        adjacency = np.array([[0, 1], [0, 0]], dtype=np.uint8)

        with pytest.raises(ValueError, match="symmetric"):
            Graph(n=2, edges=frozenset({(0, 1)}), adjacency=adjacency)

    def test_isolated_vertex_has_no_designated_neighbors(self):
        g = graph_from_edges(4, [(0, 1), (1, 2), (0, 2)])

        assert g.designated_neighbor is None
        with pytest.raises(TriangleCoverError):
            g.require_protocol_data()


class TestStabilizerSign:
    """Test (-1)^{t·At/2}"""

    def test_empty_support(self, k3):
        assert stabilizer_sign(k3, np.zeros(3, dtype=np.uint8)) == 1

    def test_whole_triangle(self, k3):
        """Three edges inside the support give -1"""
        assert stabilizer_sign(k3, np.ones(3, dtype=np.uint8)) == -1

    def test_single_edge(self, single_edge):
        assert stabilizer_sign(single_edge, np.ones(2, dtype=np.uint8)) == -1

    def test_every_lattice_triangle_is_negative(self):
        """Any triangle support contains exactly three edges"""
        g = build_triangular_lattice(4, 5)

        for tri in g.triangle_cover:
            assert stabilizer_sign(g, characteristic_vector(g.n, tri)) == -1

    def test_non_binary_vector_rejected(self, k3):
        with pytest.raises(ValueError, match="0 or 1"):
            stabilizer_sign(k3, np.array([0, 2, 1]))


class TestStabilizerGroup:
    """Test stabilizer-group enumeration"""

    def test_group_size(self, lattice_2x3):
        assert len(stabilizer_group(lattice_2x3)) == 2**6

    def test_triangle_element(self, k3):
        """t = 111 on K3 gives -X X X"""
        elements = {tuple(t.tolist()): (tuple(at.tolist()), sign) for t, at, sign in stabilizer_group(k3)}

        assert elements[(1, 1, 1)] == ((0, 0, 0), -1)
        assert elements[(1, 0, 0)] == ((0, 1, 1), 1)

    def test_identity_element(self, k3):
        t, at, sign = stabilizer_group(k3)[0]

        assert not np.any(t) and not np.any(at) and sign == 1

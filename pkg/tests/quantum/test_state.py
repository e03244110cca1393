"""
Unit tests for the dense state-vector simulator.

Tests graph-state amplitudes, expectations, projective measurement,
controlled operations and fidelities.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import CapacityExceeded
from src.graph.lattice import build_triangular_lattice, graph_from_edges, stabilizer_group
from src.quantum.operators import IDENTITY, PAULI_X, PAULI_Z, xz_plane_observable
from src.quantum.state import (
    LocalObservable,
    PureState,
    SettingOperator,
    apply_controlled,
    apply_operator,
    apply_word,
    expectation,
    fidelity,
    make_graph_state,
    measure,
    project,
    tensor_product,
)

PLUS = np.array([1, 1]) / math.sqrt(2)
MINUS = np.array([1, -1]) / math.sqrt(2)
ZERO = np.array([1, 0])
ONE = np.array([0, 1])


def stabilizer_factors(t, at):
    """Per-site matrices of X^t Z^{At}, X to the left."""
    factors = {}
    for v, (x_bit, z_bit) in enumerate(zip(t, at)):
        matrix = IDENTITY
        if x_bit:
            matrix = PAULI_X @ matrix
        if z_bit:
            matrix = matrix @ PAULI_Z
        if x_bit or z_bit:
            factors[v] = matrix
    return factors


class TestGraphState:
    """Test |G⟩ preparation"""

    def test_single_edge_amplitudes(self, single_edge):
        """|G⟩ = (|00⟩ + |01⟩ + |10⟩ - |11⟩)/2"""
        psi = make_graph_state(single_edge)

        np.testing.assert_allclose(psi.amplitudes, np.array([1, 1, 1, -1]) / 2)

    def test_triangle_amplitudes(self, k3):
        """Sign is -1 to the number of edges inside the support of x"""
        psi = make_graph_state(k3)

        expected = np.array([1, 1, 1, -1, 1, -1, -1, -1]) / math.sqrt(8)
        np.testing.assert_allclose(psi.amplitudes, expected)

    def test_edgeless_graph_is_uniform(self):
        psi = make_graph_state(graph_from_edges(2, []))

        np.testing.assert_allclose(psi.amplitudes, np.full(4, 0.5))

    def test_qubit_cap(self, k3):
        with pytest.raises(CapacityExceeded, match="qubit cap"):
            make_graph_state(k3, qubit_cap=2)

    @pytest.mark.parametrize("rows,cols", [(1, 3), (2, 3), (3, 3), (3, 4), (3, 5)])
    def test_generators_have_expectation_one(self, rows, cols):
        """⟨S_v⟩ = 1 for every vertex of lattices up to 15 qubits"""
        g = build_triangular_lattice(rows, cols)
        psi = make_graph_state(g)

        for v in range(g.n):
            factors = {w: LocalObservable(w, PAULI_Z) for w in g.neighbors(v)}
            factors[v] = LocalObservable(v, PAULI_X)
            assert expectation(psi, SettingOperator(factors)) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("rows,cols", [(1, 3), (2, 3), (3, 3), (3, 4), (3, 5)])
    def test_triangle_stabilizers_have_expectation_one(self, rows, cols):
        """-X^τ Z^{Aτ} stabilizes |G⟩ for every cover triangle"""
        g = build_triangular_lattice(rows, cols)
        psi = make_graph_state(g)

        for tri in g.triangle_cover:
            tau = np.zeros(g.n, dtype=np.uint8)
            tau[list(tri)] = 1
            at = (g.adjacency.astype(int) @ tau) % 2
            factors = {w: LocalObservable(w, PAULI_Z) for w in np.flatnonzero(at)}
            factors.update({w: LocalObservable(w, PAULI_X) for w in tri})
            assert expectation(psi, SettingOperator(factors, sign=-1)) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("edges,n", [
        ([(0, 1), (1, 2), (0, 2)], 3),
        ([(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)], 4),
        ([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], 6),
    ])
    def test_whole_stabilizer_group(self, edges, n):
        """sign · X^t Z^{At} has expectation 1 for all 2^n elements"""
        g = graph_from_edges(n, edges)
        psi = make_graph_state(g)

        for t, at, sign in stabilizer_group(g):
            value = np.vdot(psi.amplitudes, apply_operator(psi, stabilizer_factors(t, at), sign))
            assert value == pytest.approx(1.0, abs=1e-10)

    def test_xz_product_has_zero_expectation(self, k3):
        """⟨Z_v X_v⟩ = 0 on every vertex"""
        psi = make_graph_state(k3)

        for v in range(3):
            value = np.vdot(psi.amplitudes, apply_word(psi, [(v, PAULI_Z), (v, PAULI_X)]))
            assert abs(value) < 1e-10

    def test_d_plus_against_neighbors(self, k3):
        """⟨D+_v Z^{N(v)}⟩ = 1/√2"""
        psi = make_graph_state(k3)
        op = SettingOperator({
            0: LocalObservable(0, xz_plane_observable(math.pi / 4)),
            1: LocalObservable(1, PAULI_Z),
            2: LocalObservable(2, PAULI_Z),
        })

        assert expectation(psi, op) == pytest.approx(1 / math.sqrt(2), abs=1e-10)


class TestMeasurement:
    """Test projection and collapse"""

    def test_eigenstate_outcome_is_certain(self, rng):
        """Measuring X on |+⟩ always gives +1 and leaves the state alone"""
        psi = PureState.product([PLUS])
        obs = LocalObservable(0, PAULI_X)

        for _ in range(20):
            outcome, after = measure(psi, obs, rng)
            assert outcome == 1
            assert fidelity(after, psi) == pytest.approx(1.0)

    def test_unbiased_branch_probabilities(self):
        """X on |0⟩ gives ±1 with probability 1/2 each"""
        psi = PureState.product([ZERO])
        obs = LocalObservable(0, PAULI_X)

        p_plus, plus_state = project(psi, obs, 1)
        p_minus, minus_state = project(psi, obs, -1)

        assert p_plus == pytest.approx(0.5)
        assert p_minus == pytest.approx(0.5)
        np.testing.assert_allclose(plus_state.amplitudes, PLUS)
        np.testing.assert_allclose(minus_state.amplitudes, MINUS)

    def test_empty_branch(self):
        """Projecting |+⟩ onto X = -1 yields no state"""
        probability, state = project(PureState.product([PLUS]), LocalObservable(0, PAULI_X), -1)

        assert probability == 0.0
        assert state is None

    def test_invalid_outcome(self):
        with pytest.raises(ValueError, match="±1"):
            project(PureState.product([PLUS]), LocalObservable(0, PAULI_X), 0)

    def test_triangle_x_parity(self, k3):
        """Sequential X on all of K3 multiplies to -1 whatever the draws"""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            psi = make_graph_state(k3)
            product = 1
            for v in range(3):
                outcome, psi = measure(psi, LocalObservable(v, PAULI_X), rng)
                product *= outcome
            assert product == -1

    @given(
        angle=st.floats(min_value=-math.pi, max_value=math.pi),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_branches_sum_to_one(self, angle, seed):
        """Outcome probabilities are a distribution and collapse stays normalized"""
        vec = np.random.default_rng(seed).normal(size=8) + 1j * np.random.default_rng(seed + 1).normal(size=8)
        psi = PureState.from_vector((2, 2, 2), vec)
        obs = LocalObservable(1, xz_plane_observable(angle))

        p_plus, _ = project(psi, obs, 1)
        p_minus, _ = project(psi, obs, -1)
        _, after = measure(psi, obs, np.random.default_rng(seed))

        assert p_plus + p_minus == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.norm(after.amplitudes) == pytest.approx(1.0, abs=1e-10)


class TestControlledOperations:
    """Test controlled local observables"""

    def test_control_zero_is_identity(self):
        psi = PureState.product([ZERO, ZERO])

        after = apply_controlled(psi, 0, LocalObservable(1, PAULI_X))

        assert fidelity(after, psi) == pytest.approx(1.0)

    def test_control_one_applies(self):
        psi = PureState.product([ONE, ZERO])

        after = apply_controlled(psi, 0, LocalObservable(1, PAULI_X))

        np.testing.assert_allclose(after.amplitudes, [0, 0, 0, 1])

    def test_phase_kickback(self):
        """Target in the -1 eigenspace turns control |+⟩ into |-⟩"""
        psi = PureState.product([PLUS, ONE])

        after = apply_controlled(psi, 0, LocalObservable(1, PAULI_Z))

        np.testing.assert_allclose(after.amplitudes, np.kron(MINUS, ONE), atol=1e-12)

    def test_control_equal_to_target(self):
        with pytest.raises(ValueError, match="different sites"):
            apply_controlled(PureState.product([ZERO, ZERO]), 1, LocalObservable(1, PAULI_X))

    def test_control_must_be_qubit(self):
        psi = PureState((3, 2), np.eye(6)[0])

        with pytest.raises(ValueError, match="dimension 3"):
            apply_controlled(psi, 0, LocalObservable(1, PAULI_X))


class TestStatesAndObservables:
    """Test PureState and LocalObservable validation"""

    def test_unnormalized_state(self):
        with pytest.raises(ValueError, match="not normalized"):
            PureState((2,), np.array([1.0, 1.0]))

    def test_wrong_length(self):
        with pytest.raises(ValueError, match="expected 4"):
            PureState((2, 2), np.array([1.0, 0.0]))

    def test_non_hermitian_observable(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            LocalObservable(0, np.array([[0, 1], [0, 0]]))

    def test_non_involution(self):
        with pytest.raises(ValueError, match="identity"):
            LocalObservable(0, 2 * np.eye(2))

    def test_eigenvalue_signs(self):
        assert LocalObservable(0, PAULI_X).eigenvalue_signs() == {1, -1}
        assert LocalObservable(0, np.eye(2)).eigenvalue_signs() == {1}

    def test_fidelity_values(self):
        zero, one, plus = (PureState.product([s]) for s in (ZERO, ONE, PLUS))

        assert fidelity(zero, zero) == pytest.approx(1.0)
        assert fidelity(zero, one) == pytest.approx(0.0)
        assert fidelity(zero, plus) == pytest.approx(0.5)

    def test_fidelity_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            fidelity(PureState.product([ZERO]), PureState.product([ZERO, ZERO]))

    def test_tensor_product_cap(self):
        a = PureState.product([ZERO, ZERO])

        with pytest.raises(CapacityExceeded):
            tensor_product(a, a, dimension_cap=8)

"""
Tests for the self-test audit.

Honest provers give zero residuals and unit extraction fidelity; each
deviation from honest shows up as a residual that grows with the deviation.
"""

import math

import numpy as np
import pytest

from src.core.errors import CapacityExceeded, InapplicableStrategy
from src.protocol.settings import build_settings
from src.provers.strategies import (
    constant_classical_strategy,
    honest_strategy,
    noisy_strategy,
    perturbed_strategy,
    with_observable,
)
from src.provers.symbols import QuerySymbol
from src.quantum.operators import PAULI_X
from src.selftest.audit import (
    audit_expectations,
    check_anticommutation,
    check_d_observables,
    check_logical_action,
    derive_anticommutation_from_stabilizers,
    extract_logical_state,
    run_audit,
)

THETAS = [0.05, 0.1, 0.2, 0.4]


class TestHonestAudit:
    """Honest provers pass every check"""

    @pytest.mark.parametrize("fixture", ["k3", "lattice_2x3", "two_triangles"])
    def test_full_audit_passes(self, fixture, request):
        g = request.getfixturevalue(fixture)

        report = run_audit(honest_strategy(g), g, build_settings(g))

        assert report.passed
        assert report.applicable
        assert report.max_deviation <= 1e-10
        assert all(r <= 1e-10 for r in report.anticommutation.values())
        assert all(d.conclusive and d.residual <= 1e-10 for d in report.derivations)
        assert report.extraction_fidelity >= 1 - 1e-9
        assert all(r.fidelity >= 1 - 1e-9 for r in report.logical_action)

    def test_operator_checks(self, honest_k3):
        for v in range(3):
            assert check_anticommutation(honest_k3, v) <= 1e-12
            plus, minus = check_d_observables(honest_k3, v)
            assert plus <= 1e-12 and minus <= 1e-12

    def test_extracted_state_is_graph_state(self, k3, honest_k3):
        extraction = extract_logical_state(honest_k3, k3)

        overlap = abs(np.vdot(extraction.extracted.amplitudes, honest_k3.joint_state.amplitudes))
        assert overlap == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("symbol", [QuerySymbol.X, QuerySymbol.Z])
    def test_logical_action(self, k3, honest_k3, symbol):
        for v in range(3):
            assert check_logical_action(honest_k3, k3, v, symbol) == pytest.approx(1.0, abs=1e-9)

    def test_statistical_mode(self, k3, honest_k3):
        report = audit_expectations(honest_k3, build_settings(k3), shots=2000, seed=3)

        assert report.mode == "statistical"
        assert report.passed
        assert all(r.std_error is not None for r in report.settings)


class TestDeviations:
    """Dishonest strategies are caught by the matching residual"""

    def test_z_equal_to_x(self, k3, honest_k3):
        """Z' = X' on one vertex commutes instead of anticommuting"""
        strategy = with_observable(honest_k3, 1, QuerySymbol.Z, PAULI_X)

        assert check_anticommutation(strategy, 1) == pytest.approx(2.0)
        assert check_anticommutation(strategy, 0) <= 1e-12

    def test_d_plus_equal_to_x(self, honest_k3):
        """D'+ = X' leaves ‖(X - (X + Z)/√2)ψ‖ = √(2 - √2)"""
        strategy = with_observable(honest_k3, 0, QuerySymbol.DPLUS, PAULI_X)

        plus, minus = check_d_observables(strategy, 0)

        assert plus == pytest.approx(math.sqrt(2 - math.sqrt(2)))
        assert minus <= 1e-12

    def test_classical_violates_triangle(self, k3):
        report = audit_expectations(constant_classical_strategy(3), build_settings(k3))

        triangle = next(r for r in report.settings if r.family == "triangle")
        assert triangle.deviation == pytest.approx(2.0)
        assert not report.passed

    def test_perturbed_deviation(self, k3):
        report = audit_expectations(perturbed_strategy(k3, 0.3), build_settings(k3))

        assert report.max_deviation > 0.01
        assert not report.passed

    def test_noisy_strategy_operators_are_honest(self, k3):
        """Outcome noise leaves the observables alone; only expectations move"""
        noisy = noisy_strategy(k3, 0.1)

        assert check_anticommutation(noisy, 0) <= 1e-12
        assert audit_expectations(noisy, build_settings(k3)).max_deviation > 0.1


class TestPerturbedSweep:
    """Residuals grow continuously with the rotation angle"""

    def test_anticommutation_is_two_sin_theta(self, k3):
        residuals = [check_anticommutation(perturbed_strategy(k3, t), 0) for t in THETAS]

        for t, r in zip(THETAS, residuals):
            assert r == pytest.approx(2 * math.sin(t), abs=1e-10)
        assert all(a < b for a, b in zip(residuals, residuals[1:]))

    def test_d_residual_with_x_rotated(self, k3):
        """Rotating X alone moves (X' + Z')/√2 away from D'+ by √2·sin(θ/2)"""
        for t in THETAS:
            plus, minus = check_d_observables(perturbed_strategy(k3, t), 0)
            assert plus == pytest.approx(math.sqrt(2) * math.sin(t / 2), abs=1e-10)
            assert minus == pytest.approx(math.sqrt(2) * math.sin(t / 2), abs=1e-10)

    def test_d_residual_with_d_rotated(self, k3):
        for t in THETAS:
            plus, _ = check_d_observables(perturbed_strategy(k3, t, rotate=[QuerySymbol.DPLUS]), 0)
            assert plus == pytest.approx(2 * math.sin(t / 2), abs=1e-10)

    def test_extraction_fidelity(self, k3):
        """Each prover loses a factor cos²(θ/2)"""
        fidelities = [extract_logical_state(perturbed_strategy(k3, t), k3).fidelity for t in THETAS]

        for t, f in zip(THETAS, fidelities):
            assert f == pytest.approx(math.cos(t / 2) ** 6, abs=1e-9)
        assert all(a > b for a, b in zip(fidelities, fidelities[1:]))

    def test_audit_fails(self, k3):
        strategy = perturbed_strategy(k3, 0.3)

        report = run_audit(strategy, k3, build_settings(k3))

        assert report.applicable
        assert not report.passed


class TestStabilizerDerivation:
    """Test the cancellation argument on explicit strategies"""

    def test_honest_residual_is_zero(self, k3, honest_k3):
        check = derive_anticommutation_from_stabilizers(honest_k3, k3, (0, 1, 2))

        assert check.conclusive
        assert check.pivot == 1
        assert check.residual <= 1e-12

    @pytest.mark.parametrize("pivot", [0, 1, 2])
    def test_any_pivot(self, k3, honest_k3, pivot):
        check = derive_anticommutation_from_stabilizers(honest_k3, k3, (0, 1, 2), pivot=pivot)

        assert check.residual <= 1e-12

    @pytest.mark.parametrize("omit", [0, 1, 2])
    def test_omitting_a_generator_breaks_the_chain(self, k3, honest_k3, omit):
        check = derive_anticommutation_from_stabilizers(honest_k3, k3, (0, 1, 2), omit=omit)

        assert check.conclusive
        assert check.residual == pytest.approx(math.sqrt(2))

    def test_lattice_triangle(self, lattice_2x3):
        """Z support outside the triangle cancels too"""
        check = derive_anticommutation_from_stabilizers(honest_strategy(lattice_2x3), lattice_2x3, (0, 1, 3))

        assert check.residual <= 1e-12

    def test_perturbed_is_inconclusive(self, k3):
        check = derive_anticommutation_from_stabilizers(perturbed_strategy(k3, 0.3), k3, (0, 1, 2))

        assert not check.conclusive
        assert check.residual is None
        assert "expectation" in check.reason

    def test_not_a_triangle(self, lattice_2x3):
        with pytest.raises(ValueError, match="not a triangle"):
            derive_anticommutation_from_stabilizers(honest_strategy(lattice_2x3), lattice_2x3, (0, 1, 2))

    def test_record(self, k3, honest_k3):
        record = derive_anticommutation_from_stabilizers(honest_k3, k3, (0, 1, 2), omit=2).to_record()

        assert record.triangle == (0, 1, 2)
        assert record.omitted == 2


class TestApplicability:
    """Extraction needs genuine ±1 observables"""

    def test_classical_extraction_inapplicable(self, k3):
        with pytest.raises(InapplicableStrategy):
            extract_logical_state(constant_classical_strategy(3), k3)

    def test_classical_audit_marked_inapplicable(self, k3):
        report = run_audit(constant_classical_strategy(3), k3, build_settings(k3))

        assert not report.applicable
        assert report.inapplicable_reason
        assert not report.passed
        assert report.extraction_fidelity is None

    def test_dimension_cap(self, k3, honest_k3):
        with pytest.raises(CapacityExceeded):
            extract_logical_state(honest_k3, k3, dimension_cap=32)

    def test_logical_action_symbol(self, k3, honest_k3):
        with pytest.raises(ValueError, match="X and Z"):
            check_logical_action(honest_k3, k3, 0, QuerySymbol.DPLUS)

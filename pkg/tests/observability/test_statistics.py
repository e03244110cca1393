"""
Unit tests for acceptance statistics and run summaries.
"""

import numpy as np
import pytest

from src.models.records import Branch, Decision
from src.observability.statistics import clopper_pearson, mean_standard_error, standard_error
from src.observability.summary import build_run_summary, family_breakdown
from src.protocol.settings import build_settings
from src.protocol.verifier import amplify_gap, calibrate
from src.mbqc.builtins import generator_parity


class TestClopperPearson:
    """Test exact binomial intervals"""

    def test_known_interval(self):
        low, high = clopper_pearson(5, 10)

        assert low == pytest.approx(0.187086, abs=1e-5)
        assert high == pytest.approx(0.812914, abs=1e-5)

    def test_no_successes(self):
        low, high = clopper_pearson(0, 10)

        assert low == 0.0
        assert high == pytest.approx(1 - 0.025 ** (1 / 10))

    def test_all_successes(self):
        low, high = clopper_pearson(10, 10)

        assert high == 1.0
        assert low == pytest.approx(0.025 ** (1 / 10))

    @pytest.mark.parametrize("k,n", [(0, 1), (1, 1), (3, 7), (360, 400)])
    def test_contains_estimate(self, k, n):
        low, high = clopper_pearson(k, n)

        assert 0.0 <= low <= k / n <= high <= 1.0

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            clopper_pearson(5, 4)
        with pytest.raises(ValueError):
            clopper_pearson(0, 0)


class TestStandardErrors:
    def test_bernoulli(self):
        assert standard_error(0.5, 100) == pytest.approx(0.05)

    def test_sample_mean(self):
        assert mean_standard_error(np.array([1.0, -1.0, 1.0, -1.0])) == pytest.approx(np.std([1, -1, 1, -1], ddof=1) / 2)

    def test_single_sample(self):
        assert mean_standard_error(np.array([1.0])) == float("inf")


class TestRunSummary:
    """Test aggregation of an amplified run"""

    @pytest.fixture
    def run(self, k3, honest_k3):
        settings, pattern = build_settings(k3), generator_parity(k3)
        calibration = calibrate(k3, settings, pattern, q=0.5)
        result = amplify_gap(k3, settings, pattern, honest_k3, 0.5, 200, 182.0, master_seed=3)
        return result, calibration

    def test_summary_is_consistent(self, run):
        result, calibration = run

        summary = build_run_summary(result, calibration, "midpoint", 3, {"q": 0.5}, wall_time_s=0.1)

        assert summary.trials == 200
        assert sum(summary.branch_counts.values()) == 200
        assert summary.ci_low <= summary.acceptance <= summary.ci_high
        assert summary.decision is (Decision.ACCEPT if summary.accepted > 182.0 else Decision.REJECT)
        assert summary.branch_accepted[Branch.CALCULATE] == summary.branch_counts[Branch.CALCULATE]

    def test_family_breakdown(self, run):
        result, _ = run

        rows = family_breakdown(result.records)

        assert [row.family for row in rows] == [
            "generator", "triangle", "d_plus_z", "d_minus_z", "d_plus_x", "d_minus_x",
        ]
        assert sum(row.trials for row in rows) == sum(r.branch is Branch.TEST for r in result.records)
        for row in rows:
            if row.family in ("generator", "triangle") and row.trials:
                assert row.rate == 1.0

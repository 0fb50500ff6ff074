"""Validation suites: all green at defaults, and mutation sanity."""

import pytest

import collide.analytic
from collide.validation import SUITES, run_suite, suite_analytic


def names(checks):
    return [c["name"] for c in checks]


class TestSuiteStructure:
    def test_known_names(self):
        assert SUITES == ("analytic", "mc", "location", "rotation", "all")

    def test_unknown_suite_rejected(self):
        with pytest.raises(ValueError):
            run_suite("bogus")

    def test_all_concatenates(self):
        # "all" runs every suite; membership check is cheap enough via analytic
        checks = run_suite("analytic")
        assert names(checks) == [
            "closed_form_agreement",
            "location_coefficient_table",
            "asymptotic_power_law",
            "conditional_density_normalization",
        ]

    def test_check_shape(self):
        for c in run_suite("analytic"):
            assert isinstance(c["pass"], bool)
            assert isinstance(c["detail"], str) and c["detail"]


class TestSuitesPass:
    def test_analytic(self):
        assert all(c["pass"] for c in run_suite("analytic"))

    def test_mc_default_seed(self):
        checks = run_suite("mc", seed=42)
        assert [c["name"] for c in checks] == [
            "naive_prob_d2", "naive_prob_d3", "naive_prob_d1",
            "solver_decomposition_agreement_d2", "solver_decomposition_agreement_d3",
            "estimator_consistency", "worker_count_determinism",
        ]
        assert all(c["pass"] for c in checks), [c for c in checks if not c["pass"]]

    def test_location_default_seed(self):
        checks = run_suite("location", alpha=0.01, seed=42)
        assert all(c["pass"] for c in checks), [c for c in checks if not c["pass"]]

    def test_rotation_default_seed(self):
        checks = run_suite("rotation", alpha=0.01, seed=42)
        assert all(c["pass"] for c in checks), [c for c in checks if not c["pass"]]

    def test_rotation_seed_7(self):
        checks = run_suite("rotation", alpha=0.01, seed=7)
        assert all(c["pass"] for c in checks), [c for c in checks if not c["pass"]]


class TestMutationSanity:
    def test_broken_coefficient_detected(self, monkeypatch):
        # a deliberately wrong table value must trip the analytic suite
        real = collide.analytic.location_coefficient
        monkeypatch.setattr(collide.analytic, "location_coefficient",
                            lambda d: real(d) * (1.0 + 1e-6))
        checks = suite_analytic()
        table = next(c for c in checks if c["name"] == "location_coefficient_table")
        assert not table["pass"]

    def test_broken_probability_detected(self, monkeypatch):
        real = collide.analytic.collision_prob_closed
        monkeypatch.setattr(collide.analytic, "collision_prob_closed",
                            lambda r, d: real(r, d) + 1e-8)
        checks = suite_analytic()
        agreement = next(c for c in checks if c["name"] == "closed_form_agreement")
        assert not agreement["pass"]

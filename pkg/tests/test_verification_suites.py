import numpy as np

from verification_suites import (
    SUITE_DEFAULTS,
    random_gauge_polynomial,
    random_super_polynomial,
    run_all_suites,
    suite_cme,
    suite_core,
    suite_model,
    suite_settings,
    suite_trivial_pairs,
)
from matrixmodel import GAUGE_FIELDS
from tests.strategies import GENERATORS

SMALL = {
    "core_samples": 5,
    "cme_samples": 2,
    "unitary_samples": 1,
    "bilinear_samples": 1,
    "max_spectral_degree": 3,
}


def failing(reports):
    return [report.check_id for report in reports if not report.passed]


class TestSettings:
    def test_defaults(self):
        assert suite_settings() == SUITE_DEFAULTS
        assert SUITE_DEFAULTS["seed"] == 0

    def test_overrides_are_coerced(self):
        settings = suite_settings({"seed": "7", "unknown": 3, "cme_samples": None})
        assert settings["seed"] == 7
        assert settings["cme_samples"] == SUITE_DEFAULTS["cme_samples"]
        assert "unknown" not in settings


class TestRandomData:
    def test_gauge_polynomials_use_gauge_fields(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            assert random_gauge_polynomial(rng).symbols <= set(GAUGE_FIELDS)

    def test_super_polynomials_are_homogeneous(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            assert random_super_polynomial(rng, GENERATORS).is_homogeneous


class TestSuites:
    def test_core(self):
        assert failing(suite_core(np.random.default_rng(0), 10)) == []

    def test_core_reports_are_timed_separately(self):
        reports = suite_core(np.random.default_rng(0), 10)
        timings = [report.timing_ms for report in reports]
        assert all(timing > 0 for timing in timings)
        assert len(set(timings)) > 1

    def test_model(self):
        reports = suite_model((0, 0, 1, 0, 1), np.random.default_rng(0), 2, 4)
        assert failing(reports) == []
        assert "model.classify" in [report.check_id for report in reports]

    def test_cme(self):
        assert failing(suite_cme((0, 0, 1), np.random.default_rng(0), 3, 2, 3)) == []

    def test_trivial_pairs(self):
        reports = suite_trivial_pairs((0, 0, 1))
        assert failing(reports) == []
        assert {"pairs.degrees", "pairs.cme_total", "pairs.gauge_fix"} <= {r.check_id for r in reports}
        assert all(report.timing_ms > 0 for report in reports)


class TestRunAll:
    def test_everything_passes(self):
        reports = run_all_suites(settings=SMALL)
        assert failing(reports) == []
        ids = [report.check_id for report in reports]
        assert ids == sorted(ids)

    def test_deterministic_for_a_seed(self):
        first = run_all_suites(settings=dict(SMALL, seed=3))
        second = run_all_suites(settings=dict(SMALL, seed=3))
        assert [r.to_dict(include_timing=False) for r in first] == [r.to_dict(include_timing=False) for r in second]

"""Unit tests for the acceptance check runner."""

import numpy as np
import pytest

from coadj_utils import checks
from coadj_utils.checks import SUITES, CheckResult, _select, run_checks, summary_table
from coadj_utils.config import ToolkitConfig
from coadj_utils.errors import DomainError


class TestSelection:
    """Tests for choosing suites by number or name."""

    def test_all_by_default(self):
        """Test that no selection runs every criterion in order."""
        assert _select(None) == sorted(SUITES)
        assert len(SUITES) == 14

    def test_numbers_and_names(self):
        """Test mixing criterion numbers and suite names."""
        assert _select(["6", "frozen", 10, "maxwell"]) == [6, 8, 10]

    def test_unknown_suite(self):
        """Test that unknown names raise KeyError."""
        with pytest.raises(KeyError, match="Unknown check suite"):
            _select(["bogus"])
        with pytest.raises(KeyError):
            _select([99])


class TestRunChecks:
    """Tests for running suites and reporting results."""

    def test_symbolic_suites(self):
        """Test the frozen, kinetic and Maxwell suites."""
        results = run_checks(names=["frozen", "kinetic-term", "maxwell"])
        assert {r.criterion for r in results} == {6, 7, 8}
        assert all(r.passed for r in results), [r.to_dict() for r in results if not r.passed]

    def test_failing_suite_is_recorded(self, monkeypatch):
        """Test that a suite raising a toolkit error becomes one failed result."""

        def broken(cfg, rng):
            raise DomainError("Q = 1 reached")

        monkeypatch.setitem(SUITES, 6, ("frozen", broken))
        results = run_checks(names=[6])
        assert len(results) == 1
        assert not results[0].passed
        assert results[0].residual == float("inf")
        assert "DomainError" in results[0].detail

    def test_unexpected_exception_does_not_abort_run(self, monkeypatch):
        """Test that a suite crashing with a non-toolkit error is recorded and later suites run."""

        def crashing(cfg, rng):
            raise NameError("name 'DiracDelta' is not defined")

        def passing(cfg, rng):
            return [CheckResult(7, "ok", 0.0, 1.0, True)]

        monkeypatch.setitem(SUITES, 6, ("frozen", crashing))
        monkeypatch.setitem(SUITES, 7, ("kinetic-term", passing))
        results = run_checks(names=[6, 7])
        assert [r.criterion for r in results] == [6, 7]
        assert not results[0].passed
        assert "NameError" in results[0].detail
        assert results[1].passed

    def test_seed_reaches_suites(self, monkeypatch):
        """Test that suites draw from a generator seeded by config and criterion."""
        draws = []

        def recording(cfg, rng):
            draws.append(rng.normal())
            return [CheckResult(6, "recorded", 0.0, 1.0, True)]

        monkeypatch.setitem(SUITES, 6, ("frozen", recording))
        run_checks(ToolkitConfig(seed=3), [6])
        run_checks(ToolkitConfig(seed=3), [6])
        run_checks(ToolkitConfig(seed=4), [6])
        assert draws[0] == draws[1]
        assert draws[0] != draws[2]

    def test_result_to_dict(self):
        """Test that numpy values serialize as plain Python."""
        record = CheckResult(3, "det M = 1", np.float64(1e-12), 1e-8, np.bool_(True)).to_dict()
        assert record == {
            "criterion": 3,
            "name": "det M = 1",
            "residual": 1e-12,
            "tolerance": 1e-8,
            "passed": True,
            "detail": "",
        }
        assert type(record["passed"]) is bool

    def test_summary_table(self):
        """Test the fixed-width table and its totals."""
        results = [
            CheckResult(1, "kernel", 1e-12, 1e-9, True),
            CheckResult(2, "pairing", 1.0, 1e-10, False),
        ]
        lines = summary_table(results).splitlines()
        assert lines[0].split()[:2] == ["crit", "check"]
        assert lines[2].endswith("PASS")
        assert lines[3].endswith("FAIL")
        assert lines[-1] == "1 passed, 1 failed"

    def test_diff0_element_is_orientation_preserving(self, rng):
        """Test that generated Diff0 elements have positive derivative."""
        phi = checks.diff0_element(rng)
        assert phi.derivative_field(1).samples(64).min() > 0.0

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["sigma-lift", "transverse", "tw-relation"])
    def test_heavier_suites(self, name):
        """Test suites that take longer to run."""
        results = run_checks(names=[name])
        assert all(r.passed for r in results), [r.to_dict() for r in results if not r.passed]

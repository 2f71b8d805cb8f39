"""Tests for finite-difference gradient verification."""

import numpy as np
import pytest

from acdgcl.diffcore import GradCheckError, Tensor, apply_op, finite_diff_check, ops
from acdgcl.objective import LOSS_TERMS, check_loss_gradients


def wrong_square(x):
    """x**2 with a deliberately wrong backward rule (3x instead of 2x)."""
    return apply_op("wrong_square", lambda a: a * a, lambda g, out, a: (g * 3.0 * a,), x)


class TestFiniteDiffCheck:
    """Tests for finite_diff_check on hand-written objectives."""

    def test_quadratic_passes(self):
        """||p||^2 agrees with its analytic gradient to high precision."""
        params = {"p": np.array([0.3, -1.2, 2.5]), "q": np.array([[1.0, -0.5]])}

        def objective(p):
            return ops.add(ops.l2_norm_sq(p["p"]), ops.l2_norm_sq(p["q"]))

        report = finite_diff_check(objective, params, h=1e-5)
        assert report.passed
        assert report.max_rel_error < 1e-8
        assert report.coordinates == 5

    def test_zero_objective_passes(self):
        """A constant objective has zero gradients and passes."""
        report = finite_diff_check(lambda p: Tensor(0.0), {"p": np.ones(4)})
        assert report.passed
        assert report.max_rel_error == 0.0

    def test_mutated_gradient_rule_fails(self):
        params = {"p": np.array([1.0, 2.0, -0.5])}
        report = finite_diff_check(lambda p: ops.sum(wrong_square(p["p"])), params)
        assert not report.passed
        assert report.worst is not None and report.worst[0] == "p"

    def test_sampling_caps_coordinates(self):
        params = {"w": np.linspace(-1.0, 1.0, 300)}
        report = finite_diff_check(lambda p: ops.l2_norm_sq(p["w"]), params, samples=50)
        assert report.coordinates == 50

    def test_non_positive_step_rejected(self):
        with pytest.raises(GradCheckError):
            finite_diff_check(lambda p: ops.sum(p["p"]), {"p": np.ones(2)}, h=0.0)

    def test_non_deterministic_objective_rejected(self):
        rng = np.random.default_rng(0)

        def noisy(p):
            return ops.add(ops.sum(p["p"]), float(rng.normal()))

        with pytest.raises(GradCheckError, match="deterministic"):
            finite_diff_check(noisy, {"p": np.ones(2)})

    def test_kink_straddling_coordinates_are_skipped(self):
        """A relu input sitting within h of zero is not compared."""
        params = {"p": np.array([1e-7, 1.0, -2.0])}
        report = finite_diff_check(lambda p: ops.sum(ops.relu(p["p"])), params, h=1e-6)
        assert report.skipped == 1
        assert report.coordinates == 2
        assert report.passed


class TestLossGradients:
    """Every loss term passes the finite-difference check."""

    def test_all_terms_pass(self):
        reports = check_loss_gradients(samples=40, seed=0)
        assert set(reports) == set(LOSS_TERMS)
        for term, report in reports.items():
            assert report.passed, f"{term}: {report.max_rel_error:.3e} at {report.worst}"
            assert report.coordinates == 40

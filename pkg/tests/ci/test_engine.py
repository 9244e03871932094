"""Tests for the Omega score, its spread and the CI report."""

import numpy as np
import pytest

from otcausal.basis import BasisTerm
from otcausal.ci import (
    FisherEstimate,
    fisher_information,
    log_density_mixed_second,
    omega_gradient,
    omega_report,
    omega_score,
    omega_sigma,
    quadratic_form,
)
from otcausal.config import CiOptions, FitOptions
from otcausal.errors import ConditioningError, DimensionError, FitError
from otcausal.transport import FittedMap, TriangularMapSpec, fit_map, log_pullback
from tests.helpers import gaussian_pair, linear_gaussian_alpha, perturbed_alpha

RHO = 0.5
EXACT_MIXED = RHO / (1 - RHO**2)


def exact_map(spec):
    return FittedMap.from_parameters(spec, linear_gaussian_alpha(spec, RHO))


def test_identity_map_has_zero_mixed_partial(spec2, rng):
    fitted = FittedMap.from_parameters(spec2, spec2.identity_alpha())
    x = rng.standard_normal((25, 2))
    np.testing.assert_allclose(log_density_mixed_second(fitted, x, 0, 1), 0.0, atol=1e-12)
    assert omega_score(fitted, x, 0, 1) == pytest.approx(0.0, abs=1e-20)


def test_linear_gaussian_mixed_partial_is_constant(spec2, rng):
    """Test the Gaussian precision-matrix value rho / (1 - rho^2) at every point."""
    fitted = exact_map(spec2)
    x = rng.standard_normal((25, 2)) * 2
    np.testing.assert_allclose(log_density_mixed_second(fitted, x, 0, 1), EXACT_MIXED, atol=1e-10)
    np.testing.assert_allclose(log_density_mixed_second(fitted, x, 1, 0), EXACT_MIXED, atol=1e-10)
    assert omega_score(fitted, x, 0, 1) == pytest.approx(EXACT_MIXED**2)
    assert isinstance(log_density_mixed_second(fitted, x[0], 0, 1), float)


@pytest.mark.parametrize("pair", [(0, 1), (0, 2), (1, 2)])
def test_mixed_partial_matches_finite_differences(pair, rng):
    """Test mixed partials of the log pullback against central differences."""
    spec = TriangularMapSpec.total_degree(3, 2, quadrature_order=40)
    fitted = FittedMap.from_parameters(spec, perturbed_alpha(spec, seed=8))
    k, ell = pair
    eps = 1e-4
    ek, el = np.eye(3)[k] * eps, np.eye(3)[ell] * eps
    for x in rng.standard_normal((4, 3)) * 0.8:
        fd = (
            log_pullback(spec, fitted.alpha, x + ek + el)
            - log_pullback(spec, fitted.alpha, x + ek - el)
            - log_pullback(spec, fitted.alpha, x - ek + el)
            + log_pullback(spec, fitted.alpha, x - ek - el)
        ) / (4 * eps**2)
        assert log_density_mixed_second(fitted, x, k, ell) == pytest.approx(fd, abs=1e-4)


def test_omega_gradient_matches_finite_differences(rng):
    """Test the alpha-gradient of Omega against central differences."""
    spec = TriangularMapSpec.total_degree(2, 2)
    alpha = perturbed_alpha(spec, seed=4)
    x = rng.standard_normal((30, 2))
    _, grad = omega_gradient(FittedMap.from_parameters(spec, alpha), x, 0, 1)
    eps = 1e-6
    fd = np.zeros_like(alpha)
    for i in range(alpha.size):
        step = np.zeros_like(alpha)
        step[i] = eps
        up = omega_score(FittedMap.from_parameters(spec, alpha + step), x, 0, 1)
        down = omega_score(FittedMap.from_parameters(spec, alpha - step), x, 0, 1)
        fd[i] = (up - down) / (2 * eps)
    np.testing.assert_allclose(grad, fd, rtol=1e-4, atol=1e-8)


def test_mixed_partial_argument_checks(spec2):
    fitted = exact_map(spec2)
    with pytest.raises(ValueError, match="two different"):
        log_density_mixed_second(fitted, np.zeros(2), 1, 1)
    with pytest.raises(DimensionError):
        log_density_mixed_second(fitted, np.zeros(2), 0, 2)


def test_fisher_scale_family():
    """Test the information of S(x) = a + b^2 x at the identity: diag(1, 8)."""
    spec = TriangularMapSpec.from_terms([[BasisTerm.constant(0)]], [[BasisTerm.constant(1)]])
    fitted = FittedMap.from_parameters(spec, [0.0, 1.0])
    x = np.random.default_rng(3).standard_normal((10_000, 1))
    fisher = fisher_information(fitted, x)
    np.testing.assert_allclose(np.diag(fisher.matrix), [1.0, 8.0], rtol=0.15)
    assert abs(fisher.matrix[0, 1]) < 0.2


def test_fisher_replication_invariance(spec2, correlated_samples):
    """Test duplicating every sample leaves the estimate unchanged."""
    fitted = fit_map(spec2, correlated_samples[:400])
    once = fisher_information(fitted, correlated_samples[:400])
    twice = fisher_information(fitted, np.vstack([correlated_samples[:400]] * 2))
    np.testing.assert_allclose(once.matrix, twice.matrix, rtol=1e-12, atol=1e-14)
    assert twice.n == 800
    np.testing.assert_allclose(once.matrix, once.matrix.T)
    assert np.linalg.eigvalsh(once.matrix).min() > 0


def test_sigma_scales_inversely_with_n(spec2, correlated_samples):
    x = correlated_samples[:400]
    fitted = fit_map(spec2, x)
    fisher = fisher_information(fitted, x)
    once = omega_sigma(fitted, x, 0, 1, fisher)
    twice = omega_sigma(fitted, np.vstack([x, x]), 0, 1, fisher)
    assert once > 0
    assert twice == pytest.approx(once / 2)


def test_sigma_zero_at_identity(spec2, rng):
    fitted = FittedMap.from_parameters(spec2, spec2.identity_alpha())
    x = rng.standard_normal((50, 2))
    fisher = fisher_information(fitted, x)
    assert omega_sigma(fitted, x, 0, 1, fisher) == 0.0


def test_quadratic_form_rejects_indefinite(spec2, rng):
    fitted = FittedMap.from_parameters(spec2, spec2.identity_alpha())
    fisher = fisher_information(fitted, rng.standard_normal((20, 2)), ridge=0.0)
    broken = FisherEstimate(matrix=-np.eye(fisher.matrix.shape[0]), ridge=0.0, n=20)
    with pytest.raises(ConditioningError):
        quadratic_form(broken, np.ones(fisher.matrix.shape[0]))


def test_report_dependent_pair(correlated_samples):
    report = omega_report(correlated_samples, [0, 1])
    assert not report.independent(0, 1)
    assert report.score(0, 1) > report.tau[0, 1] > 0


def test_report_tables_are_consistent(correlated_samples):
    report = omega_report(correlated_samples[:500], [1, 0])
    assert report.subset == (0, 1)
    np.testing.assert_array_equal(report.omega, report.omega.T)
    np.testing.assert_array_equal(report.tau, report.tau.T)
    assert report.decisions[0, 1] == (report.omega[0, 1] < report.tau[0, 1])
    assert not report.decisions[0, 0]
    assert report.to_dict()["subset"] == [1, 2]


def test_threshold_kinds(correlated_samples):
    x = correlated_samples[:500]
    std = omega_report(x, [0, 1], ci_opts=CiOptions(threshold="std"))
    var = omega_report(x, [0, 1], ci_opts=CiOptions(threshold="variance"))
    assert std.tau[0, 1] == pytest.approx(2.0 * np.sqrt(std.sigma[0, 1]))
    assert var.tau[0, 1] == pytest.approx(2.0 * var.sigma[0, 1])


def test_delta_monotonicity(rng):
    """Test raising delta never turns an independent decision into a dependent one."""
    x = np.column_stack([rng.standard_normal(600), rng.standard_normal(600), rng.standard_normal(600)])
    x[:, 2] += 0.3 * x[:, 0]
    previous = None
    for delta in (0.5, 1.0, 2.0, 4.0, 8.0):
        report = omega_report(x, [0, 1, 2], ci_opts=CiOptions(delta=delta))
        if previous is not None:
            assert np.all(report.decisions >= previous)
        previous = report.decisions


def test_multiple_orders_are_averaged(correlated_samples):
    x = np.column_stack([correlated_samples[:400], np.random.default_rng(0).standard_normal(400)])
    report = omega_report(x, [0, 1, 2], ci_opts=CiOptions(orders=3, seed=5))
    assert len(report.orders) == 3
    assert report.orders[0] == (0, 1, 2)
    assert len(set(report.orders)) == 3


def test_report_argument_checks(correlated_samples):
    with pytest.raises(ValueError, match="at least two"):
        omega_report(correlated_samples, [0])
    with pytest.raises(DimensionError):
        omega_report(correlated_samples, [0, 5])


def test_fit_failure_carries_subset():
    x = np.column_stack([np.arange(50.0), np.ones(50)])
    with pytest.raises(FitError, match=r"subset \{1,2\}") as info:
        omega_report(x, [0, 1], FitOptions(degree=1))
    assert info.value.subset == (0, 1)


def test_gaussian_omega_close_to_analytic_value():
    """Test the fitted score on rho = 0.5 data is within 20% of 4/9."""
    x = gaussian_pair(RHO, 5000, seed=21)
    fitted = fit_map(TriangularMapSpec.total_degree(2, 2), x)
    assert omega_score(fitted, x, 0, 1) == pytest.approx(EXACT_MIXED**2, rel=0.2)


@pytest.mark.slow
def test_null_and_alternative_calibration():
    """Test independent normals pass and correlated ones fail in most seeds."""
    independent = sum(omega_report(gaussian_pair(0.0, 2000, seed=s), [0, 1]).independent(0, 1) for s in range(20))
    dependent = sum(not omega_report(gaussian_pair(RHO, 2000, seed=s), [0, 1]).independent(0, 1) for s in range(20))
    assert independent >= 18
    assert dependent >= 19

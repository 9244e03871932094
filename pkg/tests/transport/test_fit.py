"""Tests for the maximum-likelihood map fit."""

import numpy as np
import pytest

from otcausal.config import FitOptions
from otcausal.errors import DataError, DimensionError
from otcausal.parallel import map_ordered
from otcausal.sem import linear_gaussian_sem, sample
from otcausal.transport import (
    FittedMap,
    TriangularMapSpec,
    check_samples,
    fit_map,
    nll_objective,
    score_matrix,
)
from tests.helpers import gaussian_pair, perturbed_alpha


@pytest.mark.parametrize("seed", range(5))
def test_nll_gradient_matches_finite_differences(seed):
    """Test the analytic NLL gradient against central differences."""
    rng = np.random.default_rng(seed)
    d = 1 + seed % 3
    spec = TriangularMapSpec.total_degree(d, 1 + seed % 2)
    alpha = perturbed_alpha(spec, seed=seed + 100)
    x = rng.standard_normal((40, d))
    _, grad = nll_objective(spec, alpha, x)
    eps = 1e-6
    fd = np.zeros_like(alpha)
    for i in range(alpha.size):
        step = np.zeros_like(alpha)
        step[i] = eps
        fd[i] = (nll_objective(spec, alpha + step, x)[0] - nll_objective(spec, alpha - step, x)[0]) / (2 * eps)
    np.testing.assert_allclose(grad, fd, rtol=1e-5, atol=1e-8)


def test_score_matrix_averages_to_nll_gradient(spec2, rng):
    """Test the per-sample scores are minus the NLL gradient on average."""
    alpha = perturbed_alpha(spec2, seed=2)
    x = rng.standard_normal((30, 2))
    _, grad = nll_objective(spec2, alpha, x)
    scores = score_matrix(spec2, alpha, x)
    assert scores.shape == (30, spec2.n_coefficients)
    np.testing.assert_allclose(-scores.mean(axis=0), grad, atol=1e-10)


def test_fit_history_is_non_increasing(spec2, correlated_samples):
    fitted = fit_map(spec2, correlated_samples)
    for history in fitted.diagnostics.history:
        assert np.all(np.diff(history) <= 1e-12)


def test_fit_recovers_gaussian(spec2, correlated_samples):
    """Test the fit pushes correlated Gaussian data to an uncorrelated standard normal."""
    fitted = fit_map(spec2, correlated_samples)
    assert fitted.diagnostics.iterations > 0
    z = fitted.pushforward(correlated_samples)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=0.05)
    np.testing.assert_allclose(z.std(axis=0), 1.0, atol=0.05)
    assert abs(np.corrcoef(z.T)[0, 1]) < 0.05


def test_fit_improves_on_identity(spec2, correlated_samples):
    fitted = fit_map(spec2, correlated_samples)
    z = fitted.standardize(correlated_samples)
    identity_nll, _ = nll_objective(spec2, spec2.identity_alpha(), z)
    assert fitted.diagnostics.objective < identity_nll


def test_log_density_includes_standardization(correlated_samples):
    """Test densities of rescaled data differ by the log scale."""
    spec = TriangularMapSpec.total_degree(2, 1)
    fitted = fit_map(spec, correlated_samples)
    scaled = fit_map(spec, 3.0 * correlated_samples)
    np.testing.assert_allclose(
        scaled.log_density(3.0 * correlated_samples[:5]),
        fitted.log_density(correlated_samples[:5]) - 2 * np.log(3.0),
        atol=1e-6,
    )


def test_fitted_map_dict_round_trip(spec2, correlated_samples):
    fitted = fit_map(spec2, correlated_samples[:300], columns=(0, 2))
    restored = FittedMap.from_dict(fitted.to_dict())
    np.testing.assert_array_equal(restored.alpha, fitted.alpha)
    assert restored.columns == (0, 2)
    assert restored.spec == fitted.spec
    np.testing.assert_allclose(restored.pushforward(correlated_samples[:5]), fitted.pushforward(correlated_samples[:5]))


def test_from_parameters_uses_identity_standardization(spec2):
    fitted = FittedMap.from_parameters(spec2, spec2.identity_alpha())
    x = np.array([[0.5, -1.0]])
    np.testing.assert_allclose(fitted.pushforward(x), x)
    assert not fitted.alpha.flags.writeable


def test_constant_column_rejected(spec2):
    x = np.column_stack([np.arange(10.0), np.ones(10)])
    with pytest.raises(DataError, match="column 2 is constant"):
        fit_map(spec2, x)


def test_non_finite_rejected(spec2):
    x = gaussian_pair(0.0, 10)
    x[3, 1] = np.nan
    with pytest.raises(DataError, match="sample 3, column 2"):
        check_samples(x)
    with pytest.raises(DataError):
        fit_map(spec2, x)


def test_width_mismatch(spec2):
    with pytest.raises(DimensionError):
        fit_map(spec2, np.zeros((10, 3)))


def test_few_samples_warn(spec2, caplog):
    x = gaussian_pair(0.3, 8, seed=1)
    fit_map(spec2, x, FitOptions(max_iters=20, ridge=1e-3))
    assert "relies on the ridge penalty" in caplog.text


def test_refit_is_bit_identical(spec2, correlated_samples):
    opts = FitOptions(seed=4)
    first = fit_map(spec2, correlated_samples, opts)
    second = fit_map(spec2, correlated_samples, opts)
    np.testing.assert_array_equal(first.alpha, second.alpha)
    assert first.diagnostics.objective == second.diagnostics.objective


def test_concurrent_fits_match_serial_fit(correlated_samples):
    """Test fits running side by side on worker threads reproduce the serial fit."""
    spec = TriangularMapSpec.total_degree(2, 3)
    opts = FitOptions(seed=4)
    serial = fit_map(spec, correlated_samples, opts).alpha
    fits = map_ordered(lambda _: fit_map(spec, correlated_samples, opts).alpha, range(4), workers=4)
    for alpha in fits:
        np.testing.assert_array_equal(alpha, serial)


def test_linear_gaussian_sem_gives_affine_components():
    """Test a linear Gaussian SEM in causal order fits to affine, uncorrelated components."""
    model = linear_gaussian_sem(d=3, seed=1, edge_prob=1.0)
    x = sample(model, 10_000, seed=2)
    spec = TriangularMapSpec.total_degree(3, 2)
    fitted = fit_map(spec, x)
    z = fitted.pushforward(x)

    design = np.column_stack([np.ones(len(x)), fitted.standardize(x)])
    for k in range(3):
        coef, *_ = np.linalg.lstsq(design[:, : k + 2], z[:, k], rcond=None)
        residual = z[:, k] - design[:, : k + 2] @ coef
        assert residual.std() < 0.1
        assert coef[k + 1] > 0

    corr = np.corrcoef(z.T)
    assert np.all(np.abs(corr[np.triu_indices(3, k=1)]) <= 0.05)
    np.testing.assert_allclose(z.std(axis=0), 1.0, atol=0.05)

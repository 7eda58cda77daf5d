import numpy as np
import pytest

from banditgne.estimator import (
    combined_direction,
    estimate_constraint_jacobian,
    estimate_cost_gradient,
    perturb,
    sample_ball,
    sample_sphere,
    smoothed_value,
)


def test_sphere_one_dim_is_a_fair_sign(rng):
    draws = np.array([sample_sphere(1, rng)[0] for _ in range(10_000)])
    assert set(np.unique(draws)) == {-1.0, 1.0}
    assert abs((draws > 0).mean() - 0.5) <= 0.02


def test_sphere_three_dim_mean_and_norm(rng):
    draws = np.array([sample_sphere(3, rng) for _ in range(100_000)])
    np.testing.assert_allclose(np.linalg.norm(draws, axis=1), 1.0, atol=1e-12)
    assert np.all(np.abs(draws.mean(axis=0)) <= 0.02)


def test_perturbation_radius(rng):
    z = rng.normal(size=4)
    u = sample_sphere(4, rng)
    draw = perturb(z, 0.37, u)
    assert np.linalg.norm(draw.perturbed_point - z) == pytest.approx(0.37, abs=1e-12)


def test_estimator_arithmetic():
    np.testing.assert_array_equal(estimate_cost_gradient(0.0, 3, 0.1, [1.0, 0, 0]), 0.0)
    np.testing.assert_array_equal(estimate_cost_gradient(2.0, 1, 0.5, [1.0]), [4.0])
    np.testing.assert_array_equal(estimate_constraint_jacobian([0.0, 0.0], 2, 0.5, [0.6, 0.8]), np.zeros((2, 2)))
    np.testing.assert_array_equal(estimate_constraint_jacobian([3.0], 1, 0.5, [1.0]), [[6.0]])


def test_scalar_shortcut_matches_matrix_path(rng):
    for _ in range(500):
        dim, m = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        u = sample_sphere(dim, rng)
        f, g, lam = rng.normal(), rng.normal(size=m), rng.random(m)
        delta = rng.uniform(0.01, 2)
        two_step = estimate_cost_gradient(f, dim, delta, u) + estimate_constraint_jacobian(g, dim, delta, u).T @ lam
        np.testing.assert_allclose(combined_direction(f, g, lam, dim, delta, u), two_step, rtol=1e-12, atol=1e-12)


def test_linear_cost_estimate_is_unbiased(rng):
    a = np.array([1.5, -0.5, 2.0])
    z, delta, n = np.array([0.2, 0.1, -0.3]), 0.4, 1_000_000
    u = rng.standard_normal((n, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    est = (3 / delta) * ((z + delta * u) @ a)[:, None] * u
    se = est.std(axis=0, ddof=1) / np.sqrt(n)
    assert np.all(np.abs(est.mean(axis=0) - a) <= 3 * se)


def test_smoothed_value_constant_and_linear(rng):
    assert smoothed_value(lambda x: 2.5, np.zeros(2), 0.3, 100, rng) == pytest.approx(2.5, abs=1e-12)
    a = np.array([1.0, -2.0])
    z = np.array([0.5, 0.25])
    mean, se = smoothed_value(lambda x: a @ x, z, 0.3, 20_000, rng, return_stderr=True)
    assert abs(mean - a @ z) <= 3 * se


def test_ball_samples_inside(rng):
    v = sample_ball(3, rng, 5000)
    assert np.all(np.linalg.norm(v, axis=1) <= 1.0)

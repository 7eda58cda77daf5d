"""One-point bandit gradient estimates from a single function value."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class PerturbationDraw:
    u: np.ndarray
    delta: float
    perturbed_point: np.ndarray


def sample_sphere(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform unit vector in R^dim (normalised Gaussian); {-1, +1} when dim is 1."""
    if dim < 1:
        raise ValueError("dim must be positive")
    g = rng.standard_normal(dim)
    return g / np.linalg.norm(g)


def sample_ball(dim: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` uniform draws from the unit ball, shape ``(size, dim)``."""
    g = rng.standard_normal((size, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random((size, 1)) ** (1.0 / dim)


def perturb(z, delta: float, u) -> PerturbationDraw:
    z = np.asarray(z, dtype=float)
    return PerturbationDraw(np.asarray(u), float(delta), z + delta * np.asarray(u))


def estimate_cost_gradient(value: float, dim: int, delta: float, u) -> np.ndarray:
    """``(dim / delta) * value * u``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return (dim / delta) * value * np.asarray(u, dtype=float)


def estimate_constraint_jacobian(values, dim: int, delta: float, u) -> np.ndarray:
    """``(dim / delta) * outer(values, u)``, an ``m x dim`` matrix."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    return (dim / delta) * np.outer(np.asarray(values, dtype=float), np.asarray(u, dtype=float))


def combined_direction(value, g_values, lam_tilde, dim, delta, u) -> np.ndarray:
    """Cost estimate plus ``Jhat^T lam_tilde`` using the scalar shortcut.

    Equals ``estimate_cost_gradient(...) + estimate_constraint_jacobian(...).T @ lam_tilde``
    without forming the matrix.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    scalar = value + float(np.dot(lam_tilde, g_values))
    return (dim / delta) * scalar * np.asarray(u, dtype=float)


def smoothed_value(
    f: Callable[[np.ndarray], float],
    z,
    delta: float,
    n_samples: int,
    rng: np.random.Generator,
    return_stderr: bool = False,
):
    """Monte Carlo estimate of ``E_v f(z + delta v)`` over the unit ball.

    With ``return_stderr`` the standard error of the mean is returned too.
    """
    z = np.asarray(z, dtype=float)
    v = sample_ball(z.shape[0], rng, n_samples)
    vals = np.array([f(z + delta * vi) for vi in v])
    se = vals.std(ddof=1) / np.sqrt(n_samples) if n_samples > 1 else 0.0
    if return_stderr:
        return float(vals.mean()), float(se)
    return float(vals.mean())

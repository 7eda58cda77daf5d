"""Distance-generating functions, Bregman divergences and the mirror step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, InfeasibleAnchor, StepNotConverged
from .sets import StrategySet

ANCHOR_TOL = 1e-9


@dataclass(frozen=True)
class Mirror:
    """A strongly convex generator ``phi`` with its gradient.

    ``kind == "euclidean"`` is ``phi(x) = 0.5 ||x||^2`` and has a closed-form
    mirror step (a projection). Custom generators are handled by an inner
    projected-gradient solver.

    ``lipschitz`` is the constant K with ``|D(a, c) - D(b, c)| <= K ||a - b||``
    on the strategy set; for the Euclidean generator it defaults to the set
    diameter.
    """

    kind: str = "euclidean"
    strong_convexity: float = 1.0
    value: Callable[[np.ndarray], float] | None = None
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    lipschitz: float | None = None
    max_iter: int = 10_000
    tol: float = 1e-9

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.strong_convexity != 1.0:
                raise ValueError("the Euclidean generator is 1-strongly convex")
        elif self.kind == "custom":
            if self.value is None or self.gradient is None:
                raise ValueError("custom mirror needs value and gradient callables")
            if self.strong_convexity <= 0:
                raise ValueError("strong convexity modulus must be positive")
        else:
            raise ValueError(f"unknown mirror kind {self.kind!r}")

    @classmethod
    def euclidean(cls, lipschitz: float | None = None) -> Mirror:
        return cls("euclidean", 1.0, lipschitz=lipschitz)

    @classmethod
    def custom(cls, value, gradient, strong_convexity: float, **kwargs) -> Mirror:
        return cls("custom", strong_convexity, value, gradient, **kwargs)

    def phi(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.kind == "euclidean":
            return 0.5 * float(x @ x)
        return float(self.value(x))

    def grad_phi(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "euclidean":
            return x
        return np.asarray(self.gradient(x), dtype=float)

    def K(self, S: StrategySet) -> float:
        if self.lipschitz is not None:
            return self.lipschitz
        if self.kind == "euclidean":
            return S.diameter
        raise ValueError("custom mirror has no stored Lipschitz constant")


def divergence(M: Mirror, theta, vartheta) -> float:
    """``D(theta, vartheta) = phi(theta) - phi(vartheta) - <grad phi(vartheta), theta - vartheta>``."""
    a = np.asarray(theta, dtype=float).reshape(-1)
    b = np.asarray(vartheta, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise DimensionMismatch(f"arguments have lengths {a.shape[0]} and {b.shape[0]}")
    diff = a - b
    if M.kind == "euclidean":
        return 0.5 * float(diff @ diff)
    return max(M.phi(a) - M.phi(b) - float(M.grad_phi(b) @ diff), 0.0)


def mirror_step(M: Mirror, S_shrunk: StrategySet, z, grad, alpha: float) -> np.ndarray:
    """``argmin_{w in S_shrunk} alpha <w, grad> + D(w, z)``.

    The anchor ``z`` must lie in ``S_shrunk``. For the Euclidean generator
    the minimiser is ``project(z - alpha * grad)``.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    g = np.asarray(grad, dtype=float).reshape(-1)
    if z.shape != g.shape or z.shape[0] != S_shrunk.dim:
        raise DimensionMismatch("anchor, gradient and set dimensions differ")
    if alpha < 0:
        raise ValueError("step size must be nonnegative")
    if S_shrunk.distance(z) > ANCHOR_TOL:
        raise InfeasibleAnchor(f"anchor is {S_shrunk.distance(z):.3e} outside the shrunk set")
    if M.kind == "euclidean":
        return S_shrunk.project(z - alpha * g)
    return _custom_step(M, S_shrunk, z, g, alpha)


def _custom_step(M: Mirror, S: StrategySet, z, g, alpha) -> np.ndarray:
    grad_z = M.grad_phi(z)
    lin = alpha * g - grad_z

    def objective(w):
        return float(lin @ w) + M.phi(w)

    def gradient(w):
        return lin + M.grad_phi(w)

    w = S.project(z)
    fw = objective(w)
    step = 1.0 / M.strong_convexity
    for _ in range(M.max_iter):
        gw = gradient(w)
        # backtracking on the projected-gradient step
        while True:
            w_new = S.project(w - step * gw)
            d = w_new - w
            f_new = objective(w_new)
            if f_new <= fw + gw @ d + (0.5 / step) * (d @ d) + 1e-15 * abs(fw):
                break
            step *= 0.5
            if step < 1e-16:
                raise StepNotConverged("backtracking step collapsed")
        residual = np.linalg.norm(d) / step
        w, fw = w_new, f_new
        if residual <= M.tol:
            return w
        step *= 2.0
    raise StepNotConverged(f"inner solver exceeded {M.max_iter} iterations")


def optimality_residual(M: Mirror, S: StrategySet, z, grad, alpha, w_star, probes) -> float:
    """Smallest ``<alpha g + grad phi(w*) - grad phi(z), w - w*>`` over the probes."""
    v = alpha * np.asarray(grad, dtype=float) + M.grad_phi(w_star) - M.grad_phi(z)
    diffs = np.asarray(probes, dtype=float) - np.asarray(w_star, dtype=float)
    return float(np.min(diffs @ v))

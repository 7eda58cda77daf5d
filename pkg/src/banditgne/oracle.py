"""Centralised references: the variational GNE trajectory and a full-information baseline.

The variational GNE at round t solves ``F_t(x*)'(x - x*) >= 0`` for all ``x``
in ``X_t = (X_1 x ... x X_N) ∩ {sum_i g_i(x_i) <= 0}``. It is computed by
extragradient iterations whose projections onto ``X_t`` are exact up to a
bisection tolerance (one coupled row) or by Dykstra's algorithm (several
rows). The local constraints must be affine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bregman import Mirror, mirror_step
from .errors import MissingGradients, NoConvergence
from .games import GameSpec
from .schedules import Schedule


@dataclass(frozen=True)
class GneSolution:
    t: int
    x_star: np.ndarray
    lambda_star: np.ndarray
    residual: float
    iterations: int = 0


@dataclass(frozen=True)
class CoupledConstraint:
    """``A x <= b`` with ``A`` of shape ``(m, n)``."""

    A: np.ndarray
    b: np.ndarray


def coupled_constraint(game: GameSpec, t: int) -> CoupledConstraint:
    """Affine coupled constraint of round t read off the local Jacobians."""
    if not game.constraints_affine:
        raise ValueError(f"game {game.name!r} has non-affine constraints; the oracle needs affine ones")
    if game.constraint_jacobian is None:
        raise MissingGradients(f"game {game.name!r} has no constraint Jacobians")
    A = np.hstack(
        [np.atleast_2d(game.constraint_jacobian(i, t, np.zeros(S.dim))) for i, S in enumerate(game.sets)]
    )
    g0 = sum(np.asarray(game.constraint(i, t, np.zeros(S.dim)), dtype=float) for i, S in enumerate(game.sets))
    return CoupledConstraint(A, -np.asarray(g0, dtype=float).reshape(game.m))


def _bisect_multiplier(game, y, a, b, tol=1e-13, max_iter=200):
    """Projection onto product ∩ {a'x <= b}; returns ``(x, nu)``."""
    x0 = game.project_product(y)
    if a @ x0 <= b or not np.any(a):
        return x0, 0.0
    hi = 1.0
    while a @ game.project_product(y - hi * a) > b:
        hi *= 2.0
        if hi > 1e300:
            raise NoConvergence("coupled constraint infeasible over the strategy sets")
    lo = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if a @ game.project_product(y - mid * a) > b:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return game.project_product(y - hi * a), hi


def project_feasible(game: GameSpec, y, cc: CoupledConstraint, tol: float = 1e-12, max_iter: int = 10_000):
    """Euclidean projection onto ``X_t``; returns ``(x, multipliers)``.

    The multipliers are those of the projection problem, i.e. ``y - x`` minus
    the normal-cone component of the product set equals ``A' nu``.
    """
    y = np.asarray(y, dtype=float)
    if cc.A.shape[0] == 1:
        x, nu = _bisect_multiplier(game, y, cc.A[0], float(cc.b[0]))
        return x, np.array([nu])
    # Dykstra over the product set and the individual halfspaces
    sets = [None] + list(range(cc.A.shape[0]))
    incr = [np.zeros_like(y) for _ in sets]
    x = y.copy()
    for _ in range(max_iter):
        # x can stall for a whole cycle while the corrections still move
        x_prev, incr_prev = x, [c.copy() for c in incr]
        for k, which in enumerate(sets):
            v = x + incr[k]
            if which is None:
                p = game.project_product(v)
            else:
                a, b = cc.A[which], cc.b[which]
                viol = a @ v - b
                p = v - (max(viol, 0.0) / (a @ a)) * a if a @ a > 0 else v
            incr[k] = v - p
            x = p
        change = np.linalg.norm(x - x_prev) + sum(np.linalg.norm(c - c0) for c, c0 in zip(incr, incr_prev))
        if change <= tol:
            break
    else:
        raise NoConvergence("Dykstra projection did not converge")
    nu = _recover_multipliers(game, y - x, x, cc)
    return x, nu


def _recover_multipliers(game: GameSpec, residual, x, cc: CoupledConstraint) -> np.ndarray:
    """Nonnegative ``nu`` with ``A' nu`` matching ``residual`` on free coordinates."""
    from scipy.optimize import nnls

    free = np.ones(x.shape[0], dtype=bool)
    for i, S in enumerate(game.sets):
        xi = game.block(x, i)
        sl = slice(game._offsets[i], game._offsets[i + 1])
        if S.kind == "box":
            free[sl] = (xi > S.lower + 1e-10) & (xi < S.upper - 1e-10)
        elif np.linalg.norm(xi - S.center) >= S.radius - 1e-10:
            free[sl] = False
    active = np.abs(cc.A @ x - cc.b) <= 1e-8
    nu = np.zeros(cc.A.shape[0])
    if active.any() and free.any():
        nu[active], _ = nnls(cc.A[active][:, free].T, residual[free])
    return nu


def _operator_lipschitz(game: GameSpec) -> float:
    M = game.params.get("M")
    if M is not None:
        return float(np.linalg.norm(M, 2))
    if np.isfinite(game.L):
        return float(game.L) * np.sqrt(game.n_players)
    return 1.0


def feasible_probes(game: GameSpec, x_star, cc: CoupledConstraint, n: int, rng) -> np.ndarray:
    """Random points of ``X_t``: product samples pulled toward ``x_star`` until feasible."""
    P = game.sample_profile(rng, n)
    D = P - x_star
    AD = D @ cc.A.T
    slack = cc.b - cc.A @ x_star
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(AD > 0, np.maximum(slack, 0.0) / AD, np.inf)
    theta = np.minimum(1.0, ratio.min(axis=1))
    return x_star + theta[:, None] * D


def vi_residual(game: GameSpec, t: int, x_star, probes) -> float:
    """``min_x F_t(x*)'(x - x*)`` over the probe points."""
    F = game.pseudo_gradient(t, x_star)
    return float(np.min((probes - x_star) @ F))


def natural_residual(game: GameSpec, t: int, x_star, lam_star, cc: CoupledConstraint) -> float:
    """``|| x* - P_prod(x* - (F(x*) + A' lam*)) ||``: zero exactly at a KKT point."""
    v = game.pseudo_gradient(t, x_star) + cc.A.T @ lam_star
    return float(np.linalg.norm(x_star - game.project_product(x_star - v)))


def solve_gne(
    game: GameSpec,
    t: int,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    x0=None,
    n_probes: int = 1000,
    rng: np.random.Generator | None = None,
) -> GneSolution:
    """Variational GNE of round t by projected extragradient."""
    if not game.has_gradients:
        raise MissingGradients(f"game {game.name!r} has no analytic gradients")
    cc = coupled_constraint(game, t)
    h = 0.5 / max(_operator_lipschitz(game), 1e-12)
    h = min(h, 1e6)
    x = project_feasible(game, game.project_product(np.zeros(game.n)) if x0 is None else x0, cc)[0]
    for k in range(1, max_iter + 1):
        x_half = project_feasible(game, x - h * game.pseudo_gradient(t, x), cc)[0]
        x_new = project_feasible(game, x - h * game.pseudo_gradient(t, x_half), cc)[0]
        step = np.linalg.norm(x_new - x)
        x = x_new
        if step <= tol:
            break
    else:
        raise NoConvergence(f"extragradient did not reach tol {tol:g} in {max_iter} iterations at t={t}")
    _, nu = project_feasible(game, x - h * game.pseudo_gradient(t, x), cc)
    lam = nu / h
    residual = np.nan
    if n_probes:
        rng = rng if rng is not None else np.random.default_rng(t)
        residual = vi_residual(game, t, x, feasible_probes(game, x, cc, n_probes, rng))
    return GneSolution(t, x, lam, residual, k)


def gne_trajectory(
    game: GameSpec,
    horizon: int,
    tol: float = 1e-10,
    tau: int = 0,
    n_probes: int = 1000,
    seed: int = 0,
    max_iter: int = 100_000,
) -> list[GneSolution]:
    """Warm-started solves for ``t = 1..horizon + tau + 1``.

    The extra round covers the path-variation term ``||x*_{T+1} - x*_T||``.
    """
    rng = np.random.default_rng(seed)
    out: list[GneSolution] = []
    x0 = None
    for t in range(1, horizon + tau + 2):
        if game.time_invariant and out:
            prev = out[-1]
            out.append(GneSolution(t, prev.x_star, prev.lambda_star, prev.residual, 0))
            continue
        sol = solve_gne(game, t, tol, max_iter, x0=x0, n_probes=n_probes, rng=rng)
        out.append(sol)
        x0 = sol.x_star
    return out


def centralized_baseline_step(game: GameSpec, t: int, x, lam, sched: Schedule, mirror: Mirror | None = None):
    """Full-information primal-dual mirror step with one shared multiplier.

    ``x'_i = argmin_{w in X_i} alpha_t <w, grad_i f_i(x) + J_i' lam> + D(w, x_i)``,
    ``lam' = [lam + gamma_t (g_t(x) - beta_t lam)]_+``.
    """
    if not game.has_gradients:
        raise MissingGradients(f"game {game.name!r} has no analytic gradients")
    mirror = mirror or Mirror.euclidean()
    p = sched.value_at(t)
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float).reshape(game.m)
    parts = game.blocks(x)
    new_parts = []
    for i, S in enumerate(game.sets):
        direction = game.cost_gradient(i, t, x) + np.atleast_2d(game.constraint_jacobian(i, t, parts[i])).T @ lam
        new_parts.append(mirror_step(mirror, S, parts[i], direction, p.alpha))
    lam_new = np.maximum(lam + p.gamma * (game.coupled(t, x) - p.beta * lam), 0.0)
    return game.join(new_parts), lam_new


def centralized_baseline_run(game: GameSpec, sched: Schedule, horizon: int, x0=None, mirror=None):
    """Iterates of the baseline for ``t = 1..horizon``; returns ``(X, Lam)`` arrays."""
    x = game.project_product(np.zeros(game.n)) if x0 is None else np.asarray(x0, dtype=float)
    lam = np.zeros(game.m)
    xs, lams = [x], [lam]
    for t in range(1, horizon):
        x, lam = centralized_baseline_step(game, t, x, lam, sched, mirror)
        xs.append(x)
        lams.append(lam)
    return np.array(xs), np.array(lams)

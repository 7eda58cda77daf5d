"""Time-varying games with private costs and locally separable coupled constraints.

A game is a table of pure evaluators. Joint profiles are flat vectors that
concatenate the players' blocks in index order; ``GameSpec.blocks`` splits
them. Player indices are 0-based in code. The Cournot benchmark's formulas
are written with 1-based firm labels, so it converts internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, MissingGradients, NotStronglyMonotone
from .sets import StrategySet


@dataclass(frozen=True)
class GameSpec:
    """Game ``Gamma(V, X_t, f_t)`` with coupled constraint ``sum_i g_i(x_i) <= 0``.

    Evaluator signatures (``i`` 0-based, ``x`` the flat joint profile,
    ``xi`` player ``i``'s block):

    - ``cost(i, t, x) -> float``
    - ``constraint(i, t, xi) -> (m,)``
    - ``cost_gradient(i, t, x) -> (n_i,)``, partial gradient in ``x_i``
    - ``constraint_jacobian(i, t, xi) -> (m, n_i)``

    ``costs`` and ``constraints`` are optional batched versions returning
    every player's value at once.
    """

    name: str
    sets: tuple[StrategySet, ...]
    m: int
    cost: Callable
    constraint: Callable
    B_x: float
    B_f: float
    B_g: float
    L_f: float = np.nan
    L_g: float = np.nan
    mu: float = np.nan
    L: float = np.nan
    cost_gradient: Callable | None = None
    constraint_jacobian: Callable | None = None
    costs_batch: Callable | None = None
    constraints_batch: Callable | None = None
    constraints_affine: bool = False
    time_invariant: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        offsets = np.concatenate([[0], np.cumsum([s.dim for s in self.sets])]).astype(int)
        object.__setattr__(self, "_offsets", offsets)

    @property
    def n_players(self) -> int:
        return len(self.sets)

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.sets]

    @property
    def n(self) -> int:
        return int(self._offsets[-1])

    @property
    def has_gradients(self) -> bool:
        return self.cost_gradient is not None and self.constraint_jacobian is not None

    def block(self, x, i: int) -> np.ndarray:
        return np.asarray(x)[self._offsets[i] : self._offsets[i + 1]]

    def blocks(self, x) -> list[np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n:
            raise DimensionMismatch(f"profile has length {x.shape[0]}, game has n = {self.n}")
        return [x[self._offsets[i] : self._offsets[i + 1]] for i in range(self.n_players)]

    def join(self, parts: Sequence[np.ndarray]) -> np.ndarray:
        return np.concatenate([np.asarray(p, dtype=float).reshape(-1) for p in parts])

    def with_block(self, x, i: int, xi) -> np.ndarray:
        """Copy of ``x`` with player ``i``'s block replaced by ``xi``."""
        y = np.array(x, dtype=float)
        y[self._offsets[i] : self._offsets[i + 1]] = xi
        return y

    def costs(self, t: int, x) -> np.ndarray:
        if self.costs_batch is not None:
            return np.asarray(self.costs_batch(t, x), dtype=float)
        return np.array([self.cost(i, t, x) for i in range(self.n_players)])

    def constraints(self, t: int, x) -> np.ndarray:
        """``(N, m)`` array of local constraint values."""
        if self.constraints_batch is not None:
            return np.asarray(self.constraints_batch(t, x), dtype=float)
        parts = self.blocks(x)
        return np.array(
            [np.asarray(self.constraint(i, t, parts[i]), dtype=float).reshape(self.m) for i in range(self.n_players)]
        )

    def coupled(self, t: int, x) -> np.ndarray:
        """``g_t(x) = sum_i g_i(x_i)``."""
        return self.constraints(t, x).sum(axis=0)

    def pseudo_gradient(self, t: int, x) -> np.ndarray:
        if self.cost_gradient is None:
            raise MissingGradients(f"game {self.name!r} has no analytic gradients")
        return np.concatenate(
            [np.asarray(self.cost_gradient(i, t, x), dtype=float).reshape(-1) for i in range(self.n_players)]
        )

    def sample_profile(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Uniform draw from the product set (``size`` rows if given)."""
        if size is None:
            return self.join([s.sample(rng) for s in self.sets])
        return np.hstack([s.sample(rng, size) for s in self.sets])

    def project_product(self, x) -> np.ndarray:
        return self.join([s.project(xi) for s, xi in zip(self.sets, self.blocks(x))])


# ---------------------------------------------------------------------------
# time coefficients for scripted games


@dataclass(frozen=True)
class TimeCoefficient:
    """``const + amp * sin(t / period + phase) + sum_k poly[k] t^(k+1)``, vector valued."""

    const: np.ndarray
    amp: np.ndarray | None = None
    period: float = 1.0
    phase: float = 0.0
    poly: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.const, dtype=float))
        object.__setattr__(self, "const", c)
        if self.amp is not None:
            object.__setattr__(self, "amp", np.broadcast_to(np.asarray(self.amp, dtype=float), c.shape).copy())
        object.__setattr__(
            self, "poly", tuple(np.broadcast_to(np.asarray(p, dtype=float), c.shape).copy() for p in self.poly)
        )

    @classmethod
    def from_config(cls, entry) -> TimeCoefficient:
        if not isinstance(entry, dict):
            return cls(entry)
        return cls(
            entry.get("const", 0.0),
            entry.get("amp"),
            float(entry.get("period", 1.0)),
            float(entry.get("phase", 0.0)),
            tuple(entry.get("poly", ())),
        )

    def __call__(self, t: float) -> np.ndarray:
        v = self.const.copy()
        if self.amp is not None:
            v = v + self.amp * np.sin(t / self.period + self.phase)
        for k, p in enumerate(self.poly):
            v = v + p * float(t) ** (k + 1)
        return v

    def sup_norm(self, horizon: int) -> float:
        """Largest Euclidean norm over integer rounds ``1..horizon``."""
        if self.amp is None and not self.poly:
            return float(np.linalg.norm(self.const))
        ts = np.arange(1, horizon + 1, dtype=float)
        vals = np.tile(self.const, (ts.size, 1))
        if self.amp is not None:
            vals = vals + np.outer(np.sin(ts / self.period + self.phase), self.amp)
        for k, p in enumerate(self.poly):
            vals = vals + np.outer(ts ** (k + 1), p)
        return float(np.max(np.linalg.norm(vals, axis=1)))

    @property
    def constant(self) -> bool:
        return self.amp is None and not self.poly


# ---------------------------------------------------------------------------
# affine-quadratic games


def affine_quadratic_game(
    sets: Sequence[StrategySet],
    Q: Sequence[np.ndarray],
    C: dict[tuple[int, int], np.ndarray] | None,
    q: Sequence[Callable[[float], np.ndarray]],
    A: Sequence[np.ndarray],
    b: Sequence[Callable[[float], np.ndarray]],
    name: str = "affine-quadratic",
    horizon: int = 10_000,
    strength: float = 0.0,
    params: dict | None = None,
) -> GameSpec:
    """Game with ``f_i = 0.5 x_i'Q_i x_i + x_i' sum_{j != i} C_ij x_j + q_i(t)'x_i``
    and ``g_i = A_i x_i - b_i(t)``.

    Its pseudo-gradient ``F(x) = M x + q(t)`` is affine, so the strong
    monotonicity modulus is the smallest eigenvalue of ``(M + M')/2``.
    ``horizon`` bounds the rounds over which the value bounds are certified.
    Raises ``NotStronglyMonotone`` when that eigenvalue is below ``strength``.
    """
    sets = tuple(sets)
    N = len(sets)
    dims = [s.dim for s in sets]
    off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    n = int(off[-1])
    C = dict(C or {})
    Qs = [np.atleast_2d(np.asarray(Qi, dtype=float)) for Qi in Q]
    As = [np.atleast_2d(np.asarray(Ai, dtype=float)) for Ai in A]
    m = As[0].shape[0]
    for i in range(N):
        if Qs[i].shape != (dims[i], dims[i]) or As[i].shape != (m, dims[i]):
            raise DimensionMismatch(f"coefficient shapes for player {i} do not match dim {dims[i]}")

    M = np.zeros((n, n))
    for i in range(N):
        M[off[i] : off[i + 1], off[i] : off[i + 1]] = Qs[i]
        for j in range(N):
            if j != i and (i, j) in C:
                M[off[i] : off[i + 1], off[j] : off[j + 1]] = np.asarray(C[(i, j)], dtype=float)
    mu = float(np.min(np.linalg.eigvalsh(0.5 * (M + M.T))))
    if mu < strength:
        raise NotStronglyMonotone(f"monotonicity margin {mu:.6g} below required {strength:.6g}")
    L = max(float(np.linalg.norm(M[off[i] : off[i + 1]], 2)) for i in range(N))

    R = np.array([s.outer_radius for s in sets])
    q_sup = np.array([qi.sup_norm(horizon) if hasattr(qi, "sup_norm") else np.nan for qi in q])
    b_sup = np.array([bi.sup_norm(horizon) if hasattr(bi, "sup_norm") else np.nan for bi in b])
    B_f = L_f = 0.0
    for i in range(N):
        others = sum(
            np.linalg.norm(C[(i, j)], 2) * R[j] for j in range(N) if j != i and (i, j) in C
        )
        B_f = max(B_f, 0.5 * np.linalg.norm(Qs[i], 2) * R[i] ** 2 + R[i] * others + q_sup[i] * R[i])
        L_f = max(L_f, np.linalg.norm(Qs[i], 2) * R[i] + others + q_sup[i])
    B_g = max(np.linalg.norm(As[i], 2) * R[i] + b_sup[i] for i in range(N))
    L_g = max(np.linalg.norm(As[i], 2) for i in range(N))

    def grad_i(i, t, x):
        return M[off[i] : off[i + 1]] @ x + q[i](t)

    def cost(i, t, x):
        x = np.asarray(x, dtype=float)
        xi = x[off[i] : off[i + 1]]
        cross = M[off[i] : off[i + 1]] @ x - Qs[i] @ xi
        return float(0.5 * xi @ Qs[i] @ xi + xi @ cross + q[i](t) @ xi)

    def constraint(i, t, xi):
        return As[i] @ np.asarray(xi, dtype=float).reshape(-1) - b[i](t)

    def jac(i, t, xi):
        return As[i].copy()

    time_invariant = all(getattr(c, "constant", False) for c in list(q) + list(b))
    info = {"M": M, "mu_margin": mu}
    info.update(params or {})
    return GameSpec(
        name=name,
        sets=sets,
        m=m,
        cost=cost,
        constraint=constraint,
        B_x=float(np.linalg.norm(R)),
        B_f=float(B_f),
        B_g=float(B_g),
        L_f=float(L_f),
        L_g=float(L_g),
        mu=mu,
        L=L,
        cost_gradient=grad_i,
        constraint_jacobian=jac,
        constraints_affine=True,
        time_invariant=time_invariant,
        params=info,
    )


def quadratic_test_game(
    n_players: int,
    dims: int,
    coupling: float,
    strength: float = 1e-12,
    centers=None,
    drift: float = 0.0,
    period: float = 12.0,
    lower: float = -5.0,
    upper: float = 5.0,
    budget=None,
) -> GameSpec:
    """Synthetic strongly monotone game.

    ``f_i(x) = 0.5 ||x_i||^2 - c_i(t)'x_i + coupling * x_i' sum_{j != i} x_j`` with
    ``c_i(t) = centers_i + drift * sin(t / period)``. With ``budget`` the players
    share ``sum_i 1'x_i <= sum_i budget_i`` (``g_i = 1'x_i - budget_i``);
    otherwise ``g_i == 0`` (m = 1).
    """
    N, d = int(n_players), int(dims)
    if centers is None:
        centers = np.zeros((N, d))
    else:
        centers = np.asarray(centers, dtype=float)
        centers = centers.reshape(N, d) if centers.size == N * d else np.broadcast_to(centers, (N, d))
    sets = [StrategySet.box(np.full(d, lower), np.full(d, upper)) for _ in range(N)]
    Q = [np.eye(d)] * N
    C = {(i, j): coupling * np.eye(d) for i in range(N) for j in range(N) if i != j}
    amp = None if drift == 0 else np.full(d, float(drift))
    q = [TimeCoefficient(-centers[i], None if amp is None else -amp, period) for i in range(N)]
    if budget is None:
        A = [np.zeros((1, d))] * N
        b = [TimeCoefficient(np.zeros(1))] * N
    else:
        budgets = np.broadcast_to(np.asarray(budget, dtype=float), (N,))
        A = [np.ones((1, d))] * N
        b = [TimeCoefficient(np.array([budgets[i]])) for i in range(N)]
    params = dict(coupling=coupling, centers=centers.tolist(), drift=drift, period=period, budget=budget)
    return affine_quadratic_game(sets, Q, C, q, A, b, name="quadratic", strength=strength, params=params)


# ---------------------------------------------------------------------------
# Nash-Cournot benchmark

COURNOT_PLAYERS = 20
COURNOT_BOX = (0.0, 30.0)


def _season(t) -> float:
    return np.sin(t / 12.0)


def cournot_capacity(i: int, t) -> float:
    """Local capacity ``l_{i,t} = 10 + sin(t/12)`` (same for every firm)."""
    return 10.0 + _season(t)


def cournot_game(n_players: int = COURNOT_PLAYERS) -> GameSpec:
    """Online Nash-Cournot game, costs implemented literally as production cost minus price.

    Firm ``k = i + 1`` pays ``x_k (sin(t/12) + 1) - (21 + k/9 - 0.5 k sin(t/12) - sum_j x_j)``
    and owns ``g_k = x_k - (10 + sin(t/12))``.
    """
    N = int(n_players)
    lo, hi = COURNOT_BOX
    sets = [StrategySet.box([lo], [hi]) for _ in range(N)]
    labels = np.arange(1, N + 1, dtype=float)

    def costs_batch(t, x):
        x = np.asarray(x, dtype=float)
        s = _season(t)
        price = 21.0 + labels / 9.0 - 0.5 * labels * s - x.sum()
        return x * (s + 1.0) - price

    def cost(i, t, x):
        return float(costs_batch(t, x)[i])

    def constraints_batch(t, x):
        return (np.asarray(x, dtype=float) - cournot_capacity(0, t)).reshape(N, 1)

    def constraint(i, t, xi):
        return np.asarray(xi, dtype=float).reshape(1) - cournot_capacity(i, t)

    def grad(i, t, x):
        # d/dx_i of x_i (s + 1) + sum_j x_j
        return np.array([_season(t) + 2.0])

    def jac(i, t, xi):
        return np.ones((1, 1))

    # interval arithmetic over s in [-1, 1], x in the box
    upper = 2 * hi + 0.5 * labels + N * hi - 21.0 - labels / 9.0
    lower = -0.5 * labels - 21.0 - labels / 9.0
    B_f = float(np.max(np.maximum(np.abs(upper), np.abs(lower))))
    B_g = float(max(hi - 9.0, 11.0 - lo))
    return GameSpec(
        name="cournot",
        sets=sets,
        m=1,
        cost=cost,
        constraint=constraint,
        B_x=hi * np.sqrt(N),
        B_f=B_f,
        B_g=B_g,
        L_f=3.0,
        L_g=1.0,
        # the pseudo-gradient (s + 2) 1 is constant in x
        mu=0.0,
        L=0.0,
        cost_gradient=grad,
        constraint_jacobian=jac,
        costs_batch=costs_batch,
        constraints_batch=constraints_batch,
        constraints_affine=True,
        params={"n_players": N},
    )


def cournot_closed_form_gne(t, n_players: int = COURNOT_PLAYERS) -> np.ndarray:
    """Published equilibrium formula ``P_[0,30]((k-10)/9 + (10-k)/2 sin(t/12))``, ``k = 1..N``."""
    k = np.arange(1, n_players + 1, dtype=float)
    xi = (k - 10.0) / 9.0 + 0.5 * (10.0 - k) * _season(t)
    return np.clip(xi, *COURNOT_BOX)


# ---------------------------------------------------------------------------
# structural checks


def check_strong_monotonicity(game: GameSpec, rng, n_pairs: int = 10_000, t_max: int = 1000) -> float:
    """Smallest ``(F(x) - F(y))'(x - y) - mu ||x - y||^2`` over random pairs."""
    worst = np.inf
    for _ in range(n_pairs):
        t = int(rng.integers(1, t_max + 1))
        x, y = game.sample_profile(rng), game.sample_profile(rng)
        d = x - y
        gap = (game.pseudo_gradient(t, x) - game.pseudo_gradient(t, y)) @ d - game.mu * (d @ d)
        worst = min(worst, float(gap))
    return worst


def check_value_bounds(game: GameSpec, rng, n_samples: int = 10_000, t_max: int = 10_000) -> tuple[float, float]:
    """Largest observed ``|f_i|`` and ``||g_i||`` over random feasible samples."""
    f_max = g_max = 0.0
    for _ in range(n_samples):
        t = int(rng.integers(1, t_max + 1))
        x = game.sample_profile(rng)
        f_max = max(f_max, float(np.max(np.abs(game.costs(t, x)))))
        g_max = max(g_max, float(np.max(np.linalg.norm(game.constraints(t, x), axis=1))))
    return f_max, g_max


def finite_difference_gradient(game: GameSpec, i: int, t: int, x, h: float = 1e-6) -> np.ndarray:
    """Central differences of ``f_i`` in player ``i``'s own coordinates."""
    xi = game.block(x, i)
    out = np.empty(xi.shape[0])
    for k in range(xi.shape[0]):
        e = np.zeros_like(xi)
        e[k] = h
        plus = game.cost(i, t, game.with_block(x, i, xi + e))
        minus = game.cost(i, t, game.with_block(x, i, xi - e))
        out[k] = (plus - minus) / (2 * h)
    return out

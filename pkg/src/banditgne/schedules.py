"""Power-law step-size, regularisation and exploration sequences.

Delay-free runs use

    alpha_t = t^-a1, beta_t = t^-a2, gamma_t = t^-(1-a2),
    delta_t = r_min t^-a3, eta_t = t^-a3.

The delayed variant holds alpha, beta, gamma at 1 for ``t <= tau`` and then
runs them on the shifted clock ``t - tau``; delta and eta stay on ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidExponents

VARIANTS = ("delay_free", "delayed")


class Parameters(NamedTuple):
    alpha: float
    beta: float
    gamma: float
    delta: float
    eta: float


def schedule_conditions(a1: float, a2: float, a3: float, variant: str) -> list[str]:
    """Names of the violated exponent conditions (empty when valid)."""
    failed = []
    for name, a in (("a1", a1), ("a2", a2), ("a3", a3)):
        if not 0.0 <= a <= 1.0:
            failed.append(f"{name} in [0, 1]")
    if variant == "delay_free" and not a1 < 0.5:
        failed.append("a1 < 0.5")
    if not a1 - 2 * a2 - 2 * a3 > 0:
        failed.append("a1 - 2*a2 - 2*a3 > 0")
    if not a2 < a3:
        failed.append("a2 < a3")
    return failed


@dataclass(frozen=True)
class Schedule:
    a1: float
    a2: float
    a3: float
    r_min: float
    tau: int = 0
    variant: str = "delay_free"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise InvalidExponents(f"unknown variant {self.variant!r}")
        if self.r_min <= 0:
            raise InvalidExponents("r_min must be positive")
        if self.tau < 0 or int(self.tau) != self.tau:
            raise InvalidExponents("tau must be a nonnegative integer")
        if self.variant == "delay_free" and self.tau != 0:
            raise InvalidExponents("delay-free schedules have tau = 0")
        failed = schedule_conditions(self.a1, self.a2, self.a3, self.variant)
        if failed:
            raise InvalidExponents("violated: " + "; ".join(failed))

    def value_at(self, t: int) -> Parameters:
        if t < 1:
            raise ValueError("rounds start at t = 1")
        if self.variant == "delayed" and t <= self.tau:
            alpha = beta = gamma = 1.0
        else:
            s = float(t - self.tau) if self.variant == "delayed" else float(t)
            alpha = s ** -self.a1
            beta = s ** -self.a2
            gamma = s ** -(1.0 - self.a2)
        eta = float(t) ** -self.a3
        return Parameters(alpha, beta, gamma, self.r_min * eta, eta)

    def gamma(self, t: int) -> float:
        """gamma_t with the convention gamma_0 = 1."""
        return 1.0 if t == 0 else self.value_at(t).gamma

    def arrays(self, horizon: int) -> dict[str, np.ndarray]:
        """All five sequences for ``t = 1..horizon``."""
        vals = np.array([self.value_at(t) for t in range(1, horizon + 1)])
        return {name: vals[:, k] for k, name in enumerate(Parameters._fields)}


def corollary2_exponents() -> tuple[float, float, float]:
    """Balanced exponents (3/7, 0, 1/7): equal regret and violation orders T^(13/14)."""
    a2 = 0.0
    return 3.0 / 7.0 + 4.0 / 7.0 * a2, a2, 1.0 / 7.0 - a2 / 7.0


def consensus_envelope(sched: Schedule, t: int, sigma_m: float, n_players: int, B_g: float) -> float:
    """``2 sqrt(N) B_g sum_{s=0}^{t-1} sigma^s gamma_{t-1-s}``."""
    s = np.arange(t)
    gammas = np.array([sched.gamma(t - 1 - k) for k in s])
    # 0 ** 0 == 1 keeps the leading term when sigma_m is zero
    weights = np.power(float(sigma_m), s)
    return 2.0 * np.sqrt(n_players) * B_g * float(weights @ gammas)


class ConsensusEnvelope:
    """Incremental evaluation of the consensus envelope along a run.

    Uses ``S_t = sigma * S_{t-1} + gamma_{t-1}`` with ``S_0 = 0``.
    """

    def __init__(self, sched: Schedule, sigma_m: float, n_players: int, B_g: float):
        self.sched = sched
        self.sigma = float(sigma_m)
        self.scale = 2.0 * np.sqrt(n_players) * B_g
        self.t = 0
        self.acc = 0.0

    def advance(self) -> float:
        self.acc = self.sigma * self.acc + self.sched.gamma(self.t)
        self.t += 1
        return self.scale * self.acc


def gamma_recursion_slack(sched: Schedule, horizon: int) -> np.ndarray:
    """``1/gamma_t - 1/gamma_{t-1} - beta_t`` for ``t = 2..horizon``, relative to ``1/gamma_t``.

    Nonpositive (up to rounding) for every valid schedule; with ``a2 = 0`` it is
    zero exactly, so compare against a few ulps rather than 0.
    """
    arr = sched.arrays(horizon)
    inv = 1.0 / arr["gamma"]
    return (inv[1:] - inv[:-1] - arr["beta"][1:]) / inv[1:]

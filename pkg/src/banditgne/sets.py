"""Compact convex strategy sets: boxes and Euclidean balls.

Both kinds carry an interior ``center`` and the radius of the largest ball
about it that fits inside the set. Shrinking contracts the set toward that
center, which keeps the perturbation ``z + delta * u`` feasible whenever
``delta <= inner_radius * eta``, whether or not the origin is interior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch


@dataclass(frozen=True)
class StrategySet:
    kind: str
    center: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    radius: float | None = None

    def __post_init__(self):
        for name in ("center", "lower", "upper"):
            val = getattr(self, name)
            if val is not None:
                arr = np.array(val, dtype=float).reshape(-1)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)
        if self.kind == "box":
            if self.lower is None or self.upper is None:
                raise ValueError("box needs lower and upper bounds")
            if self.lower.shape != self.upper.shape:
                raise DimensionMismatch("lower and upper bounds differ in length")
            # degenerate boxes arise from shrinking with eta = 1
            if np.any(self.lower > self.upper):
                raise ValueError("box needs lower <= upper in every coordinate")
        elif self.kind == "ball":
            if self.radius is None or self.radius < 0:
                raise ValueError("ball needs a nonnegative radius")
        else:
            raise ValueError(f"unknown set kind {self.kind!r}")

    @classmethod
    def box(cls, lower, upper) -> StrategySet:
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        if lo.shape != hi.shape:
            raise DimensionMismatch("lower and upper bounds differ in length")
        if np.any(lo >= hi):
            raise ValueError("box needs lower < upper in every coordinate")
        return cls("box", center=0.5 * (lo + hi), lower=lo, upper=hi)

    @classmethod
    def ball(cls, center, radius: float) -> StrategySet:
        if radius <= 0:
            raise ValueError("ball needs a positive radius")
        return cls("ball", center=np.atleast_1d(np.asarray(center, dtype=float)), radius=float(radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def inner_radius(self) -> float:
        if self.kind == "box":
            return float(np.min(self.upper - self.lower) / 2)
        return float(self.radius)

    @property
    def outer_radius(self) -> float:
        """Radius of the smallest origin-centred ball containing the set."""
        if self.kind == "box":
            far = np.maximum(np.abs(self.lower), np.abs(self.upper))
            return float(np.linalg.norm(far))
        return float(np.linalg.norm(self.center) + self.radius)

    @property
    def diameter(self) -> float:
        if self.kind == "box":
            return float(np.linalg.norm(self.upper - self.lower))
        return 2.0 * float(self.radius)

    def _check(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float).reshape(-1)
        if p.shape[0] != self.dim:
            raise DimensionMismatch(f"point has length {p.shape[0]}, set has dim {self.dim}")
        return p

    def project(self, point) -> np.ndarray:
        """Euclidean projection onto the set."""
        p = self._check(point)
        if self.kind == "box":
            return np.minimum(np.maximum(p, self.lower), self.upper)
        d = p - self.center
        dist = np.linalg.norm(d)
        if dist <= self.radius:
            return p.copy()
        return self.center + d * (self.radius / dist)

    def distance(self, point) -> float:
        p = self._check(point)
        return float(np.linalg.norm(p - self.project(p)))

    def contains(self, point, tol: float = 0.0) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        return self.distance(point) <= tol

    def shrink(self, eta: float) -> StrategySet:
        """The set ``c + (1 - eta)(S - c)`` for the stored center ``c``."""
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {eta}")
        if eta == 0.0:
            return self
        scale = 1.0 - eta
        if self.kind == "box":
            c = self.center
            return StrategySet(
                "box",
                center=c,
                lower=c + scale * (self.lower - c),
                upper=c + scale * (self.upper - c),
            )
        return StrategySet("ball", center=self.center, radius=scale * self.radius)

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Uniform draw from the set; ``size`` draws stacked row-wise if given."""
        if size is None:
            if self.kind == "box":
                return self.lower + (self.upper - self.lower) * rng.random(self.dim)
            g = rng.standard_normal(self.dim)
            g /= np.linalg.norm(g)
            return self.center + self.radius * rng.random() ** (1.0 / self.dim) * g
        if self.kind == "box":
            return self.lower + (self.upper - self.lower) * rng.random((size, self.dim))
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return self.center + self.radius * rng.random((size, 1)) ** (1.0 / self.dim) * g

    def to_config(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


def set_from_config(entry: dict) -> StrategySet:
    kind = entry.get("kind")
    if kind == "box":
        return StrategySet.box(entry["lower"], entry["upper"])
    if kind == "ball":
        return StrategySet.ball(entry["center"], entry["radius"])
    raise ValueError(f"unknown strategy set kind {kind!r}")

"""Mirror worldlines parametrized by the mirror position ``x``.

The asymptotically static mirror follows ``g v = -sinh(2 kappa x)`` with
``v = t + x`` the advanced null time.  The Schwarzschild mirror
``kappa v = -exp(2 kappa x)`` is its late-time limit and is provided for
comparison.  Units have ``c = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .exceptions import DomainError, TrajectoryOverflow

__all__ = [
    "MirrorParams",
    "WorldlinePoint",
    "sinh_advanced_time",
    "sinh_coordinate_time",
    "sinh_velocity",
    "schwarzschild_advanced_time",
    "worldline_sample",
]

# |2 kappa x| beyond this raises instead of returning inf
OVERFLOW_THRESHOLD = 700.0

# g / kappa below this is flagged as outside the thermal regime
THERMAL_RATIO = 100.0


@dataclass(frozen=True)
class MirrorParams:
    """Scales of the sinh mirror: ``kappa`` (temperature ``kappa/2pi``) and ``g``."""

    kappa: float
    g: float

    def __post_init__(self):
        for name in ("kappa", "g"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)
        if not math.isfinite(self.ratio):
            raise DomainError("g / kappa must be finite")

    @property
    def ratio(self) -> float:
        return self.g / self.kappa

    @property
    def thermal_regime(self) -> bool:
        """True when ``g / kappa`` is large enough for the closed-form spectrum."""
        return self.ratio >= THERMAL_RATIO

    @property
    def temperature(self) -> float:
        return self.kappa / (2.0 * math.pi)


@dataclass(frozen=True)
class WorldlinePoint:
    """One event on the worldline.  ``v`` is derived, so ``v == t + x`` exactly."""

    x: float
    t: float
    velocity: float

    @property
    def v(self) -> float:
        return self.t + self.x


def _phase(x: float, kappa: float) -> float:
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    u = 2.0 * kappa * x
    if abs(u) > OVERFLOW_THRESHOLD:
        raise TrajectoryOverflow(f"|2 kappa x| = {abs(u):.6g} exceeds {OVERFLOW_THRESHOLD:g}")
    return u


def sinh_advanced_time(x: float, p: MirrorParams) -> float:
    """Advanced time ``v(x) = -sinh(2 kappa x) / g`` along the sinh mirror."""
    return -math.sinh(_phase(x, p.kappa)) / p.g


def sinh_coordinate_time(x: float, p: MirrorParams) -> float:
    """Lab time ``t(x) = v(x) - x``; strictly decreasing in ``x``."""
    return sinh_advanced_time(x, p) - x


def sinh_velocity(x: float, p: MirrorParams) -> float:
    """Mirror velocity ``dx/dt = -1 / (1 + (2 kappa / g) cosh(2 kappa x))``.

    Always in ``(-1, 0)``; the speed peaks at ``x = 0`` and decays to zero in
    both directions, so the worldline is time-like and asymptotically static.
    """
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    u = abs(2.0 * p.kappa * x)
    if u > OVERFLOW_THRESHOLD:
        # cosh(u) ~ e^u / 2 would overflow; the speed is below 1e-300 here
        return -0.0
    return -1.0 / (1.0 + (2.0 / p.ratio) * math.cosh(u))


def schwarzschild_advanced_time(x: float, kappa: float) -> float:
    """Advanced time ``v(x) = -exp(2 kappa x) / kappa`` of the Schwarzschild mirror."""
    if not (math.isfinite(kappa) and kappa > 0):
        raise DomainError(f"kappa must be finite and > 0, got {kappa!r}")
    return -math.exp(_phase(x, kappa)) / kappa


def worldline_sample(x_grid: Iterable[float], p: MirrorParams) -> list[WorldlinePoint]:
    """Tabulate ``(x, t, v, velocity)`` on a sorted grid of mirror positions."""
    xs = [float(x) for x in x_grid]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise DomainError("x_grid must be sorted")
    return [WorldlinePoint(x, sinh_coordinate_time(x, p), sinh_velocity(x, p)) for x in xs]

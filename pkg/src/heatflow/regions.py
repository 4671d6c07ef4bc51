"""Moving-region schedules for the L^p concentration of the heat kernel.

A schedule bundles the three time-dependent radii that carve out the
critical regions: r(t) (annulus half-width, p < 2), eps(t) (inner/outer
cutoffs at p = 2) and R(t) (ball radius, p > 2), together with numerical
checks of the growth conditions each must satisfy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable


def _default_r(t: float) -> float:
    return t ** 0.75


def _default_eps(t: float) -> float:
    return t ** -0.25


def _default_R(t: float) -> float:
    # log(t)^2 outgrows log t and is o(sqrt t) on the test range; a plain
    # sqrt(t)/log(t) ball leaves an O(1) sup-norm tail at desk scales.
    return math.log(t) ** 2


@dataclass(frozen=True)
class RegionSchedule:
    """r(t), eps(t), R(t) with admissibility checks at the range endpoints."""

    r_of_t: Callable[[float], float] = field(default=_default_r)
    eps_of_t: Callable[[float], float] = field(default=_default_eps)
    R_of_t: Callable[[float], float] = field(default=_default_R)

    def validate(self, t_lo: float = 10.0, t_hi: float = 1e4) -> None:
        """Check the defining limits directionally at t_lo and t_hi."""
        r_lo, r_hi = self.r_of_t(t_lo), self.r_of_t(t_hi)
        if not (r_hi / t_hi < r_lo / t_lo):
            raise ValueError("r(t)/t must decrease toward 0")
        if not (r_hi / math.sqrt(t_hi) > r_lo / math.sqrt(t_lo)):
            raise ValueError("r(t)/sqrt(t) must grow")
        e_lo, e_hi = self.eps_of_t(t_lo), self.eps_of_t(t_hi)
        if not (e_hi < e_lo):
            raise ValueError("eps(t) must decrease")
        if not (e_hi * math.sqrt(t_hi) > e_lo * math.sqrt(t_lo)):
            raise ValueError("eps(t)*sqrt(t) must grow")
        R_lo, R_hi = self.R_of_t(t_lo), self.R_of_t(t_hi)
        if not (R_hi / math.log(t_hi) > R_lo / math.log(t_lo)):
            raise ValueError("R(t)/log t must grow")
        if not (R_hi / math.sqrt(t_hi) < R_lo / math.sqrt(t_lo)):
            raise ValueError("R(t)/sqrt t must decrease")

    def annulus(self, p: float, rho_norm: float, t: float) -> tuple[float, float]:
        """Radial interval of the p < 2 region for a rank-one space."""
        center = 2.0 * (2.0 / p - 1.0) * rho_norm * t
        half = self.r_of_t(t)
        return max(center - half, 0.0), center + half

    def band2(self, t: float) -> tuple[float, float]:
        """Radial interval of the p = 2 region."""
        e = self.eps_of_t(t)
        return e * math.sqrt(t), math.sqrt(t) / e

    def ball(self, t: float) -> float:
        """Radius of the p > 2 region."""
        return self.R_of_t(t)


def default_schedule() -> RegionSchedule:
    return RegionSchedule()

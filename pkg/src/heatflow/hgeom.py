"""Hyperboloid-model geometry of H^n.

Points live in polar coordinates (r, omega); the embedding into Minkowski
space is used only as a cross-check oracle in the tests.  Distances are
evaluated through a decomposition of cosh d into four nonnegative
exponential terms, so the log-domain branch is cancellation-free at any
radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .logval import LOG_ZERO, LogVal
from .quadrature import (QuadratureError, adaptive_log_integral, jacobi_rule,
                         legendre_rule)

_LOG_CROSSOVER = 30.0  # switch to the asymptotic arccosh branch above this


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return 2.0 * math.pi ** (0.5 * n) / math.gamma(0.5 * n)


@dataclass(frozen=True)
class HPoint:
    """Point of H^n: geodesic distance r from the origin, direction omega."""

    n: int
    r: float
    omega: tuple[float, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if self.r < 0:
            raise ValueError("radius must be nonnegative")
        w = np.asarray(self.omega, dtype=float)
        if w.shape != (self.n,):
            raise ValueError("direction must have length n")
        if abs(np.linalg.norm(w) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")

    @staticmethod
    def axial(n: int, r: float, angle: float = 0.0) -> "HPoint":
        """Point in the (e1, e2) plane at polar angle `angle` from +e1."""
        w = np.zeros(n)
        w[0], w[1] = math.cos(angle), math.sin(angle)
        return HPoint(n, r, tuple(w))

    @staticmethod
    def origin(n: int) -> "HPoint":
        w = np.zeros(n)
        w[0] = 1.0
        return HPoint(n, 0.0, tuple(w))

    def embedding(self) -> np.ndarray:
        """(cosh r, sinh r * omega) in Minkowski R^{1,n}; overflow-prone,
        intended for moderate radii / test oracles."""
        w = np.asarray(self.omega)
        return np.concatenate([[math.cosh(self.r)], math.sinh(self.r) * w])


@dataclass(frozen=True)
class AxialConfig:
    """Declares that all centers of a configuration lie in one 2-plane,
    which reduces every L^p integral over H^n to (r, theta) quadrature."""

    n: int
    plane_axes: tuple[int, int] = (0, 1)

    def check_center(self, point: HPoint, tol: float = 1e-12) -> None:
        w = np.asarray(point.omega)
        mask = np.ones(self.n, dtype=bool)
        mask[list(self.plane_axes)] = False
        if np.any(np.abs(w[mask]) > tol):
            raise ValueError("center leaves the configured axial plane")


def cosh_dist_log(r, s, cosang):
    """log(cosh d(P,Q)) for P=(r,.), Q=(s,.) with cos angle(omega, omega').

    4 cosh d = e^{r+s}(1-c) + 2 cosh(r-s)(1+c) + e^{-r-s}(1-c); every term
    is nonnegative, so log-sum-exp is exact at any scale.  Vectorized.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    c = np.clip(np.asarray(cosang, dtype=float), -1.0, 1.0)
    with np.errstate(divide="ignore"):
        log_1m = np.log(np.maximum(1.0 - c, 0.0))
        log_1p = np.log(np.maximum(1.0 + c, 0.0))
    d = np.abs(r - s)
    terms = np.stack([
        (r + s) + log_1m,
        d + log_1p + np.log1p(np.exp(-2.0 * d)),   # (e^d + e^-d)(1+c)
        -(r + s) + log_1m,
    ])
    top = np.max(terms, axis=0)
    return top + np.log(np.sum(np.exp(terms - top), axis=0)) - math.log(4.0)


def distance_rc(r, s, cosang):
    """Geodesic distance from polar data, vectorized and log-stable."""
    lc = cosh_dist_log(r, s, cosang)
    small = lc < _LOG_CROSSOVER
    out = np.empty(np.shape(lc), dtype=float)
    if np.any(small):
        x = np.exp(np.where(small, lc, 0.0))
        out = np.where(small, np.arccosh(np.maximum(x, 1.0)), out)
    big = ~small
    if np.any(big):
        # d = log(2 cosh d) - log(1 + sqrt(1 - cosh^-2)) -> log 2 + log cosh d
        out = np.where(big, lc + math.log(2.0), out)
    return out[()] if np.ndim(lc) == 0 else out


def distance(a: HPoint, b: HPoint) -> float:
    if a.n != b.n:
        raise ValueError("points live in different dimensions")
    c = float(np.dot(a.omega, b.omega))
    return float(distance_rc(a.r, b.r, c))


def poisson_power(s: float, cosang: float, q: float) -> LogVal:
    """(cosh s - sinh s * cosang)^{-q} as a LogVal.

    The base equals e^{-s} + sinh(s)(1-cosang) >= e^{-s} > 0, evaluated in
    that split form to stay exact for cosang near 1 and large s.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    c = min(1.0, max(-1.0, cosang))
    if s == 0.0:
        return LogVal.from_log(0.0)
    log_sinh = s + math.log1p(-math.exp(-2.0 * s)) - math.log(2.0)
    if c == 1.0:
        base_log = -s
    else:
        t1, t2 = -s, log_sinh + math.log(1.0 - c)
        hi, lo = max(t1, t2), min(t1, t2)
        base_log = hi + math.log1p(math.exp(lo - hi))
    return LogVal.from_log(-q * base_log)


def log_poisson_base(s, cosang):
    """log(cosh s - sinh s cosang), vectorized."""
    s = np.asarray(s, dtype=float)
    c = np.clip(np.asarray(cosang, dtype=float), -1.0, 1.0)
    with np.errstate(divide="ignore"):
        log_sinh = np.where(s > 0, s + np.log1p(-np.exp(-2.0 * s)) - math.log(2.0),
                            -np.inf)
        second = log_sinh + np.log(np.maximum(1.0 - c, 0.0))
    hi = np.maximum(-s, second)
    lo = np.minimum(-s, second)
    return hi + np.log1p(np.exp(np.where(np.isneginf(hi), 0.0, lo - hi)))


def busemann_defect(r: float, omega, center: HPoint) -> float:
    """Gap between the normalized distance difference and its boundary limit:

        (d(P, center) - r) - log(cosh s - sinh s omega.omega')

    for P = (r, omega); decays exponentially as r grows.
    """
    omega = np.asarray(omega, dtype=float)
    c = float(np.dot(omega, np.asarray(center.omega)))
    d = float(distance_rc(r, center.r, c))
    return (d - r) - float(log_poisson_base(center.r, c))


def sphere_reduce(n: int, f, rel_tol: float = 1e-11, max_m: int = 4096) -> float:
    """Normalized spherical average of f(omega . fixed_direction) on S^{n-1}.

    Gauss-Jacobi in u = cos(theta) with exact endpoint exponents
    (n-3)/2; self-normalized so f == 1 integrates to exactly 1.
    """
    a = 0.5 * (n - 3)
    prev = None
    m = 32
    while m <= max_m:
        x, w = jacobi_rule(m, a, a)
        vals = np.asarray([f(u) for u in x], dtype=float)
        est = float(np.dot(w, vals) / np.sum(w))
        if prev is not None and abs(est - prev) <= rel_tol * max(1.0, abs(est)):
            return est
        prev = est
        m *= 2
    raise QuadratureError("spherical average did not converge")


def angular_rule(n: int, m: int):
    """Nodes u=cos(theta) and weights for int_0^pi g(cos theta) sin^{n-2}theta dtheta."""
    a = 0.5 * (n - 3)
    return jacobi_rule(m, a, a)


def volume_integral(n: int, f_log, r_lo: float, r_hi: float, *,
                    rel_tol: float = 1e-8,
                    r_breaks=(),
                    m_theta: int = 48) -> LogVal:
    """Axial volume integral over H^n in the log domain:

        |S^{n-2}| * int int f(r, u) sinh^{n-1} r (sin theta)^{n-2} dtheta dr

    f_log(r_array, u) -> log f at fixed angular node u = cos(theta).
    The angular direction uses a fixed Gauss-Jacobi rule; the radial
    direction is adaptive with optional breakpoints at region boundaries.
    """
    if n == 2:
        ang_const = 2.0  # |S^0|
    else:
        ang_const = sphere_area(n - 1)
    u, w = angular_rule(n, m_theta)

    def radial_log(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            log_sinh = np.where(r > 0,
                                r + np.log1p(-np.exp(-2.0 * r)) - math.log(2.0),
                                -np.inf)
        logs = np.stack([f_log(r, ui) for ui in u])  # (m_theta, len(r))
        top = np.max(logs, axis=0)
        safe_top = np.where(np.isfinite(top), top, 0.0)
        inner = np.einsum("i,ij->j", w, np.exp(logs - safe_top))
        with np.errstate(divide="ignore"):
            out = top + np.log(np.maximum(inner, 0.0)) + (n - 1) * log_sinh
        return np.where(np.isfinite(top), out, -np.inf), np.ones_like(r)

    res = adaptive_log_integral(radial_log, r_lo, r_hi, rel_tol=rel_tol,
                                breakpoints=r_breaks)
    return res * LogVal.from_value(ang_const)

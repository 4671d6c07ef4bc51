"""Composite Gauss quadrature in the log domain.

All heavy integrals in this package share one pattern: the integrand is a
smooth (or piecewise-smooth) function whose *logarithm* is the quantity we
can evaluate safely.  Panels of Gauss-Legendre (or Gauss-Jacobi, when an
endpoint carries a known algebraic weight) nodes are refined dyadically
until the inter-level relative change drops below tolerance; accumulation
runs through signed log-sum-exp, with a fixed summation order so results
are bit-reproducible.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .logval import LOG_ZERO, LogVal, logsumexp_weighted


class QuadratureError(RuntimeError):
    """Raised when panel refinement fails to reach the requested tolerance."""


@lru_cache(maxsize=256)
def legendre_rule(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


@lru_cache(maxsize=256)
def jacobi_rule(m: int, alpha: float, beta: float):
    """Nodes/weights for weight (1-x)^alpha (1+x)^beta on [-1, 1]."""
    x, w = roots_jacobi(m, alpha, beta)
    return x, w


def panel_nodes(lo: float, hi: float, m: int):
    """Legendre nodes and weights mapped to [lo, hi]."""
    x, w = legendre_rule(m)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def fixed_panel_integral_log(f_log, panels, m: int = 32) -> LogVal:
    """Integrate exp(f_log) over a fixed panel list.

    f_log maps a node array to (logmag array, sign array).
    """
    pieces = []
    for lo, hi in panels:
        v, w = panel_nodes(lo, hi, m)
        logs, signs = f_log(v)
        pieces.append(logsumexp_weighted(logs, signs * w))
    out = LOG_ZERO
    for p in pieces:
        out = out + p
    return out


def adaptive_log_integral(f_log, lo: float, hi: float, *,
                          rel_tol: float = 1e-9,
                          breakpoints=(),
                          m: int = 24,
                          max_depth: int = 14,
                          max_panels: int = 4096) -> LogVal:
    """Adaptive composite integral of exp(f_log) over [lo, hi].

    f_log: vectorized, node array -> (logmag array, sign array).
    breakpoints: interior abscissae where the integrand may kink; panels
    never straddle them.
    Convergence is judged panel-wise: a panel is accepted when the m-point
    and (3m/2)-point estimates agree to rel_tol relative to the running
    total magnitude.
    """
    bps = sorted({float(b) for b in breakpoints if lo < b < hi})
    edges = [lo] + bps + [hi]
    stack = [(edges[i], edges[i + 1], 0) for i in range(len(edges) - 1)]
    stack.reverse()  # process left to right
    accepted: list[LogVal] = []
    coarse_all: list[LogVal] = []

    def eval_panel(a: float, b: float, mm: int) -> LogVal:
        v, w = panel_nodes(a, b, mm)
        logs, signs = f_log(v)
        return logsumexp_weighted(logs, signs * w)

    # first pass: coarse estimate of the total magnitude for the accept test
    for a, b, _ in reversed(stack):
        coarse_all.append(abs(eval_panel(a, b, m)))
    scale = LOG_ZERO
    for c in coarse_all:
        scale = scale + c
    scale_log = scale.log if not scale.is_zero() else -math.inf

    n_panels = 0
    while stack:
        a, b, depth = stack.pop()
        n_panels += 1
        if n_panels > max_panels:
            raise QuadratureError("panel budget exhausted")
        coarse = eval_panel(a, b, m)
        fine = eval_panel(a, b, m + m // 2)
        diff = abs(fine - coarse)
        ok = (
            diff.is_zero()
            or (not fine.is_zero() and diff.log - fine.log < math.log(rel_tol))
            or (scale_log > -math.inf and diff.log - scale_log < math.log(rel_tol) - 3.0)
            or depth >= max_depth
        )
        if ok:
            if depth >= max_depth and not diff.is_zero():
                if scale_log == -math.inf or diff.log - scale_log > math.log(rel_tol) + 5.0:
                    raise QuadratureError(
                        f"no convergence on [{a:.6g},{b:.6g}] "
                        f"(residual exp({diff.log:.3g}))")
            accepted.append(fine)
        else:
            mid = 0.5 * (a + b)
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))

    accepted.sort(key=lambda v: (v.log if not v.is_zero() else -math.inf))
    out = LOG_ZERO
    for p in accepted:
        out = out + p
    return out


def adaptive_real_integral(f, lo: float, hi: float, *,
                           rel_tol: float = 1e-10,
                           abs_floor: float = 0.0,
                           breakpoints=(),
                           m: int = 24,
                           max_depth: int = 13) -> float:
    """Plain adaptive Gauss-Legendre for native-range integrands."""
    bps = sorted({float(b) for b in breakpoints if lo < b < hi})
    edges = [lo] + bps + [hi]
    stack = [(edges[i], edges[i + 1], 0) for i in range(len(edges) - 1)]
    stack.reverse()
    total = 0.0
    scale = max(abs_floor, 0.0)
    pending = []
    for a, b, depth in reversed(stack):
        v, w = panel_nodes(a, b, m)
        scale += abs(float(np.dot(f(v), w)))
    while stack:
        a, b, depth = stack.pop()
        v1, w1 = panel_nodes(a, b, m)
        c = float(np.dot(f(v1), w1))
        v2, w2 = panel_nodes(a, b, m + m // 2)
        fval = float(np.dot(f(v2), w2))
        err = abs(fval - c)
        if err <= rel_tol * max(abs(fval), scale * 1e-3) or depth >= max_depth:
            pending.append(fval)
        else:
            mid = 0.5 * (a + b)
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))
    pending.sort(key=abs)
    for p in pending:
        total += p
    return total


def dyadic_breakpoints(lo: float, hi: float, width0: float = 1.0) -> list[float]:
    """Breakpoints clustering dyadically toward both endpoints.

    Suited to integrands with O(width0) boundary layers at lo and hi.
    """
    span = hi - lo
    if span <= 2.0 * width0:
        return []
    pts = []
    mid = 0.5 * (lo + hi)
    d = width0
    while lo + d < mid:
        pts.append(lo + d)
        d *= 2.0
    d = width0
    while hi - d > mid:
        pts.append(hi - d)
        d *= 2.0
    return sorted(set(pts))

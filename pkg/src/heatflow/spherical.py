"""Spherical eigenfunctions on H^n and the radial transform pair.

The boundary-integral representation

    phi_lambda(r) = N_n int_0^pi (cosh r - sinh r cos th)^{i lam - rho}
                    (sin th)^{n-2} dth,         rho = (n-1)/2,

is evaluated after the substitution v = log(cosh r - sinh r cos th), which
maps theta in [0, pi] to v in [-r, r] and turns the integrand into an O(1)
profile with algebraic endpoint factors of exponent (n-3)/2.  Endpoint
panels use Gauss-Jacobi rules carrying those exponents exactly (the n = 2
inverse-square-root case included); everything is accumulated at a common
log scale, so radii far beyond float range are fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hgeom import sphere_area
from .logval import LogComplex, LogVal
from .quadrature import QuadratureError, adaptive_real_integral, jacobi_rule, legendre_rule

_LAYER = 1.0  # width of the endpoint boundary layers in v


class TransformError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialProfile:
    """Radial data carrier: r -> value, vectorized over numpy arrays.

    support_radius is +inf for profiles with unbounded support; smoothness
    is a quadrature hint ('smooth' or 'kink' at the support edge).
    """

    evaluation: Callable
    support_radius: float = math.inf
    smoothness: str = "smooth"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        vals = np.asarray(self.evaluation(r), dtype=float)
        if math.isfinite(self.support_radius):
            vals = np.where(r > self.support_radius, 0.0, vals)
        return vals


def bump_profile(radius: float, amplitude: float = 1.0) -> RadialProfile:
    """C^2 polynomial bump amplitude*(1-(r/radius)^2)^3 on [0, radius]."""

    def f(r):
        x = np.clip(np.asarray(r, dtype=float) / radius, 0.0, None)
        return amplitude * np.where(x < 1.0, (1.0 - x * x) ** 3, 0.0)

    return RadialProfile(f, support_radius=radius, smoothness="kink")


def gaussian_profile(width: float, amplitude: float = 1.0) -> RadialProfile:
    """amplitude * exp(-(r/width)^2); Gaussian-class, so its transform decays
    like exp(-width^2 lambda^2 / 4) and inversion round trips converge fast."""

    def f(r):
        x = np.asarray(r, dtype=float) / width
        return amplitude * np.exp(-x * x)

    return RadialProfile(f, support_radius=math.inf, smoothness="smooth")


def _normalization(n: int) -> float:
    return math.gamma(0.5 * n) / (math.sqrt(math.pi) * math.gamma(0.5 * (n - 1)))


def _plan_key(n: int, r: float, osc: float, a_re: float, m: int):
    return (n, round(r, 12), math.ceil(osc * 4.0) / 4.0, math.ceil(a_re * 4.0) / 4.0, m)


_plan_cache: dict = {}


def _v_plan(n: int, r: float, osc: float, a_re: float, m: int):
    """Flattened node/weight/regularizer arrays for the v-integral.

    Returns (v, w_eff, reg0) where the integral of exp(A v + gam*(sl+sr))
    is sum_i w_eff[i] * exp(A v[i] + reg0[i]); the endpoint-singular parts
    of the integrand live in the Gauss-Jacobi weights, not in reg0.
    """
    key = _plan_key(n, r, osc, a_re, m)
    hit = _plan_cache.get(key)
    if hit is not None:
        return hit

    gam = 0.5 * (n - 3)
    cap = min(36.0 / max(osc, 1.0), 24.0 / max(a_re, 1.0))

    panels: list[tuple[float, float, str]] = []
    if 2.0 * r <= 2.0 * _LAYER:
        panels.append((-r, r, "jj"))
    else:
        panels.append((-r, -r + _LAYER, "left"))
        panels.append((r - _LAYER, r, "right"))
        pts = [-r + _LAYER, r - _LAYER]
        d = _LAYER
        while -r + _LAYER + d < 0.0:
            pts.append(-r + _LAYER + d)
            pts.append(r - _LAYER - d)
            d *= 2.0
        pts = sorted(set(pts))
        for lo, hi in zip(pts[:-1], pts[1:]):
            k = max(1, int(math.ceil((hi - lo) / cap)))
            step = (hi - lo) / k
            for j in range(k):
                panels.append((lo + j * step, lo + (j + 1) * step, "mid"))

    vs, ws, regs = [], [], []
    for lo, hi, kind in panels:
        half = 0.5 * (hi - lo)
        if kind == "mid" or gam == 0.0:
            x, w = legendre_rule(m)
            jac = half
            sing_l = sing_r = False
        elif kind == "jj":
            x, w = jacobi_rule(m, gam, gam)
            jac = half ** (1.0 + 2.0 * gam)
            sing_l = sing_r = True
        elif kind == "left":
            x, w = jacobi_rule(m, 0.0, gam)
            jac = half ** (1.0 + gam)
            sing_l, sing_r = True, False
        else:
            x, w = jacobi_rule(m, gam, 0.0)
            jac = half ** (1.0 + gam)
            sing_l, sing_r = False, True
        v = lo + half * (x + 1.0)
        with np.errstate(divide="ignore"):
            sl = v + np.log1p(-np.exp(-(v + r)))
            sr = r + np.log1p(-np.exp(-(r - v)))
            reg = gam * (sl + sr)
            if sing_l:
                reg = reg - gam * np.log(v + r)
            if sing_r:
                reg = reg - gam * np.log(r - v)
        vs.append(v)
        ws.append(w * jac)
        regs.append(reg)

    plan = (np.concatenate(vs), np.concatenate(ws), np.concatenate(regs))
    if len(_plan_cache) > 512:
        _plan_cache.clear()
    _plan_cache[key] = plan
    return plan


def phi_lambda_grid(n: int, lams, r: float, m: int = 32):
    """phi_lambda(r) for an array of complex lambda at one radius.

    Returns (mantissas: complex ndarray, log_scale: float) with
    phi = mantissa * exp(log_scale).
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0.0:
        return np.ones(lams.shape, dtype=complex), 0.0

    osc = float(np.max(np.abs(lams.real))) if lams.size else 0.0
    a_re = float(np.max(np.abs(-lams.imag + 1.0 - 0.5 * (n - 1)))) if lams.size else 1.0
    v, w, reg = _v_plan(n, r, osc, a_re, m)

    log_sinh = r + math.log1p(-math.exp(-2.0 * r)) - math.log(2.0)
    pref_log = math.log(_normalization(n)) - (n - 2) * log_sinh

    A = 1j * lams + 1.0 - 0.5 * (n - 1)
    L = A[:, None] * v[None, :] + reg[None, :]
    scale = np.max(L.real, axis=1)
    mant = np.exp(L - scale[:, None]) @ w
    # bring all lambdas to one common scale
    top = float(np.max(scale))
    mant = mant * np.exp(scale - top)
    return mant, top + pref_log


def phi_lambda(n: int, lam, r: float, m: int = 32, check: bool = True) -> LogComplex:
    """Spherical function of index lambda at radius r, log-scaled.

    phi_lambda(0) = 1, phi_lambda = phi_{-lambda}, real for real or purely
    imaginary lambda.
    """
    mant, scale = phi_lambda_grid(n, [lam], r, m=m)
    out = LogComplex(complex(mant[0]), scale)
    if check:
        mant2, scale2 = phi_lambda_grid(n, [lam], r, m=m + 16)
        aligned = complex(mant2[0]) * math.exp(scale2 - scale)
        diff = abs(out.mantissa - aligned)
        if diff > 1e-9 * max(abs(out.mantissa), abs(aligned), 1e-300):
            raise QuadratureError("spherical-function quadrature did not settle")
    return out


def phi0(n: int, r: float) -> LogVal:
    """Ground spherical function; positive, log-domain safe for huge r."""
    if n == 3:
        if r == 0.0:
            return LogVal.from_log(0.0)
        log_sinh = r + math.log1p(-math.exp(-2.0 * r)) - math.log(2.0)
        return LogVal.from_log(math.log(r) - log_sinh)
    val = phi_lambda(n, 0.0, r, check=False)
    return val.real_logval()


def phi0_log(n: int, r) -> np.ndarray:
    """Vectorized log phi0 over radii (closed form for n = 3)."""
    r = np.asarray(r, dtype=float)
    if n == 3:
        with np.errstate(divide="ignore", invalid="ignore"):
            log_sinh = r + np.log1p(-np.exp(-2.0 * r)) - math.log(2.0)
            out = np.where(r > 0.0, np.log(np.maximum(r, 1e-300)) - log_sinh, 0.0)
        return out
    flat = np.atleast_1d(r).ravel()
    vals = np.array([phi0(n, float(x)).log for x in flat])
    return vals.reshape(np.shape(r)) if np.ndim(r) else float(vals[0])


def _truncation_radius(n: int, f: RadialProfile, grow: float) -> float:
    """Radius beyond which |f| e^{grow r} sinh^{n-1} r stops contributing."""
    if math.isfinite(f.support_radius):
        return f.support_radius
    R, scale = 4.0, 0.0
    while R < 4096.0:
        probe = np.linspace(0.25 * R, R, 24)
        with np.errstate(over="ignore"):
            vals = np.abs(f(probe)) * np.exp(np.minimum((grow + n - 1) * probe, 700.0))
        scale = max(scale, float(np.max(vals)))
        tail = float(vals[-1])
        if scale > 0.0 and tail < 1e-18 * scale:
            return R
        R *= 1.6
    raise TransformError("profile does not decay fast enough to truncate")


def _transform_r_nodes(n: int, f: RadialProfile, R: float, m: int = 20,
                       levels: int = 6):
    """Fixed composite node set on [0, R] refined toward 0 and the edge."""
    edges = np.unique(np.concatenate([
        np.linspace(0.0, R, 33),
        R * (0.5 ** np.arange(1, levels + 1)),
    ]))
    nodes, weights = [], []
    x, w = legendre_rule(m)
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def spherical_transform_grid(n: int, f: RadialProfile, lams, *,
                             m_r: int = 20) -> np.ndarray:
    """Transform evaluated on a whole grid of indices in one sweep."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    grow = float(np.max(np.abs(lams.imag))) if lams.size else 0.0
    R = _truncation_radius(n, f, grow)
    r_nodes, r_w = _transform_r_nodes(n, f, R, m=m_r)
    fv = f(r_nodes)
    log_sinh = np.where(r_nodes > 0,
                        r_nodes + np.log1p(-np.exp(-2.0 * r_nodes)) - math.log(2.0),
                        -np.inf)
    out = np.zeros(lams.shape, dtype=complex)
    mask = fv != 0.0
    for i in np.nonzero(mask)[0]:
        mant, scale = phi_lambda_grid(n, lams, float(r_nodes[i]))
        contrib = fv[i] * r_w[i] * math.exp(scale + (n - 1) * log_sinh[i])
        out = out + mant * contrib
    return sphere_area(n) * out


def spherical_transform(n: int, f: RadialProfile, lam, *,
                        check: bool = True) -> complex:
    """Radial spherical transform with the total-measure convention:

        F(lambda) = |S^{n-1}| int_0^inf f(r) phi_lambda(r) sinh^{n-1} r dr,

    so a probability-normalized profile has F(i rho) = 1.
    """
    val = complex(spherical_transform_grid(n, f, [lam])[0])
    if check:
        ref = complex(spherical_transform_grid(n, f, [lam], m_r=28)[0])
        if abs(val - ref) > 1e-8 * max(abs(val), abs(ref), 1e-30):
            raise TransformError("transform quadrature did not settle")
    return val


# --- inversion ---------------------------------------------------------

_calibration_kappa: float | None = None


def _analytic_inv_const(n: int) -> float:
    return 2.0 ** (n - 2) / (math.pi * sphere_area(n))


def _h3_exact_log(t: float, r: float) -> float:
    # closed-form H^3 heat kernel, duplicated here only to calibrate the
    # spectral-measure constant without importing the kernel module
    if r == 0.0:
        lg = 0.0
    else:
        lg = math.log(r) - (r + math.log1p(-math.exp(-2.0 * r)) - math.log(2.0))
    return -1.5 * math.log(4.0 * math.pi * t) + lg - t - r * r / (4.0 * t)


def density_on_grid(n: int, lams) -> np.ndarray:
    """|c(lambda)|^{-2} on a real grid for the rank-one datum of H^n."""
    from .plancherel import plancherel_density_log
    from .rootsys import hyperbolic_datum

    datum = hyperbolic_datum(n)
    out = np.empty(len(lams))
    for i, lam in enumerate(lams):
        dl = plancherel_density_log(datum, [float(lam)])
        out[i] = 0.0 if dl.is_zero() else dl.value()
    return out


def _raw_inverse_transform(n: int, F, r: float, *, const: float,
                           rel_tol: float = 1e-11) -> float:
    lam_max = 4.0
    dens_probe = density_on_grid(n, [lam_max])[0]
    while lam_max < 4096.0 and abs(F(lam_max)) * dens_probe * (1.0 + r) > 1e-20:
        lam_max *= 1.5
        dens_probe = density_on_grid(n, [lam_max])[0]

    def integrand(lams):
        mant, scale = phi_lambda_grid(n, np.asarray(lams, dtype=complex), r)
        dens = density_on_grid(n, lams)
        Fv = np.array([float(F(float(x))) for x in lams])
        return Fv * dens * mant.real * math.exp(scale)

    val = adaptive_real_integral(integrand, 0.0, lam_max, rel_tol=rel_tol)
    return const * val


def inversion_constant(n: int) -> float:
    """Spectral-measure constant of the radial inversion, fixed once by
    matching the three-dimensional kernel at (t, r) = (1, 1) and carried
    to all n through the rank-one density normalization."""
    global _calibration_kappa
    if _calibration_kappa is None:
        raw = _raw_inverse_transform(
            3, lambda lam: math.exp(-(lam * lam + 1.0)), 1.0, const=1.0)
        _calibration_kappa = math.exp(_h3_exact_log(1.0, 1.0)) / (
            raw * _analytic_inv_const(3))
    return _calibration_kappa * _analytic_inv_const(n)


def inverse_transform_radial(n: int, F, r: float, *,
                             rel_tol: float = 1e-11) -> float:
    """Inverse radial transform of an even, decaying multiplier F:

        f(r) = C int_0^inf |c(lambda)|^{-2} phi_lambda(r) F(lambda) dlambda.
    """
    return _raw_inverse_transform(n, F, r, const=inversion_constant(n),
                                  rel_tol=rel_tol)

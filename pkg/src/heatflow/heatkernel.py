"""Heat kernels on H^n by three routes, their L^p norms, and the moving
critical-region diagnostics.

Routes, in decreasing ground-truth rank:

  exact   -- the closed H^3 form (4 pi t)^{-3/2} (r/sinh r) e^{-t - r^2/4t};
  spectral-- the inverse spherical transform of e^{-t(lam^2 + rho^2)}.  The
             real-axis integral loses ~r^2/4t digits to oscillation, so once
             that exceeds float headroom the contour is shifted through the
             Gaussian saddle lam = i r/2t, where the integrand is positive;
             the shifted form needs c(-lam)^{-1} (holomorphic upstairs) and
             the outgoing expansion coefficients, generated by recursion.
  asympt  -- the literal long-time product
             (2 pi^{n/2})^{-1} gamma(r/2t) t^{-3/2} r e^{-rho^2 t - rho r - r^2/4t},
             kept as stated; its constant is NOT trusted against the exact
             route (the empirical ratio along rays is recorded in tests, not
             asserted to be 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .logval import LogVal
from .plancherel import complex_loggamma, kernel_prefactor_log
from .quadrature import adaptive_log_integral, legendre_rule, panel_nodes
from .regions import RegionSchedule, default_schedule
from .spherical import inversion_constant, phi0_log, phi_lambda_grid
from .rootsys import hyperbolic_datum

_CANCEL_BUDGET = 10.0   # max tolerable r^2/4t on the real-axis route
_SADDLE_MIN_R = 5.0     # outgoing expansion is machine-exact beyond this
_SADDLE_NODES = 96
_HC_MAX_TERMS = 24


class KernelRangeError(ValueError):
    pass


@dataclass(frozen=True)
class HeatEvaluation:
    """One kernel evaluation: positive value plus its provenance."""

    t: float
    route: str
    value: LogVal

    def __post_init__(self):
        if self.value.sign <= 0:
            raise ValueError("heat kernel values must be positive")


def h_exact_h3_log(t, r):
    """log h_t(r) on H^3, vectorized."""
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    small = r < 1e-8
    rs = np.where(small, 1.0, r)
    with np.errstate(divide="ignore"):
        log_ratio = np.where(
            small,
            -r * r / 6.0,  # log(r/sinh r) ~ -r^2/6
            np.log(rs) - (rs + np.log1p(-np.exp(-2.0 * rs)) - math.log(2.0)),
        )
    return -1.5 * np.log(4.0 * math.pi * t) + log_ratio - t - r * r / (4.0 * t)


def h_exact_h3(t: float, r: float) -> LogVal:
    """Closed-form H^3 heat kernel (the module's ground truth for n = 3)."""
    if t <= 0.0 or r < 0.0:
        raise KernelRangeError("need t > 0 and r >= 0")
    return LogVal.from_log(float(h_exact_h3_log(t, r)))


# --- spectral route ----------------------------------------------------


def _rank1_density_log_grid(n: int, lams: np.ndarray) -> np.ndarray:
    """log |c(lam)|^{-2} for H^n on a real grid, vectorized."""
    m = n - 1
    pref = math.lgamma(m) - math.lgamma(0.5 * m)
    iz = 1j * np.asarray(lams, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = complex_loggamma(np.where(iz == 0, 1.0, iz)) \
            - complex_loggamma(iz + 0.5 * m)
    out = -2.0 * (pref + np.real(lg))
    return np.where(lams == 0.0, -np.inf, out)


def _hc_coefficients(n: int, lam: np.ndarray, kmax: int) -> list[np.ndarray]:
    """Outgoing-expansion coefficients Gam_k(lam) of the radial eigenfunction,
    from the recursion k(k - i lam) Gam_k = -rho sum_{j<k} (i lam - rho - 2j) Gam_j."""
    rho = 0.5 * (n - 1)
    il = 1j * np.asarray(lam, dtype=complex)
    gams = [np.ones_like(il)]
    running = (il - rho) * gams[0]          # sum_j (i lam - rho - 2j) Gam_j
    for k in range(1, kmax + 1):
        gk = -rho * running / (k * (k - il))
        gams.append(gk)
        running = running + (il - rho - 2.0 * k) * gk
    return gams


def _c_minus_inv_log(n: int, lam: np.ndarray) -> np.ndarray:
    """log c(-lam)^{-1} for the H^n rank-one c-function (complex output)."""
    m = n - 1
    pref = math.lgamma(m) - math.lgamma(0.5 * m)
    w = -1j * np.asarray(lam, dtype=complex)     # = -i lam
    return -pref + complex_loggamma(w + 0.5 * m) - complex_loggamma(w)


def h_spectral_saddle_log(n: int, t: float, r) -> np.ndarray:
    """Spectral kernel through the shifted contour, vectorized over r >= _SADDLE_MIN_R."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rho = 0.5 * (n - 1)
    s = r / (2.0 * t)
    L = math.sqrt(50.0 / t)
    x, w = legendre_rule(_SADDLE_NODES)
    mu = L * x                       # (M,)
    wmu = L * w
    lam = mu[None, :] + 1j * s[:, None]          # (R, M)
    core = np.exp(_c_minus_inv_log(n, lam) - t * mu[None, :] ** 2)
    gams = _hc_coefficients(n, lam, _HC_MAX_TERMS)
    total = np.zeros(r.shape, dtype=float)
    scalek = np.ones(r.shape)
    for k, gk in enumerate(gams):
        term = np.real((core * gk) @ wmu) * np.exp(-2.0 * k * r)
        new = total + term
        if k > 0 and np.all(np.abs(term) <= 1e-17 * np.abs(new)):
            total = new
            break
        total = new
    if np.any(total <= 0.0):
        raise KernelRangeError("saddle-route integral lost positivity")
    log_I = np.log(total) - rho * r - r * r / (4.0 * t)
    return math.log(inversion_constant(n)) - rho * rho * t + log_I


def h_spectral_direct_log(n: int, t: float, r: float) -> float:
    """Spectral kernel by real-axis quadrature (r^2/4t within float headroom)."""
    rho = 0.5 * (n - 1)
    lam_max = math.sqrt((50.0 + r * r / (4.0 * t) + 5.0 * n) / t)

    def f_log(lams):
        mant, scale = phi_lambda_grid(n, np.asarray(lams, dtype=complex), r)
        dens = _rank1_density_log_grid(n, lams)
        vals = mant.real * np.exp(dens - np.max(dens[np.isfinite(dens)])
                                  - t * lams ** 2)
        logs = np.where(vals != 0.0,
                        np.log(np.abs(np.where(vals == 0.0, 1.0, vals)))
                        + scale + np.max(dens[np.isfinite(dens)]),
                        -np.inf)
        return logs, np.sign(vals)

    res = adaptive_log_integral(f_log, 0.0, lam_max, rel_tol=1e-12, m=32)
    if res.sign <= 0:
        raise KernelRangeError("spectral integral lost positivity")
    return math.log(inversion_constant(n)) - rho * rho * t + res.log


def h_spectral_mpmath_log(n: int, t: float, r: float) -> float:
    """Arbitrary-precision fallback for small radii at large r^2/4t."""
    import mpmath as mp

    digits = int(r * r / (4.0 * t) / math.log(10.0)) + 30
    with mp.workdps(digits):
        rho = mp.mpf(n - 1) / 2
        rr = mp.mpf(r)
        tt = mp.mpf(t)

        def phi(lam):
            return mp.hyp2f1((rho + 1j * lam) / 2, (rho - 1j * lam) / 2,
                             mp.mpf(n) / 2, -mp.sinh(rr) ** 2)

        m = n - 1
        pref = mp.gamma(m) / mp.gamma(mp.mpf(m) / 2)

        def dens(lam):
            if lam == 0:
                return mp.mpf(0)
            c = pref * mp.gamma(1j * lam) / mp.gamma(1j * lam + mp.mpf(m) / 2)
            return 1 / (c * mp.conj(c))

        lam_max = mp.sqrt((digits * mp.log(10) + 10) / tt)
        val = mp.quad(lambda u: mp.re(dens(u)) * mp.re(phi(u)) * mp.exp(-tt * u * u),
                      mp.linspace(0, lam_max, max(8, int(lam_max * r / 3.14) + 8)))
        out = mp.log(val) - rho * rho * tt + mp.log(inversion_constant(n))
        return float(mp.re(out))


def h_spectral(n: int, t: float, r: float) -> LogVal:
    """Heat kernel via the spectral inversion, route chosen by conditioning."""
    if t <= 0.0 or r < 0.0:
        raise KernelRangeError("need t > 0 and r >= 0")
    cancel = r * r / (4.0 * t)
    if cancel <= _CANCEL_BUDGET:
        return LogVal.from_log(h_spectral_direct_log(n, t, r))
    if r >= _SADDLE_MIN_R:
        return LogVal.from_log(float(h_spectral_saddle_log(n, t, r)[0]))
    return LogVal.from_log(h_spectral_mpmath_log(n, t, r))


def h_log_grid(n: int, t: float, r) -> np.ndarray:
    """log h_t over an array of radii; exact for n = 3, spectral otherwise."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if n == 3:
        return h_exact_h3_log(t, r)
    out = np.empty(r.shape)
    cancel = r * r / (4.0 * t)
    saddle = (cancel > _CANCEL_BUDGET) & (r >= _SADDLE_MIN_R)
    direct = ~saddle & (cancel <= _CANCEL_BUDGET)
    rest = ~saddle & ~direct
    if np.any(saddle):
        out[saddle] = h_spectral_saddle_log(n, t, r[saddle])
    for i in np.nonzero(direct)[0]:
        out[i] = h_spectral_direct_log(n, t, float(r[i]))
    for i in np.nonzero(rest)[0]:
        out[i] = h_spectral_mpmath_log(n, t, float(r[i]))
    return out


def h_asymptotic(n: int, t: float, r: float) -> LogVal:
    """The literal long-time kernel product with the Gamma-quotient
    prefactor on the ray coordinate r/2t; no constant is asserted against
    the exact route (see tests for the recorded ratio)."""
    if t <= 0.0 or r < 0.0:
        raise KernelRangeError("need t > 0 and r >= 0")
    rho = 0.5 * (n - 1)
    if r == 0.0:
        return LogVal.from_log(-math.inf)
    log = (-math.log(2.0) - 0.5 * n * math.log(math.pi)
           + kernel_prefactor_log(n, r / (2.0 * t))
           - 1.5 * math.log(t) + math.log(r)
           - rho * rho * t - rho * r - r * r / (4.0 * t))
    return LogVal.from_log(log)


def kernel_value(n: int, t: float, r: float, route: str) -> HeatEvaluation:
    if route == "exact":
        if n != 3:
            raise KernelRangeError("exact route exists only for n = 3")
        return HeatEvaluation(t, route, h_exact_h3(t, r))
    if route == "spectral":
        return HeatEvaluation(t, route, h_spectral(n, t, r))
    if route == "asymptotic":
        return HeatEvaluation(t, route, h_asymptotic(n, t, r))
    raise KernelRangeError(f"unknown route {route!r}")


# --- L^p norms and regions ---------------------------------------------


def envelope_log(n: int, t: float, r) -> np.ndarray:
    """Two-sided global envelope of log h_t up to additive constants."""
    r = np.asarray(r, dtype=float)
    rho = 0.5 * (n - 1)
    return (-0.5 * n * math.log(t) + phi0_log(n, r)
            - rho * rho * t - r * r / (4.0 * t)
            + (0.5 * (n - 1) - 1.0) * np.log(1.0 + t + r))


def norm_domain(n: int, t: float, p: float, margin: float = 45.0) -> float:
    """Radius beyond which h^p sinh^{n-1} is negligible, via the envelope."""
    rho = 0.5 * (n - 1)
    peak = 2.0 * rho * t * max(2.0 / p - 1.0, 0.0)
    r_hi = peak + 2.0 * math.sqrt(4.0 * t * margin / p) + 8.0 * math.sqrt(t) + 20.0
    grid = np.linspace(0.0, r_hi, 600)
    vals = p * envelope_log(n, t, grid) + (n - 1) * np.maximum(grid, 1e-12)
    top = float(np.max(vals))
    above = np.nonzero(vals > top - margin * p - 20.0)[0]
    return float(grid[above[-1]]) + 2.0


def lp_norm_log(n: int, t: float, p: float,
                rel_tol: float = 1e-9) -> LogVal:
    """||h_t||_p by log-domain radial quadrature; p = inf gives h_t(0)."""
    if t <= 0.0:
        raise KernelRangeError("t must be positive")
    if math.isinf(p):
        return LogVal.from_log(float(h_log_grid(n, t, [0.0])[0]))
    if p < 1.0:
        raise KernelRangeError("p must be in [1, inf]")
    from .hgeom import sphere_area

    rmax = norm_domain(n, t, p)

    def f_log(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            log_sinh = np.where(
                r > 0, r + np.log1p(-np.exp(-2.0 * r)) - math.log(2.0), -np.inf)
        logs = p * h_log_grid(n, t, r) + (n - 1) * log_sinh
        return logs, np.ones_like(r)

    res = adaptive_log_integral(f_log, 0.0, rmax, rel_tol=rel_tol, m=24)
    total = res * LogVal.from_value(sphere_area(n))
    return total ** (1.0 / p)


def region_bounds(n: int, t: float, p: float,
                  sched: RegionSchedule) -> tuple[float, float]:
    """Radial interval of the critical region on H^n."""
    rho = 0.5 * (n - 1)
    if p < 2.0:
        return sched.annulus(p, rho, t)
    if p == 2.0:
        return sched.band2(t)
    return 0.0, sched.ball(t)


def concentration_defect(n: int, t: float, p: float,
                         sched: RegionSchedule | None = None) -> float:
    """Share of ||h_t||_p living outside the critical region (in [0, 1]);
    for p = inf, the normalized sup of h_t beyond the moving ball."""
    if t <= 0.0:
        raise KernelRangeError("t must be positive")
    sched = sched or default_schedule()
    lo, hi = region_bounds(n, t, p if not math.isinf(p) else math.inf, sched)
    if math.isinf(p):
        R = sched.ball(t)
        probe = np.linspace(R, max(norm_domain(n, t, 4.0), R + 10.0), 400)
        tail = float(np.max(h_log_grid(n, t, probe)))
        return math.exp(tail - float(h_log_grid(n, t, [0.0])[0]))
    from .hgeom import sphere_area

    rmax = max(norm_domain(n, t, p), hi + 1.0)

    def f_log(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            log_sinh = np.where(
                r > 0, r + np.log1p(-np.exp(-2.0 * r)) - math.log(2.0), -np.inf)
        logs = p * h_log_grid(n, t, r) + (n - 1) * log_sinh
        return logs, np.ones_like(r)

    pieces = []
    if lo > 0.0:
        pieces.append(adaptive_log_integral(f_log, 0.0, lo, rel_tol=1e-8))
    if hi < rmax:
        pieces.append(adaptive_log_integral(f_log, hi, rmax, rel_tol=1e-8))
    tail = LogVal.from_value(0.0)
    for piece in pieces:
        tail = tail + piece
    if tail.is_zero():
        return 0.0
    tail = (tail * LogVal.from_value(sphere_area(n))) ** (1.0 / p)
    return (tail / lp_norm_log(n, t, p)).value()


# --- kernel-quotient diagnostics ---------------------------------------


def _sample_grid(lo: float, hi: float, n_r: int = 5, n_ang: int = 17):
    radii = np.linspace(lo, hi, n_r)
    angles = np.linspace(0.0, math.pi, n_ang)
    return radii, angles


def _translated_distances(radii: np.ndarray, angles: np.ndarray, s: float):
    from .hgeom import distance_rc

    d = radii[:, None] * np.ones((1, len(angles)))
    dprime = distance_rc(d, s, np.cos(angles)[None, :] * np.ones((len(radii), 1)))
    return d, dprime


def quotient_defect_low(n: int, p: float, t: float, center_dist: float,
                        sched: RegionSchedule | None = None) -> float:
    """Average relative gap between the kernel quotient and its boundary
    limit over the sampled p < 2 region:

        h_t(d(x, y)) / h_t(d(x, o))  vs  (cosh s - sinh s cos th)^{-(n-1)/p}.

    The mean (not max) of |quotient/limit - 1| over the deterministic
    17 x 5 grid is reported, which scales like r(t)/t.
    """
    if not (1.0 <= p < 2.0):
        raise ValueError("low-regime defect needs p in [1, 2)")
    if center_dist == 0.0:
        return 0.0
    sched = sched or default_schedule()
    rho = 0.5 * (n - 1)
    lo, hi = sched.annulus(p, rho, t)
    if lo <= center_dist + 1.0:
        raise KernelRangeError("region does not clear the datum scale; t too small")
    radii, angles = _sample_grid(lo, hi)
    d, dp = _translated_distances(radii, angles, center_dist)
    logs_d = h_log_grid(n, t, d.ravel()).reshape(d.shape)
    logs_dp = h_log_grid(n, t, dp.ravel()).reshape(d.shape)
    q = 0.5 * (n - 1) * 2.0 / p
    from .hgeom import log_poisson_base

    target_log = -q * log_poisson_base(center_dist, np.cos(angles))[None, :]
    rel = np.abs(np.exp(logs_dp - logs_d - target_log) - 1.0)
    return float(np.mean(rel))


def quotient_defect_high(n: int, p: float, t: float, center_dist: float,
                         sched: RegionSchedule | None = None) -> float:
    """Average relative gap between the kernel quotient and the ground
    spherical-function quotient over the sampled p >= 2 region."""
    if p < 2.0:
        raise ValueError("high-regime defect needs p >= 2")
    if center_dist == 0.0:
        return 0.0
    sched = sched or default_schedule()
    if p == 2.0:
        lo, hi = sched.band2(t)
    else:
        R = sched.ball(t)
        lo, hi = R / 5.0, R
    radii, angles = _sample_grid(lo, hi)
    d, dp = _translated_distances(radii, angles, center_dist)
    logs_d = h_log_grid(n, t, d.ravel()).reshape(d.shape)
    logs_dp = h_log_grid(n, t, dp.ravel()).reshape(d.shape)
    phi_d = phi0_log(n, d.ravel()).reshape(d.shape)
    phi_dp = phi0_log(n, dp.ravel()).reshape(d.shape)
    rel = np.abs(np.exp((logs_dp - logs_d) - (phi_dp - phi_d)) - 1.0)
    return float(np.mean(rel))

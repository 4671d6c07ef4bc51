"""Harish-Chandra c-function machinery and the spectral density.

The density is assembled from the per-root Gamma-quotient factors of the
Gindikin-Karpelevic product, normalized so that c(-i rho) = 1.  The
z-independent prefactors are kept, so |c(lambda)|^{-2} is the literal
density up to one global measure constant that every consumer treats as
calibrated (all published checks are ratio-based).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .logval import LogVal
from .rootsys import RootDatum

# Godfrey's 15-term Lanczos coefficients, g = 607/128; relative accuracy
# ~1e-14 on the reflected half plane for |Im z| <= 50.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])


class GammaPoleError(ArithmeticError):
    """Gamma evaluated at a nonpositive integer."""


class HolomorphyDomainError(ValueError):
    """Spectral parameter outside the domain where b(-lambda)^{±1} is holomorphic."""


def _lanczos_loggamma_halfplane(z):
    """log Gamma for Re z >= 0.5, vectorized over complex arrays."""
    z = np.asarray(z, dtype=complex)
    zz = z - 1.0
    series = np.full(z.shape, _LANCZOS_C[0], dtype=complex)
    for k in range(1, len(_LANCZOS_C)):
        series = series + _LANCZOS_C[k] / (zz + k)
    w = zz + _LANCZOS_G + 0.5
    return (0.5 * math.log(2.0 * math.pi)
            + (zz + 0.5) * np.log(w) - w + np.log(series))


def _log_sin_pi(z):
    """log sin(pi z), stable for large |Im z| (imaginary part mod 2 pi)."""
    z = np.asarray(z, dtype=complex)
    w = 1j * np.pi * z
    upper = z.imag > 0.0
    # sin(pi z) = (e^w - e^-w) / 2i with the dominant exponential factored
    fill = complex(-1.0)  # placeholder for the branch not taken
    with np.errstate(divide="ignore", invalid="ignore"):
        out_up = -w + np.log1p(-np.exp(2.0 * np.where(upper, w, fill))) \
            + complex(0.0, math.pi) - np.log(2j)
        out_dn = w + np.log1p(-np.exp(-2.0 * np.where(upper, fill, w))) - np.log(2j)
    return np.where(upper, out_up, out_dn)


def complex_loggamma(z):
    """Principal-branch-ish log Gamma on C (vectorized).

    The real part (log |Gamma|) is accurate everywhere off the poles; the
    imaginary part may differ from the principal branch by multiples of
    2 pi, which is harmless for the quotients built here.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    left = z.real < 0.5
    if np.any(~left):
        out[~left] = _lanczos_loggamma_halfplane(z[~left])
    if np.any(left):
        zl = z[left]
        if np.any((zl.imag == 0.0) & (zl.real == np.round(zl.real))):
            raise GammaPoleError("Gamma pole at nonpositive integer")
        # reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z)
        out[left] = (math.log(math.pi) - _log_sin_pi(zl)
                     - _lanczos_loggamma_halfplane(1.0 - zl))
    return out[0] if scalar else out


def complex_gamma(z):
    """Gamma(z) for complex z via the 15-term Lanczos sum with reflection."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real):
        raise GammaPoleError(f"Gamma pole at z={z.real:g}")
    if z.real < 0.5:
        s = cmath.sin(cmath.pi * z)
        if s == 0:
            raise GammaPoleError(f"Gamma pole at z={z}")
        return cmath.pi / (s * complex_gamma(1.0 - z))
    zz = z - 1.0
    series = complex(_LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        series += _LANCZOS_C[k] / (zz + k)
    w = zz + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * w ** (zz + 0.5) * cmath.exp(-w) * series


def c_alpha(z, m_a: int, m_2a: int, rho_e: float | None = None) -> complex:
    """One Gindikin-Karpelevic factor of the c-function.

    z is the normalized spectral coordinate <alpha,lambda>/<alpha,alpha>.
    rho_e = <alpha,rho>/<alpha,alpha> fixes the z-independent normalization
    (c_alpha(-i rho_e) = 1); for a rank-one subsystem it equals
    m_a/2 + m_2a, which is the default.
    """
    if rho_e is None:
        rho_e = 0.5 * m_a + m_2a
    z = complex(z)
    iz = 1j * z
    f1 = complex_gamma(rho_e + 0.5 * m_a) / complex_gamma(rho_e)
    f2 = (complex_gamma(0.5 * rho_e + 0.25 * m_a + 0.5 * m_2a)
          / complex_gamma(0.5 * rho_e + 0.25 * m_a))
    f3 = complex_gamma(iz) / complex_gamma(iz + 0.5 * m_a)
    f4 = (complex_gamma(0.5 * iz + 0.25 * m_a)
          / complex_gamma(0.5 * iz + 0.25 * m_a + 0.5 * m_2a))
    return f1 * f2 * f3 * f4


def _root_spectral_coords(datum: RootDatum, lam: np.ndarray):
    """(z_alpha, m, m2, rho_e, <alpha,alpha>) per reduced positive root."""
    rho = datum.rho
    out = []
    for root, (m, m2), red in zip(datum.roots_array, datum.mult, datum.reduced):
        if not red:
            continue
        aa = float(root @ root)
        out.append((complex((root @ lam) / aa), m, m2, float(root @ rho) / aa, aa))
    return out


def _log_abs_c_alpha(z: complex, m: int, m2: int, rho_e: float) -> float:
    """log |c_alpha(z)| via log Gamma quotients; safe for large |z|."""
    iz = 1j * z
    lg = (complex_loggamma(rho_e + 0.5 * m) - complex_loggamma(rho_e)
          + complex_loggamma(0.5 * rho_e + 0.25 * m + 0.5 * m2)
          - complex_loggamma(0.5 * rho_e + 0.25 * m)
          + complex_loggamma(iz) - complex_loggamma(iz + 0.5 * m)
          + complex_loggamma(0.5 * iz + 0.25 * m)
          - complex_loggamma(0.5 * iz + 0.25 * m + 0.5 * m2))
    return complex(lg).real


def plancherel_density_log(datum: RootDatum, lam) -> LogVal:
    """log |c(lambda)|^{-2} for real lambda; LogVal zero where it vanishes."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    total = 0.0
    for z, m, m2, rho_e, _ in _root_spectral_coords(datum, lam):
        if z == 0:
            return LogVal.from_value(0.0)
        total += -2.0 * _log_abs_c_alpha(z, m, m2, rho_e)
    return LogVal.from_log(total)


@dataclass(frozen=True)
class SpectralPoint:
    """lambda in C^ell; imaginary part must sit in the closed chamber
    whenever b(-lambda)^{±1} is evaluated."""

    lam: tuple[complex, ...]

    def vec(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=complex)

    def in_holomorphy_domain(self, datum: RootDatum, tol: float = 1e-12) -> bool:
        return datum.in_closed_chamber(self.vec().imag, tol=tol)


def b_inverse_log(datum: RootDatum, lam) -> tuple[complex, float]:
    """b(-lambda)^{-1} as (unit phase, log magnitude).

    b(lambda) = pi(i lambda) c(lambda); the product z * Gamma(iz) is folded
    into Gamma(iz+1)/i per root, so walls are regular points.
    """
    if isinstance(lam, SpectralPoint):
        vec = lam.vec()
    else:
        vec = np.atleast_1d(np.asarray(lam, dtype=complex))
    if not datum.in_closed_chamber(vec.imag, tol=1e-12):
        raise HolomorphyDomainError("Im lambda must lie in the closed chamber")
    log_mag = 0.0
    phase = complex(1.0)
    for z, m, m2, rho_e, aa in _root_spectral_coords(datum, vec):
        w = -z
        iw = 1j * w
        # regularized factor <alpha,alpha> * w * c_alpha(w)
        lg = (complex_loggamma(rho_e + 0.5 * m) - complex_loggamma(rho_e)
              + complex_loggamma(0.5 * rho_e + 0.25 * m + 0.5 * m2)
              - complex_loggamma(0.5 * rho_e + 0.25 * m)
              + complex_loggamma(iw + 1.0) - complex_loggamma(iw + 0.5 * m)
              + complex_loggamma(0.5 * iw + 0.25 * m)
              - complex_loggamma(0.5 * iw + 0.25 * m + 0.5 * m2))
        lg = complex(lg) + math.log(aa) - cmath.log(1j)
        # factor enters b(-lambda); invert it
        log_mag -= lg.real
        phase /= cmath.exp(1j * lg.imag)
    return phase, log_mag


def kernel_prefactor_log(n: int, s: float) -> float:
    """log of the rank-one long-time kernel prefactor

        Gamma(s+1/2) Gamma(s/2+(n-1)/4) / (Gamma(s+1) Gamma(s/2+1/4))

    evaluated on the ray coordinate s = r/2t.
    """
    if s < 0:
        raise ValueError("ray coordinate must be nonnegative")
    return (math.lgamma(s + 0.5) + math.lgamma(0.5 * s + 0.25 * (n - 1))
            - math.lgamma(s + 1.0) - math.lgamma(0.5 * s + 0.25))


def kernel_prefactor(n: int, s: float) -> float:
    return math.exp(kernel_prefactor_log(n, s))


def b_ratio_defect(datum: RootDatum, x_plus: float, y_dist: float,
                   t: float, samples: int = 33) -> float:
    """Worst relative drift of the kernel prefactor across a bounded
    translation: max over w in [x+ - y_dist, x+ + y_dist] of
    |prefactor(w/2t) / prefactor(x+/2t) - 1|.

    Rank-one only.  The Gindikin-Karpelevic b-function itself degenerates
    to a constant in the three-dimensional case, so the drift is measured
    on the prefactor that actually enters the rank-one long-time kernel
    asymptotics; it decays like 1/t.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if datum.rank != 1:
        raise ValueError("defined for rank-one data")
    n = datum.dim_n
    if y_dist == 0.0:
        return 0.0
    base = kernel_prefactor_log(n, x_plus / (2.0 * t))
    lo = max(x_plus - y_dist, 0.0)
    hi = x_plus + y_dist
    worst = 0.0
    for w in np.linspace(lo, hi, samples):
        d = abs(math.exp(kernel_prefactor_log(n, w / (2.0 * t)) - base) - 1.0)
        worst = max(worst, d)
    return worst

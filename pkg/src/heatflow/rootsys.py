"""Root-system data and the chamber geometry behind every spectral formula.

Roots are stored as covectors on R^ell with the inner product normalized so
that for the rank-one family describing H^n the half-sum rho acts as
H |-> (n-1)/2 * H.  That makes the hyperbolic-space exponents literal and
keeps the general-rank layer (A2, B2) on the same footing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .logval import LOG_ZERO, LogVal
from .regions import RegionSchedule


class ConfigurationError(ValueError):
    """Unsupported family or invalid construction parameters."""


@dataclass(frozen=True)
class RootDatum:
    """Positive roots with multiplicities plus the derived invariants.

    rank            -- dimension ell of the flat subspace
    positive_roots  -- tuple of covectors in R^ell
    mult            -- (m_alpha, m_2alpha) per positive root
    reduced         -- mask selecting the indivisible roots
    simple          -- mask selecting the simple roots
    rho             -- half sum of positive roots with multiplicity
    rho0            -- half sum of the reduced positive roots
    """

    name: str
    rank: int
    positive_roots: tuple[tuple[float, ...], ...]
    mult: tuple[tuple[int, int], ...]
    reduced: tuple[bool, ...]
    simple: tuple[bool, ...]
    dim_n: int = field(init=False)
    dim_nu: int = field(init=False)

    def __post_init__(self):
        m_sum = sum(m for (m, _) in self.mult)
        object.__setattr__(self, "dim_n", self.rank + m_sum)
        object.__setattr__(self, "dim_nu", self.rank + 2 * sum(self.reduced))

    @property
    def roots_array(self) -> np.ndarray:
        return np.asarray(self.positive_roots, dtype=float)

    @property
    def rho(self) -> np.ndarray:
        roots = self.roots_array
        m = np.array([mm[0] for mm in self.mult], dtype=float)
        return 0.5 * (m[:, None] * roots).sum(axis=0)

    @property
    def rho0(self) -> np.ndarray:
        roots = self.roots_array
        mask = np.asarray(self.reduced)
        return 0.5 * roots[mask].sum(axis=0)

    @property
    def rho_norm(self) -> float:
        return float(np.linalg.norm(self.rho))

    def reduced_roots(self) -> np.ndarray:
        return self.roots_array[np.asarray(self.reduced)]

    def reduced_mults(self) -> list[tuple[int, int]]:
        return [mm for mm, red in zip(self.mult, self.reduced) if red]

    def simple_roots(self) -> np.ndarray:
        return self.roots_array[np.asarray(self.simple)]

    def in_closed_chamber(self, H, tol: float = 1e-12) -> bool:
        H = np.asarray(H, dtype=float)
        return bool(np.all(self.simple_roots() @ H >= -tol))

    def chamber_extreme_rays(self) -> np.ndarray:
        """Unit generators of the closed chamber's edges (rank <= 2)."""
        if self.rank == 1:
            return np.array([[1.0]])
        if self.rank == 2:
            rays = []
            simple = self.simple_roots()
            for i in range(2):
                a = simple[1 - i]
                u = np.array([-a[1], a[0]])
                if simple[i] @ u < 0:
                    u = -u
                rays.append(u / np.linalg.norm(u))
            return np.asarray(rays)
        raise ConfigurationError("extreme rays implemented for rank <= 2")


def build_root_system(family: str, n: int | None = None) -> RootDatum:
    """Construct a supported root datum.

    family: 'rank1' (needs n >= 2), 'a2' or 'b2'.  A2 and B2 carry the
    split-form multiplicities (all 1).
    """
    fam = family.lower()
    if fam == "rank1":
        if n is None or n < 2:
            raise ConfigurationError("rank1 requires dimension n >= 2")
        return RootDatum(
            name=f"rank1({n})",
            rank=1,
            positive_roots=((1.0,),),
            mult=((n - 1, 0),),
            reduced=(True,),
            simple=(True,),
        )
    if fam == "a2":
        s3 = math.sqrt(3.0) / 2.0
        return RootDatum(
            name="A2",
            rank=2,
            positive_roots=((1.0, 0.0), (-0.5, s3), (0.5, s3)),
            mult=((1, 0), (1, 0), (1, 0)),
            reduced=(True, True, True),
            simple=(True, True, False),
        )
    if fam == "b2":
        return RootDatum(
            name="B2",
            rank=2,
            positive_roots=((1.0, -1.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)),
            mult=((1, 0), (1, 0), (1, 0), (1, 0)),
            reduced=(True, True, True, True),
            simple=(True, True, False, False),
        )
    raise ConfigurationError(f"unsupported root-system family: {family!r}")


def hyperbolic_datum(n: int) -> RootDatum:
    return build_root_system("rank1", n)


def mu(datum: RootDatum, H) -> float:
    """min over positive roots of <alpha, H>; zero exactly on the walls."""
    H = np.asarray(H, dtype=float)
    return float(np.min(datum.roots_array @ H))


def pi_poly(datum: RootDatum, H) -> float:
    """Product of <alpha, H> over the reduced positive roots."""
    H = np.asarray(H, dtype=float)
    return float(np.prod(datum.reduced_roots() @ H))


def rho_min(datum: RootDatum) -> float:
    """min of <rho, .> over unit vectors of the closed chamber.

    A linear functional on a simplicial cone attains its minimum on an
    edge, so enumeration of the extreme rays suffices.
    """
    rho = datum.rho
    rays = datum.chamber_extreme_rays()
    return float(np.min(rays @ rho))


def density_delta_log(datum: RootDatum, H) -> LogVal:
    """log of prod_alpha sinh(<alpha,H>)^{m_alpha}; LogVal zero on walls."""
    H = np.asarray(H, dtype=float)
    vals = datum.roots_array @ H
    if np.any(vals < -1e-12):
        raise ValueError("H must lie in the closed positive chamber")
    total = 0.0
    for v, (m, _) in zip(vals, datum.mult):
        if m == 0:
            continue
        if v <= 0.0:
            return LOG_ZERO
        # log sinh v, stable for both tiny and huge v
        if v < 1e-4:
            ls = math.log(v) + math.log1p(v * v / 6.0)
        else:
            ls = v + math.log1p(-math.exp(-2.0 * v)) - math.log(2.0)
        total += m * ls
    return LogVal.from_log(total)


def chamber_angle_with_rho(datum: RootDatum, H) -> float:
    H = np.asarray(H, dtype=float)
    nH = np.linalg.norm(H)
    if nH == 0.0:
        return 0.0
    c = float(np.dot(H, datum.rho) / (nH * datum.rho_norm))
    return math.acos(min(1.0, max(-1.0, c)))


def box_membership(datum: RootDatum, p: float, t: float,
                   sched: RegionSchedule, H) -> bool:
    """Whether H lies in the closed critical region B_p(t).

    p < 2 : | |H| - 2|rho_p| t | <= r(t) and angle(H, rho) <= r(t)/t
    p = 2 : eps(t) sqrt(t) <= |H| <= sqrt(t)/eps(t) and mu(H) >= eps(t) sqrt(t)
    p > 2 : |H| <= R(t)
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    H = np.asarray(H, dtype=float)
    norm = float(np.linalg.norm(H))
    if p < 2.0:
        center = 2.0 * (2.0 / p - 1.0) * datum.rho_norm * t
        if abs(norm - center) > sched.r_of_t(t):
            return False
        return chamber_angle_with_rho(datum, H) <= sched.r_of_t(t) / t + 1e-15
    if p == 2.0:
        lo, hi = sched.band2(t)
        if not (lo <= norm <= hi):
            return False
        return mu(datum, H) >= lo - 1e-12
    return norm <= sched.ball(t)


@dataclass(frozen=True)
class ChamberVector:
    """A chamber point with its cached invariants."""

    datum: RootDatum
    H: tuple[float, ...]

    def __post_init__(self):
        if not self.datum.in_closed_chamber(self.H):
            raise ValueError("vector outside the closed positive chamber")

    @property
    def vec(self) -> np.ndarray:
        return np.asarray(self.H, dtype=float)

    @property
    def mu(self) -> float:
        return mu(self.datum, self.vec)

    @property
    def pi(self) -> float:
        return pi_poly(self.datum, self.vec)

    @property
    def rho_pairing(self) -> float:
        return float(np.dot(self.datum.rho, self.vec))

    @property
    def angle_with_rho(self) -> float:
        return chamber_angle_with_rho(self.datum, self.vec)


def datum_to_json_dict(datum: RootDatum) -> dict:
    """JSON-serializable description consumed by the CLI."""
    return {
        "name": datum.name,
        "rank": datum.rank,
        "positive_roots": [list(r) for r in datum.positive_roots],
        "multiplicities": [list(m) for m in datum.mult],
        "reduced": list(datum.reduced),
        "simple": list(datum.simple),
        "rho": list(datum.rho),
        "rho0": list(datum.rho0),
        "n": datum.dim_n,
        "nu": datum.dim_nu,
    }

"""Initial cavity states with fluctuating temperature.

Two fluctuation models are supported for the diagonal thermal weights
``p_n`` of the cavity mode, plus the plain Gibbs state they both limit
to:

* a gamma-distributed inverse temperature, which closes to q-deformed
  (Tsallis-type) statistics with a power-law photon-number tail, and
* a finite mixture of N discrete inverse temperatures.

In the gamma model the state is parameterized by a quasi-temperature
``beta_star``; the thermodynamically meaningful inverse temperature
``beta`` follows from the Legendre-structure-preserving map implemented
by :func:`physical_beta`, and :func:`calibrate_beta_star` inverts that
map numerically.

Units: hbar = 1 and the oscillator energy zero is the vacuum, so the
mode Hamiltonian spectrum is ``E_n = n * omega``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .specfun import (
    DEFAULT_ACCURACY,
    GIBBS,
    SeriesAccuracy,
    hurwitz_zeta_scaled,
)

__all__ = [
    "DistKind",
    "GammaSuperstat",
    "MultiLevelSuperstat",
    "PhotonDistribution",
    "UndefinedTemperatureError",
    "BracketError",
    "TailLimitedWarning",
    "photon_weights_gamma",
    "photon_weights_multilevel",
    "photon_weights_gibbs",
    "q_partition",
    "q_trace",
    "q_internal_energy",
    "physical_beta",
    "calibrate_beta_star",
    "mean_photon_q",
    "mean_photon_bose",
]

HARD_CAP = 10**7  # largest photon index materialized in a weight table
MIN_LEVELS = 2  # keep at least {|0>, |1>} so the vacuum Rabi manifold exists


class UndefinedTemperatureError(ValueError):
    """The physical-temperature map has no solution for these parameters."""


class BracketError(ValueError):
    """No sign change found while bracketing a root."""


class TailLimitedWarning(UserWarning):
    pass


class DistKind(enum.Enum):
    GAMMA = "gamma"
    MULTILEVEL = "multilevel"
    GIBBS = "gibbs"


@dataclass(frozen=True)
class GammaSuperstat:
    """Gamma-fluctuation model: deformation q, quasi-temperature, mode frequency."""

    q: float
    beta_star: float
    omega: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.q < 2.0:
            raise ValueError(f"gamma model requires 1 < q < 2, got q={self.q}")
        if not self.beta_star > 0:
            raise ValueError(f"beta_star must be positive, got {self.beta_star}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def s_index(self) -> float:
        """Power-law exponent 1/(q-1) of the photon-number weights."""
        return 1.0 / (self.q - 1.0)

    @property
    def r_offset(self) -> float:
        """Hurwitz offset 1/((q-1) beta_star omega)."""
        return 1.0 / ((self.q - 1.0) * self.beta_star * self.omega)


@dataclass(frozen=True)
class MultiLevelSuperstat:
    """Discrete mixture of inverse temperatures beta_k at one mode frequency."""

    betas: tuple[float, ...]
    omega: float = 1.0

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) < 1:
            raise ValueError("at least one inverse temperature is required")
        bad = [b for b in betas if not b > 0]
        if bad:
            raise ValueError(f"all inverse temperatures must be positive, got {bad[:3]}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "betas", betas)


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated diagonal cavity weights with exact tail accounting.

    ``weights[n]`` is the probability of Fock level n for n <= n_max;
    ``tail_mass`` is the exact probability of all higher levels, so the
    pair always sums to one.  ``tail_limited`` marks distributions whose
    truncation was forced by the hard cap rather than by the requested
    tail tolerance.
    """

    weights: np.ndarray
    tail_mass: float
    source: DistKind
    tail_limited: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D array")
        if np.any(w < -1e-12):
            raise ValueError("negative photon weight")
        w = np.where(w < 0.0, 0.0, w)
        object.__setattr__(self, "weights", w)
        if self.tail_mass < -1e-12:
            raise ValueError(f"negative tail mass {self.tail_mass}")
        object.__setattr__(self, "tail_mass", max(float(self.tail_mass), 0.0))
        total = float(np.sum(w)) + self.tail_mass
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights + tail_mass = {total!r}, expected 1 within 1e-12")

    @property
    def n_max(self) -> int:
        return self.weights.size - 1

    def truncated(self, n_max: int) -> "PhotonDistribution":
        """Shorter truncation of the same state; dropped head mass moves to the tail."""
        if n_max >= self.n_max:
            return self
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        dropped = float(np.sum(self.weights[n_max + 1 :]))
        return PhotonDistribution(
            weights=self.weights[: n_max + 1].copy(),
            tail_mass=self.tail_mass + dropped,
            source=self.source,
            tail_limited=self.tail_limited,
            meta=dict(self.meta),
        )


def _gamma_log_tail(s: float, r: float, n_last: int, acc: SeriesAccuracy) -> float:
    """log of zeta_H(s, n_last+1+r) / zeta_H(s, r), the mass beyond level n_last."""
    shift = n_last + 1.0
    return float(
        -s * np.log1p(shift / r)
        + np.log(hurwitz_zeta_scaled(s, shift + r, acc))
        - np.log(hurwitz_zeta_scaled(s, r, acc))
    )


def photon_weights_gamma(
    s: GammaSuperstat,
    tail_tol: float = 1e-8,
    hard_cap: int = HARD_CAP,
    acc: SeriesAccuracy = DEFAULT_ACCURACY,
) -> PhotonDistribution:
    """Photon-number weights of the gamma-fluctuation thermal state.

    The weights follow ``p_n = (n + r)^(-s) / zeta_H(s, r)`` with
    s = 1/(q-1) and r = 1/((q-1) beta_star omega); the truncation level
    is the smallest one whose exact closed-form tail mass (a ratio of
    Hurwitz zetas) is <= tail_tol, subject to the hard cap.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must be in (0, 1), got {tail_tol}")
    sx, r = s.s_index, s.r_offset
    log_tol = math.log(tail_tol)

    lo, hi = MIN_LEVELS - 1, hard_cap
    tail_limited = _gamma_log_tail(sx, r, hi, acc) > log_tol
    if tail_limited:
        n_max = hard_cap
    elif _gamma_log_tail(sx, r, lo, acc) <= log_tol:
        n_max = lo
    else:
        while hi - lo > 1:  # smallest n with tail(n) <= tol
            mid = (lo + hi) // 2
            if _gamma_log_tail(sx, r, mid, acc) <= log_tol:
                hi = mid
            else:
                lo = mid
        n_max = hi

    norm = hurwitz_zeta_scaled(sx, r, acc)
    n = np.arange(n_max + 1, dtype=np.float64)
    weights = np.exp(-sx * np.log1p(n / r)) / norm
    tail = math.exp(_gamma_log_tail(sx, r, n_max, acc))
    return PhotonDistribution(
        weights=weights,
        tail_mass=tail,
        source=DistKind.GAMMA,
        tail_limited=tail_limited,
        meta={"q": s.q, "beta_star": s.beta_star, "omega": s.omega, "tail_tol": tail_tol},
    )


def photon_weights_gibbs(
    beta: float, omega: float = 1.0, tail_tol: float = 1e-8
) -> PhotonDistribution:
    """Geometric (Gibbs) photon-number weights ``(1 - x) x^n`` with x = exp(-beta omega)."""
    if not beta > 0 or not omega > 0:
        raise ValueError("beta and omega must be positive")
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must be in (0, 1), got {tail_tol}")
    x = math.exp(-beta * omega)
    # smallest n_max with x^(n_max+1) <= tol, floored at MIN_LEVELS - 1
    n_max = max(MIN_LEVELS - 1, math.ceil(math.log(tail_tol) / math.log(x)) - 1)
    while n_max > MIN_LEVELS - 1 and x ** n_max <= tail_tol:
        n_max -= 1
    n = np.arange(n_max + 1, dtype=np.float64)
    weights = (1.0 - x) * x**n
    return PhotonDistribution(
        weights=weights,
        tail_mass=x ** (n_max + 1),
        source=DistKind.GIBBS,
        meta={"beta": beta, "omega": omega, "tail_tol": tail_tol},
    )


def photon_weights_multilevel(
    s: MultiLevelSuperstat, tail_tol: float = 1e-8
) -> PhotonDistribution:
    """Photon-number weights of the N-temperature mixture state.

    ``p_n = (1/Z_N) sum_k exp(-n beta_k omega)`` with the normalizing
    super-partition function ``Z_N = sum_k 1/(1 - exp(-beta_k omega))``;
    the exponential tail is closed in exact geometric form.
    """
    if not 0.0 < tail_tol < 1.0:
        raise ValueError(f"tail_tol must be in (0, 1), got {tail_tol}")
    x = np.exp(-np.asarray(s.betas) * s.omega)
    z_n = float(np.sum(1.0 / (1.0 - x)))

    def tail(n_last: int) -> float:
        return float(np.sum(x ** (n_last + 1) / (1.0 - x))) / z_n

    x_max = float(np.max(x))
    n_max = max(MIN_LEVELS - 1, math.ceil(math.log(tail_tol) / math.log(x_max)) - 1)
    while n_max > MIN_LEVELS - 1 and tail(n_max - 1) <= tail_tol:
        n_max -= 1
    n = np.arange(n_max + 1, dtype=np.float64)
    weights = np.sum(x[None, :] ** n[:, None], axis=1) / z_n
    return PhotonDistribution(
        weights=weights,
        tail_mass=tail(n_max),
        source=DistKind.MULTILEVEL,
        meta={"betas": list(s.betas), "omega": s.omega, "tail_tol": tail_tol},
    )


def q_partition(s: GammaSuperstat, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Deformed partition function ``Tr exp_q(-beta_star H)``.

    In scaled-zeta form this is exactly ``sum_n (1 + n/r)^(-s)`` with
    s = 1/(q-1), r = 1/((q-1) beta_star omega); the q -> 1 limit is the
    geometric series :func:`gibbs_partition`.
    """
    return hurwitz_zeta_scaled(s.s_index, s.r_offset, acc)


def gibbs_partition(beta: float, omega: float = 1.0) -> float:
    """Geometric-series partition function 1/(1 - exp(-beta omega))."""
    return 1.0 / -math.expm1(-beta * omega)


def q_trace(s: GammaSuperstat, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Trace of the q-th power of the normalized quasi-temperature state.

    Equals ``zeta_H(q/(q-1), r) / zeta_H(1/(q-1), r)^q``; the scaled
    zetas make the prefactors cancel identically.  Tends to 1 as q -> 1.
    """
    sx, r = s.s_index, s.r_offset
    return hurwitz_zeta_scaled(s.q * sx, r, acc) / hurwitz_zeta_scaled(sx, r, acc) ** s.q


def mean_photon_q(s: GammaSuperstat, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """q-weighted mean photon number of the quasi-temperature state.

    Closed form ``[Phi(1, 1/(q-1), r) - r Phi(1, q/(q-1), r)] /
    zeta_H(q/(q-1), r)`` rewritten in scaled zetas as
    ``r (G_s/G_qs - 1)``, which stays finite-precision all the way into
    the near-Gibbs regime.
    """
    sx, r = s.s_index, s.r_offset
    g1 = hurwitz_zeta_scaled(sx, r, acc)
    gq = hurwitz_zeta_scaled(s.q * sx, r, acc)
    return r * (g1 / gq - 1.0)


def mean_photon_bose(beta: float, omega: float = 1.0) -> float:
    """Bose-Einstein occupancy 1/(exp(beta omega) - 1)."""
    if not beta * omega > 0:
        raise ValueError("beta * omega must be positive")
    return 1.0 / math.expm1(beta * omega)


def q_internal_energy(s: GammaSuperstat, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Constrained internal energy ``omega * sum_n n p_n^q`` of the quasi state.

    Identical to ``-d/d(beta_star) ln_q Z`` (checked against a finite
    difference in the test suite).
    """
    return s.omega * mean_photon_q(s, acc) * q_trace(s, acc)


def physical_beta(s: GammaSuperstat | float, omega: float = 1.0, *, q=None,
                  acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """Physical inverse temperature from the quasi-temperature parameter.

    Implements ``beta = beta_star Tr[rho^q] / (1 - (1-q) beta_star U /
    Tr[rho^q])``.  For 1 < q < 2 the denominator is automatically
    positive; a non-positive denominator (possible for q < 1 extensions)
    raises :class:`UndefinedTemperatureError`.  Accepts either a
    :class:`GammaSuperstat` or ``(beta_star, omega, q=GIBBS)`` for the
    undeformed limit, where beta == beta_star.
    """
    if q is GIBBS:
        beta_star = float(s)
        if not beta_star > 0:
            raise ValueError("beta_star must be positive")
        return beta_star
    if not isinstance(s, GammaSuperstat):
        s = GammaSuperstat(q=q, beta_star=float(s), omega=omega)
    trace_q = q_trace(s, acc)
    energy = q_internal_energy(s, acc)
    denom = 1.0 - (1.0 - s.q) * s.beta_star * energy / trace_q
    if denom <= 0.0:
        raise UndefinedTemperatureError(
            f"physical temperature undefined at q={s.q}, beta_star={s.beta_star}"
        )
    return s.beta_star * trace_q / denom


_SCAN_DECADES = (-3.0, 3.0)  # beta_star * omega scan range, log10


def calibrate_beta_star(
    q,
    beta_target: float,
    omega: float = 1.0,
    acc: SeriesAccuracy = DEFAULT_ACCURACY,
) -> float:
    """Invert :func:`physical_beta`: the beta_star that realizes a physical beta.

    Bracketing scan over log(beta_star) across [1e-3, 1e3]/omega followed
    by a derivative-free hybrid root solve; the round trip
    ``physical_beta(calibrate_beta_star(beta)) == beta`` holds to 1e-10
    relative.
    """
    if not beta_target > 0:
        raise ValueError(f"beta_target must be positive, got {beta_target}")
    if q is GIBBS:
        return beta_target

    def residual(log_bsw: float) -> float:
        bs = math.exp(log_bsw) / omega
        return physical_beta(GammaSuperstat(q=q, beta_star=bs, omega=omega), acc=acc) - beta_target

    lo_exp, hi_exp = _SCAN_DECADES
    grid = np.linspace(lo_exp, hi_exp, 61) * math.log(10.0)
    values = [residual(g) for g in grid]
    for (ga, fa), (gb, fb) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if fa == 0.0:
            return math.exp(ga) / omega
        if fa * fb < 0.0:
            root = brentq(residual, ga, gb, xtol=1e-14, rtol=8.9e-16)
            return math.exp(root) / omega
    if values[-1] == 0.0:
        return math.exp(grid[-1]) / omega
    raise BracketError(
        f"beta={beta_target} not attainable for q={q} with beta_star*omega in "
        f"[1e{lo_exp:+.0f}, 1e{hi_exp:+.0f}]"
    )

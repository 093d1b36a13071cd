"""Closed-form Jaynes-Cummings dynamics and a brute-force evolution oracle.

A two-level atom couples to one cavity mode through
``H = (omega0/2) sigma_z + omega a^dag a + (lam/2)(a^dag sigma_- + a sigma_+)``
(hbar = 1).  With a diagonal initial state the joint density operator
stays block diagonal over the excitation manifolds
``{|e,n>, |g,n+1>}``, so the evolution reduces to per-manifold 2x2
rotations with generalized Rabi frequency ``delta_n``.

The analytic route (:class:`BlockEvolver`, :func:`coefficients_at`) and
the numeric route (:func:`oracle_evolve`, dense per-block
diagonalization) are implemented independently so each one checks the
other.

Photon levels beyond the truncation of the supplied
:class:`~jcentropy.superstat.PhotonDistribution` are carried as a
frozen, non-evolving contribution (epsilon-split between the atomic
sectors), so total probability is conserved exactly and the freezing
error is bounded by the tracked tail mass.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .superstat import PhotonDistribution

__all__ = [
    "ModelParams",
    "AtomInit",
    "ManifoldQuantities",
    "EvolvedState",
    "OracleEvolution",
    "DegenerateCouplingError",
    "CutoffWarning",
    "manifold",
    "BlockEvolver",
    "coefficients_at",
    "reduced_atom",
    "reduced_field",
    "oracle_evolve",
]


class DegenerateCouplingError(ValueError):
    """Dressed-state mixing ratios are undefined at zero coupling."""


class CutoffWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Atom frequency, cavity frequency and coupling strength."""

    omega0: float
    omega: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @property
    def delta(self) -> float:
        """Detuning omega0 - omega."""
        return self.omega0 - self.omega

    @classmethod
    def from_detuning(cls, delta: float, lam: float, omega: float = 1.0) -> "ModelParams":
        return cls(omega0=omega + delta, omega=omega, lam=lam)


@dataclass(frozen=True)
class AtomInit:
    """Diagonal atomic initial state: weight epsilon on the excited level."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class ManifoldQuantities:
    """Per-manifold dressed-state quantities."""

    n: int
    delta_n: float
    omega_plus: float
    omega_minus: float


def _manifold_arrays(params: ModelParams, count: int):
    """delta_n, Omega_+, Omega_- for manifolds n = 0..count-1 (vectorized)."""
    n = np.arange(count, dtype=np.float64)
    root = params.lam * np.sqrt(n + 1.0)
    delta_n = np.sqrt(params.delta**2 + params.lam**2 * (n + 1.0))
    omega_plus = (params.delta + delta_n) / root
    omega_minus = (params.delta - delta_n) / root
    return delta_n, omega_plus, omega_minus


def manifold(params: ModelParams, n: int) -> ManifoldQuantities:
    """Generalized Rabi frequency and mixing ratios of excitation manifold n."""
    if n < 0:
        raise ValueError(f"manifold index must be >= 0, got {n}")
    if params.lam == 0.0:
        raise DegenerateCouplingError(
            "mixing ratios are undefined at lam=0; evolution handles this case "
            "by freezing the populations"
        )
    delta_n, omega_plus, omega_minus = _manifold_arrays(params, n + 1)
    return ManifoldQuantities(
        n=n,
        delta_n=float(delta_n[n]),
        omega_plus=float(omega_plus[n]),
        omega_minus=float(omega_minus[n]),
    )


@dataclass(frozen=True)
class EvolvedState:
    """Joint-state coefficients at one instant.

    ``coeff_a[n]``, ``coeff_b[n]``, ``coeff_c[n]`` are the populations of
    |e,n>, the |e,n><g,n+1| coherence, and the population of |g,n+1> in
    manifold n; ``uncoupled_weight`` is the stationary |g,0> weight.
    ``excited_top`` (the |e, n_max> weight, which has no partner level
    inside the truncation) and the split tail are frozen at their t=0
    values.
    """

    time: float
    coeff_a: np.ndarray
    coeff_b: np.ndarray | None
    coeff_c: np.ndarray
    uncoupled_weight: float
    excited_top: float
    tail_mass: float
    epsilon: float

    @property
    def n_max(self) -> int:
        """Top retained photon level (= number of evolved manifolds)."""
        return self.coeff_a.size


class BlockEvolver:
    """Precomputed closed-form manifold evolution for one configuration.

    The per-manifold constants are assembled once; evaluating a time
    costs one cosine per manifold.  ``with_coherence=False`` skips the
    complex coherence coefficients (entropies never consume them).
    """

    def __init__(
        self,
        params: ModelParams,
        atom: AtomInit,
        dist: PhotonDistribution,
        with_coherence: bool = True,
    ):
        if dist.n_max < 1:
            raise ValueError("need at least photon levels {0, 1} to evolve a manifold")
        self.params = params
        self.atom = atom
        self.dist = dist
        self.with_coherence = with_coherence
        eps = atom.epsilon
        p = dist.weights
        pn, pn1 = p[:-1], p[1:]
        self.uncoupled_weight = float((1.0 - eps) * p[0])
        self.excited_top = float(eps * p[-1])
        self.block_weight = eps * pn + (1.0 - eps) * pn1  # conserved per manifold
        self._frozen = params.lam == 0.0
        if self._frozen:
            self._a_frozen = eps * pn
            self._c_frozen = (1.0 - eps) * pn1
            return
        delta_n, wp, wm = _manifold_arrays(params, dist.n_max)
        self.delta_n = delta_n
        self.omega_plus, self.omega_minus = wp, wm
        d1, d2 = 1.0 + wp**2, 1.0 + wm**2
        cross_den = d1 * d2
        bp = (eps * pn + (1.0 - eps) * wp**2 * pn1) / d1**2
        bm = (eps * pn + (1.0 - eps) * wm**2 * pn1) / d2**2
        bx = (eps * pn + (1.0 - eps) * wp * wm * pn1) / cross_den
        self._a0 = bp + bm
        self._a1 = 2.0 * bx
        self._c0 = wp**2 * bp + wm**2 * bm
        self._c1 = 2.0 * wp * wm * bx
        if with_coherence:
            self._b0 = wp * bp + wm * bm
            self._b_cos = bx * (wp + wm)
            self._b_sin = bx * (wp - wm)

    def coefficients(self, t: float):
        """(A_n(t), B_n(t) or None, C_n(t)) over the evolved manifolds."""
        if self._frozen:
            b = np.zeros_like(self._a_frozen, dtype=complex) if self.with_coherence else None
            return self._a_frozen.copy(), b, self._c_frozen.copy()
        cos = np.cos(self.delta_n * t)
        a = self._a0 + self._a1 * cos
        c = self._c0 + self._c1 * cos
        b = None
        if self.with_coherence:
            sin = np.sin(self.delta_n * t)
            b = self._b0 + self._b_cos * cos + 1j * self._b_sin * sin
        return a, b, c

    def state(self, t: float) -> EvolvedState:
        a, b, c = self.coefficients(t)
        return EvolvedState(
            time=float(t),
            coeff_a=a,
            coeff_b=b,
            coeff_c=c,
            uncoupled_weight=self.uncoupled_weight,
            excited_top=self.excited_top,
            tail_mass=self.dist.tail_mass,
            epsilon=self.atom.epsilon,
        )


def coefficients_at(
    params: ModelParams, atom: AtomInit, dist: PhotonDistribution, t: float
) -> EvolvedState:
    """Joint-state coefficients at time t (valid for any real t)."""
    return BlockEvolver(params, atom, dist).state(t)


def _atom_probs(a_sum, c_sum, uncoupled, excited_top, tail_mass, epsilon):
    p_e = a_sum + excited_top + epsilon * tail_mass
    p_g = uncoupled + c_sum + (1.0 - epsilon) * tail_mass
    return p_e, p_g


def _field_weights(a, c, uncoupled, excited_top):
    w = np.empty(a.size + 1)
    w[0] = uncoupled + a[0]
    w[1:-1] = a[1:] + c[:-1]
    w[-1] = c[-1] + excited_top
    return w


def reduced_atom(state: EvolvedState) -> tuple[float, float]:
    """Excited/ground populations of the reduced atomic state.

    The frozen tail is split epsilon : (1 - epsilon) between the two
    sectors, so the pair sums to one exactly.
    """
    return _atom_probs(
        float(np.sum(state.coeff_a)),
        float(np.sum(state.coeff_c)),
        state.uncoupled_weight,
        state.excited_top,
        state.tail_mass,
        state.epsilon,
    )


def reduced_field(state: EvolvedState) -> np.ndarray:
    """Photon-number weights of the reduced field state over levels 0..n_max.

    The remaining probability beyond the top level is ``state.tail_mass``.
    """
    return _field_weights(
        state.coeff_a, state.coeff_c, state.uncoupled_weight, state.excited_top
    )


@dataclass(frozen=True)
class OracleEvolution:
    """Brute-force evolution output on the same truncation conventions."""

    time: float
    coeff_a: np.ndarray
    coeff_b: np.ndarray
    coeff_c: np.ndarray
    atom_excited: float
    atom_ground: float
    field_weights: np.ndarray
    tail_mass: float


def oracle_evolve(
    params: ModelParams,
    atom: AtomInit,
    dist: PhotonDistribution,
    t: float,
    n_cut: int,
    warn_tol: float = 1e-10,
) -> OracleEvolution:
    """Numerically evolve the truncated model and partial-trace the result.

    Builds the Hamiltonian blocks on ``{|g,0>, |e,n>, |g,n+1>: n < n_cut}``
    explicitly, exponentiates each 2x2 block through its numeric
    eigendecomposition, and traces out each subsystem by direct
    summation.  Shares no algebra with :class:`BlockEvolver` beyond the
    frozen-truncation convention, which both sides must apply to be
    comparable.
    """
    if n_cut < 1:
        raise ValueError("n_cut must be >= 1")
    eps = atom.epsilon
    p = dist.weights
    k = min(n_cut, dist.n_max)

    frozen_levels = float(np.sum(p[k:]))  # head weights not covered by a manifold
    if frozen_levels - float(p[k]) + dist.tail_mass > warn_tol:
        warnings.warn(
            f"photon mass {frozen_levels - float(p[k]) + dist.tail_mass:.3e} beyond "
            f"n_cut={n_cut} exceeds warn_tol={warn_tol:g}; comparisons may be "
            "truncation-limited",
            CutoffWarning,
            stacklevel=2,
        )

    n = np.arange(k, dtype=np.float64)
    h_blocks = np.zeros((k, 2, 2))
    h_blocks[:, 0, 0] = params.omega0 / 2.0 + n * params.omega
    h_blocks[:, 1, 1] = -params.omega0 / 2.0 + (n + 1.0) * params.omega
    h_blocks[:, 0, 1] = h_blocks[:, 1, 0] = params.lam * np.sqrt(n + 1.0) / 2.0

    evals, evecs = np.linalg.eigh(h_blocks)
    phases = np.exp(-1j * evals * t)
    u = np.einsum("kij,kj,klj->kil", evecs.astype(complex), phases, evecs.astype(complex))
    rho0 = np.zeros((k, 2, 2), dtype=complex)
    rho0[:, 0, 0] = eps * p[:k]
    rho0[:, 1, 1] = (1.0 - eps) * p[1 : k + 1]
    rho_t = u @ rho0 @ np.conj(np.swapaxes(u, 1, 2))

    coeff_a = rho_t[:, 0, 0].real
    coeff_c = rho_t[:, 1, 1].real
    coeff_b = rho_t[:, 0, 1]

    uncoupled = (1.0 - eps) * p[0]
    frozen_excited = eps * (frozen_levels + dist.tail_mass)
    frozen_ground = (1.0 - eps) * (frozen_levels - float(p[k]) + dist.tail_mass)

    atom_excited = float(np.sum(coeff_a)) + frozen_excited
    atom_ground = uncoupled + float(np.sum(coeff_c)) + frozen_ground

    field = np.zeros(dist.n_max + 1)
    field[0] = uncoupled + coeff_a[0]
    field[1:k] = coeff_a[1:] + coeff_c[:-1]
    field[k] = coeff_c[-1] + eps * p[k]
    if k < dist.n_max:
        field[k + 1 :] = p[k + 1 :]

    return OracleEvolution(
        time=float(t),
        coeff_a=coeff_a,
        coeff_b=coeff_b,
        coeff_c=coeff_c,
        atom_excited=atom_excited,
        atom_ground=atom_ground,
        field_weights=field,
        tail_mass=dist.tail_mass,
    )

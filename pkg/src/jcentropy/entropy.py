"""Entropy functionals, entropy-exchange traces and Bloch-sphere sweeps.

Two functionals are available for every probability list: the von
Neumann entropy ``-sum p ln p`` and its q-deformed counterpart
``-sum p ln_q p`` (both with the ``0 ln 0 = 0`` convention).  Partial
entropy exchange is the change of a subsystem entropy relative to t=0,
and time averages use composite Simpson quadrature on the stored grid.

Truncation note: a field entropy computed over a truncated weight list
omits the (constant, non-evolving) contribution of the tail levels.
That offset cancels exactly in the exchange ``dS(t) = S(t) - S(0)``,
which is the quantity this module reports.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .jcm import (
    AtomInit,
    BlockEvolver,
    EvolvedState,
    ModelParams,
    _atom_probs,
    _field_weights,
    reduced_atom,
    reduced_field,
)
from .superstat import PhotonDistribution

__all__ = [
    "EntropyKind",
    "VON_NEUMANN",
    "tsallis",
    "FieldEntropyForm",
    "EntropyTrace",
    "BlochPoint",
    "GridCoarseWarning",
    "entropy_of",
    "atom_entropy",
    "field_entropy",
    "entropy_trace",
    "time_average",
    "bloch_sweep",
]


class GridCoarseWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EntropyKind:
    """Entropy functional selector: q=None for von Neumann, else Tsallis index."""

    q: float | None = None

    def __post_init__(self):
        if self.q is not None and not 1.0 < self.q < 2.0:
            raise ValueError(f"deformed entropy requires 1 < q < 2, got q={self.q}")

    @property
    def is_von_neumann(self) -> bool:
        return self.q is None

    def label(self) -> str:
        return "vn" if self.q is None else f"tsallis(q={self.q:g})"


VON_NEUMANN = EntropyKind()


def tsallis(q: float) -> EntropyKind:
    return EntropyKind(q=q)


class FieldEntropyForm(enum.Enum):
    """Field entropy over the full spectrum, or coarse-grained to (vacuum, rest)."""

    FULL = "full"
    COARSE = "coarse"


@dataclass(frozen=True)
class BlochPoint:
    """Polar Bloch-sphere coordinates of the atomic initial state."""

    r: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")

    @property
    def epsilon(self) -> float:
        """Excited-state weight (1 + r cos(theta)) / 2."""
        return min(max((1.0 + self.r * math.cos(self.theta)) / 2.0, 0.0), 1.0)


def entropy_of(p, kind: EntropyKind = VON_NEUMANN) -> float:
    """Entropy of a (possibly sub-normalized) probability list.

    Sub-normalized input is accepted so truncated weight lists can be
    scored directly; every term is non-negative either way.
    """
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability list")
    if np.any(p < -1e-12):
        raise ValueError(f"negative probability {float(np.min(p))}")
    total = float(np.sum(p))
    if total > 1.0 + 1e-10:
        raise ValueError(f"probabilities sum to {total}, exceeding 1")
    p = p[p > 0.0]
    if p.size == 0:
        return 0.0
    if kind.is_von_neumann:
        return float(-np.sum(p * np.log(p)))
    q = kind.q
    # -p ln_q p = (p^(2-q) - p)/(q - 1), termwise non-negative for p <= 1
    return float(np.sum(np.power(p, 2.0 - q) - p) / (q - 1.0))


def atom_entropy(state: EvolvedState, kind: EntropyKind = VON_NEUMANN) -> float:
    """Entropy of the reduced atomic state (two outcomes)."""
    return entropy_of(reduced_atom(state), kind)


def field_entropy(
    state: EvolvedState,
    kind: EntropyKind = VON_NEUMANN,
    form: FieldEntropyForm = FieldEntropyForm.FULL,
) -> float:
    """Entropy of the reduced field state.

    ``FULL`` scores the whole photon-number weight list; ``COARSE``
    aggregates everything above the vacuum into a single outcome, i.e.
    the two-term expression (vacuum weight, all n >= 1 including the
    tail).
    """
    w = reduced_field(state)
    if form is FieldEntropyForm.COARSE:
        rest = float(np.sum(w[1:])) + state.tail_mass
        return entropy_of([w[0], rest], kind)
    return entropy_of(w, kind)


@dataclass(frozen=True)
class EntropyTrace:
    """Sampled partial entropy exchanges with their time averages."""

    times: np.ndarray
    ds_atom: np.ndarray
    ds_field: np.ndarray
    ds_total: np.ndarray
    avg_ds_atom: float
    avg_ds_field: float
    metadata: dict = field(default_factory=dict, compare=False)


def _trace_entropies(evolver: BlockEvolver, kind: EntropyKind, form: FieldEntropyForm, t: float):
    a, _, c = evolver.coefficients(t)
    p_e, p_g = _atom_probs(
        float(np.sum(a)),
        float(np.sum(c)),
        evolver.uncoupled_weight,
        evolver.excited_top,
        evolver.dist.tail_mass,
        evolver.atom.epsilon,
    )
    s_atom = entropy_of([p_e, p_g], kind)
    w = _field_weights(a, c, evolver.uncoupled_weight, evolver.excited_top)
    if form is FieldEntropyForm.COARSE:
        s_field = entropy_of([w[0], float(np.sum(w[1:])) + evolver.dist.tail_mass], kind)
    else:
        s_field = entropy_of(w, kind)
    return s_atom, s_field


def entropy_trace(
    params: ModelParams,
    atom: AtomInit,
    dist: PhotonDistribution,
    kind: EntropyKind = VON_NEUMANN,
    form: FieldEntropyForm = FieldEntropyForm.FULL,
    times: np.ndarray | None = None,
    extra_metadata: dict | None = None,
) -> EntropyTrace:
    """Partial entropy exchange of atom and field on a time grid.

    The grid must start at t=0 (the exchange is defined relative to the
    initial state, so the first samples are exactly zero).
    """
    if times is None:
        t_max = 50.0 / abs(params.lam) if params.lam != 0.0 else 50.0
        times = np.linspace(0.0, t_max, 2000)
    times = np.asarray(times, dtype=float)
    if times.size < 2 or times[0] != 0.0:
        raise ValueError("time grid must start at t=0 and hold at least two samples")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("time grid must be strictly increasing")

    evolver = BlockEvolver(params, atom, dist, with_coherence=False)
    s_atom = np.empty(times.size)
    s_field = np.empty(times.size)
    for i, t in enumerate(times):
        s_atom[i], s_field[i] = _trace_entropies(evolver, kind, form, t)
    ds_atom = s_atom - s_atom[0]
    ds_field = s_field - s_field[0]
    ds_total = ds_atom + ds_field

    metadata = {
        "omega0": params.omega0,
        "omega": params.omega,
        "lambda": params.lam,
        "delta": params.delta,
        "epsilon": atom.epsilon,
        "entropy": kind.label(),
        "field_entropy_form": form.value,
        "dist_source": dist.source.value,
        "dist_meta": dict(dist.meta),
        "n_max": dist.n_max,
        "tail_mass": dist.tail_mass,
        "tail_limited": dist.tail_limited,
        "n_times": int(times.size),
        "t_max": float(times[-1]),
    }
    if extra_metadata:
        metadata.update(extra_metadata)

    return EntropyTrace(
        times=times,
        ds_atom=ds_atom,
        ds_field=ds_field,
        ds_total=ds_total,
        avg_ds_atom=_window_average(times, ds_atom),
        avg_ds_field=_window_average(times, ds_field),
        metadata=metadata,
    )


def _window_average(times: np.ndarray, values: np.ndarray) -> float:
    return float(simpson(values, x=times) / (times[-1] - times[0]))


def time_average(
    trace: EntropyTrace,
    horizon: float | None = None,
    rich_tol: float = 1e-6,
    warn: bool = True,
) -> tuple[float, float]:
    """Time-averaged (atom, field) entropy exchange over [0, horizon].

    Composite Simpson on the stored grid; the average over the half-density
    grid is compared against the full one and a :class:`GridCoarseWarning`
    is emitted when they disagree by more than ``rich_tol``.
    """
    times = trace.times
    if horizon is None:
        sel = slice(None)
    else:
        if horizon > times[-1] * (1.0 + 1e-12):
            raise ValueError(f"horizon {horizon} exceeds last grid time {times[-1]}")
        stop = int(np.searchsorted(times, horizon * (1.0 + 1e-12), side="right"))
        sel = slice(0, max(stop, 3))
    t = times[sel]
    averages = []
    for values in (trace.ds_atom[sel], trace.ds_field[sel]):
        full = _window_average(t, values)
        if warn and t.size >= 5:
            half = _window_average(t[::2], values[::2])
            if abs(full - half) > rich_tol:
                warnings.warn(
                    f"time grid may be too coarse: half/full Simpson averages differ "
                    f"by {abs(full - half):.3e} (> {rich_tol:g})",
                    GridCoarseWarning,
                    stacklevel=2,
                )
        averages.append(full)
    return averages[0], averages[1]


def bloch_sweep(
    params: ModelParams,
    dist: PhotonDistribution,
    kind: EntropyKind,
    form: FieldEntropyForm,
    r_values,
    theta_values,
    times: np.ndarray,
    horizon: float | None = None,
    max_workers: int | None = None,
) -> np.ndarray:
    """Time-averaged exchanges over a (r, theta) grid of atom preparations.

    Returns an array of shape ``(len(r_values), len(theta_values), 2)``
    holding (avg atom exchange, avg field exchange); entries are ordered
    by the declared grid and are identical whether or not the points are
    evaluated concurrently.
    """
    r_values = np.asarray(r_values, dtype=float)
    theta_values = np.asarray(theta_values, dtype=float)
    out = np.empty((r_values.size, theta_values.size, 2))

    def evaluate(idx: tuple[int, int]) -> tuple[tuple[int, int], tuple[float, float]]:
        i, j = idx
        point = BlochPoint(r=float(r_values[i]), theta=float(theta_values[j]))
        trace = entropy_trace(
            params, AtomInit(epsilon=point.epsilon), dist, kind, form, times
        )
        return idx, time_average(trace, horizon, warn=False)

    indices = [(i, j) for i in range(r_values.size) for j in range(theta_values.size)]
    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(evaluate, indices))
    else:
        results = [evaluate(idx) for idx in indices]
    for (i, j), (avg_a, avg_b) in results:
        out[i, j, 0] = avg_a
        out[i, j, 1] = avg_b
    return out

"""Seeded generation and persistence of inverse-temperature ensembles.

Samples are drawn around a target ``beta * omega`` with either a normal
or a Weibull shape.  Reproducibility is part of the contract, so the
generator is pinned explicitly rather than delegated to a platform
library: a SplitMix64 stream feeding a Box-Muller transform (cosine
branch, one deviate per uniform pair) for the normal shape and the
inverse CDF for the Weibull shape.  Non-positive draws are rejected and
redrawn.

Sample files are line-oriented text: a header line carrying the
generating spec as JSON, then one inverse temperature per line in
shortest-round-trip decimal form.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .superstat import MultiLevelSuperstat

__all__ = [
    "BetaEnsembleSpec",
    "SplitMix64",
    "RejectionOverflowError",
    "sample_betas",
    "save_betas",
    "load_betas",
]

_MASK64 = (1 << 64) - 1
_MAX_CONSECUTIVE_REJECTIONS = 10**6


class RejectionOverflowError(RuntimeError):
    """The positivity rejection loop failed to produce a draw."""


class SplitMix64:
    """Fully specified 64-bit PRNG (SplitMix64), identical on every platform."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def uniform_pos(self) -> float:
        """Uniform double in (0, 1], safe as a logarithm argument."""
        return ((self.next_uint64() >> 11) + 1) * 2.0**-53

    def normal(self, mean: float, sd: float) -> float:
        # Box-Muller, cosine branch only (one deviate per uniform pair).
        u1 = self.uniform_pos()
        u2 = self.uniform()
        return mean + sd * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def weibull(self, scale: float, shape: float) -> float:
        # Inverse CDF: scale * (-ln(1 - u))^(1/shape).
        u = self.uniform()
        return scale * (-math.log1p(-u)) ** (1.0 / shape)


@dataclass(frozen=True)
class BetaEnsembleSpec:
    """Recipe for a random inverse-temperature ensemble.

    The distribution parameters (``mean``/``sd`` for the normal shape,
    ``scale``/``shape_param`` for the Weibull shape) describe the
    dimensionless ``beta * omega``; sampled inverse temperatures are
    ``beta_k = draw / omega``.  A Weibull ``scale`` of None picks the
    scale whose mean equals ``mean``.
    """

    shape: str
    count: int
    seed: int
    omega: float = 1.0
    mean: float = 3.0
    sd: float = 0.3
    scale: float | None = None
    shape_param: float = 2.0

    def __post_init__(self):
        if self.shape not in ("normal", "weibull"):
            raise ValueError(f"shape must be 'normal' or 'weibull', got {self.shape!r}")
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.shape == "normal" and not self.sd > 0:
            raise ValueError(f"sd must be positive, got {self.sd}")
        if self.shape == "weibull":
            if not self.shape_param > 0:
                raise ValueError(f"shape_param must be positive, got {self.shape_param}")
            if self.scale is not None and not self.scale > 0:
                raise ValueError(f"scale must be positive, got {self.scale}")

    @property
    def effective_scale(self) -> float:
        """Weibull scale, defaulting to the value whose mean is ``mean``."""
        if self.scale is not None:
            return self.scale
        return self.mean / math.gamma(1.0 + 1.0 / self.shape_param)


def sample_betas(spec: BetaEnsembleSpec) -> MultiLevelSuperstat:
    """Draw the ensemble deterministically from (spec, seed)."""
    rng = SplitMix64(spec.seed)
    if spec.shape == "normal":
        draw = lambda: rng.normal(spec.mean, spec.sd)
    else:
        scale = spec.effective_scale
        draw = lambda: rng.weibull(scale, spec.shape_param)
    betas = []
    for _ in range(spec.count):
        rejections = 0
        value = draw()
        while value <= 0.0:
            rejections += 1
            if rejections > _MAX_CONSECUTIVE_REJECTIONS:
                raise RejectionOverflowError(
                    f"{rejections} consecutive non-positive draws for spec {spec}"
                )
            value = draw()
        betas.append(value / spec.omega)
    return MultiLevelSuperstat(betas=tuple(betas), omega=spec.omega)


def save_betas(
    path, model: MultiLevelSuperstat, spec: BetaEnsembleSpec | None = None
) -> None:
    """Write an ensemble (and its generating spec, if any) to a text file."""
    header = {
        "omega": model.omega,
        "count": len(model.betas),
        "spec": asdict(spec) if spec is not None else None,
    }
    lines = ["# " + json.dumps(header, sort_keys=True)]
    lines.extend(repr(b) for b in model.betas)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_betas(path) -> tuple[MultiLevelSuperstat, BetaEnsembleSpec | None]:
    """Read an ensemble file back; the value list round-trips bitwise."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw or not raw[0].startswith("# "):
        raise ValueError(f"{path}: missing '# <json>' header line")
    try:
        header = json.loads(raw[0][2:])
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: header line is not valid JSON: {exc}") from exc
    omega = float(header.get("omega", 1.0))
    betas = []
    for lineno, line in enumerate(raw[1:], start=2):
        line = line.strip()
        if not line:
            continue
        try:
            value = float(line)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from exc
        if not value > 0.0:
            raise ValueError(f"{path}:{lineno}: beta must be positive, got {value!r}")
        betas.append(value)
    if len(betas) != int(header.get("count", len(betas))):
        raise ValueError(
            f"{path}: header declares {header.get('count')} values, found {len(betas)}"
        )
    spec = None
    if header.get("spec") is not None:
        spec = BetaEnsembleSpec(**header["spec"])
    return MultiLevelSuperstat(betas=tuple(betas), omega=omega), spec

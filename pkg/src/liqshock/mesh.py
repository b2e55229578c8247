"""Spatial grids (uniform and sinh-stretched) and the time partition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "SpatialGrid",
    "TimeGrid",
    "uniform_grid",
    "tavella_randall_grid",
    "time_grid_from_space",
    "HALF_MIN_SPACING",
]

HALF_MIN_SPACING = "half_min_spacing"

# Relative guard when deciding whether a candidate time step divides the
# horizon: node spacings computed in floating point miss exact division
# by a few ulp, which must not bump the step count.
_SNAP_RTOL = 1e-9


@dataclass(frozen=True)
class SpatialGrid:
    """Strictly increasing price nodes S_0 .. S_I."""

    nodes: np.ndarray
    kind: str = "uniform"
    alpha: float | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValidationError("grid needs at least 3 nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValidationError("grid nodes must be strictly increasing")

    @property
    def intervals(self) -> int:
        return self.nodes.size - 1

    @property
    def s_min(self) -> float:
        return float(self.nodes[0])

    @property
    def s_max(self) -> float:
        return float(self.nodes[-1])

    def spacings(self) -> np.ndarray:
        return np.diff(self.nodes)

    def min_spacing(self) -> float:
        if self.kind == "uniform":
            # exact value, immune to linspace roundoff
            return (self.s_max - self.s_min) / self.intervals
        return float(self.spacings().min())


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of [0, T]: steps J and step size dt with J*dt = T.

    steps=0 is allowed as a degenerate partition (a forward solve then
    returns its initial state); grids built from a spacing rule always
    carry at least one step.
    """

    dt: float
    steps: int

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError("dt must be positive and finite")
        if self.steps < 0:
            raise ValidationError("steps must be >= 0")

    @property
    def horizon(self) -> float:
        return self.dt * self.steps

    def halved(self) -> "TimeGrid":
        """Same horizon with twice the steps (for temporal extrapolation)."""
        return TimeGrid(dt=self.dt / 2.0, steps=2 * self.steps)


def uniform_grid(s_min: float, s_max: float, intervals: int) -> SpatialGrid:
    """Equally spaced grid with the given number of intervals (>= 2)."""
    if intervals < 2:
        raise ValidationError("need at least 2 intervals")
    if not s_min < s_max:
        raise ValidationError("s_min must be < s_max")
    return SpatialGrid(np.linspace(s_min, s_max, intervals + 1), kind="uniform")


def tavella_randall_grid(s_min: float, s_max: float, strike: float,
                         alpha: float, intervals: int) -> SpatialGrid:
    """Sinh-stretched grid concentrating nodes near the strike.

    Nodes follow S_i = K + alpha*sinh(c2*i/I + c1*(1 - i/I)) with
    c1 = asinh((s_min-K)/alpha) and c2 = asinh((s_max-K)/alpha), so the
    endpoints map back to s_min/s_max exactly and the local spacing is
    smallest where the argument of sinh crosses zero, i.e. at the strike.
    Large alpha flattens the stretch toward the uniform grid.
    """
    if intervals < 2:
        raise ValidationError("need at least 2 intervals")
    if alpha <= 0:
        raise ValidationError("alpha must be > 0")
    if not s_min < strike < s_max:
        raise ValidationError("requires s_min < strike < s_max")
    c1 = math.asinh((s_min - strike) / alpha)
    c2 = math.asinh((s_max - strike) / alpha)
    xi = np.arange(intervals + 1) / intervals
    nodes = strike + alpha * np.sinh(c2 * xi + c1 * (1.0 - xi))
    nodes[0] = s_min
    nodes[-1] = s_max
    return SpatialGrid(nodes, kind="tavella_randall", alpha=float(alpha))


def _snap(candidate: float, horizon: float) -> TimeGrid:
    steps = max(1, math.ceil(horizon / candidate * (1.0 - _SNAP_RTOL)))
    return TimeGrid(dt=horizon / steps, steps=steps)


def time_grid_from_space(grid: SpatialGrid, horizon: float,
                         rule: str | float = HALF_MIN_SPACING) -> TimeGrid:
    """Build the time partition coupled to the spatial resolution.

    rule = "half_min_spacing" takes dt = min_i(S_i - S_{i-1}) / 2; a float
    is taken as an explicit candidate dt.  Either way the candidate is
    shrunk so an integer number of steps covers the horizon exactly.
    """
    if horizon <= 0:
        raise ValidationError("horizon must be > 0")
    if rule == HALF_MIN_SPACING:
        candidate = grid.min_spacing() / 2.0
    else:
        candidate = float(rule)
        if candidate <= 0:
            raise ValidationError("explicit dt must be > 0")
        if candidate > horizon:
            raise ValidationError("explicit dt exceeds the horizon")
    return _snap(candidate, horizon)

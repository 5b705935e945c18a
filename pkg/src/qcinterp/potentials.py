"""Potential specifications evaluable on a 1D grid."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import REDUCED, PhysicalConstants
from .errors import GridMismatch, OutOfRange

_SPAN_RTOL = 1e-9


@dataclass(frozen=True)
class Box:
    """Infinite square well on [-L/2, L/2]; the walls are the grid end points."""

    L: float
    kind: str = field(default="box", init=False)

    def __post_init__(self):
        if not self.L > 0:
            raise OutOfRange(f"box length must be > 0, got {self.L!r}")

    def __call__(self, x, consts: PhysicalConstants = REDUCED):
        return np.zeros_like(np.asarray(x, dtype=float))

    def check_grid(self, grid):
        tol = _SPAN_RTOL * self.L
        if abs(grid.x_min + self.L / 2) > tol or abs(grid.x_max - self.L / 2) > tol:
            raise GridMismatch(
                f"box of length {self.L} needs a grid spanning [{-self.L / 2}, {self.L / 2}], "
                f"got [{grid.x_min}, {grid.x_max}]"
            )


@dataclass(frozen=True)
class Harmonic:
    """V = K x^2 / 2, given either the spring constant K or the angular frequency."""

    K: float | None = None
    omega: float | None = None
    kind: str = field(default="harmonic", init=False)

    def __post_init__(self):
        if (self.K is None) == (self.omega is None):
            raise OutOfRange("give exactly one of K or omega")
        value = self.K if self.K is not None else self.omega
        if not value > 0:
            raise OutOfRange(f"harmonic parameter must be > 0, got {value!r}")

    def spring_constant(self, consts: PhysicalConstants = REDUCED) -> float:
        if self.K is not None:
            return float(self.K)
        return consts.mass * self.omega**2

    def frequency(self, consts: PhysicalConstants = REDUCED) -> float:
        return float(np.sqrt(self.spring_constant(consts) / consts.mass))

    def __call__(self, x, consts: PhysicalConstants = REDUCED):
        x = np.asarray(x, dtype=float)
        return 0.5 * self.spring_constant(consts) * x**2

    def check_grid(self, grid):
        pass


@dataclass(frozen=True)
class DoubleWell:
    """Symmetric quartic double well V0 (x^2 - a^2)^2 with minima at +-a."""

    V0: float
    a: float
    kind: str = field(default="doublewell", init=False)

    def __post_init__(self):
        if not (self.V0 > 0 and self.a > 0):
            raise OutOfRange("double well needs V0 > 0 and a > 0")

    @property
    def K(self) -> float:
        """Curvature at either minimum, 8 V0 a^2."""
        return 8.0 * self.V0 * self.a**2

    @property
    def barrier(self) -> float:
        return self.V0 * self.a**4

    def __call__(self, x, consts: PhysicalConstants = REDUCED):
        x = np.asarray(x, dtype=float)
        return self.V0 * (x**2 - self.a**2) ** 2

    def check_grid(self, grid):
        pass


@dataclass(frozen=True)
class Free:
    kind: str = field(default="free", init=False)

    def __call__(self, x, consts: PhysicalConstants = REDUCED):
        return np.zeros_like(np.asarray(x, dtype=float))

    def check_grid(self, grid):
        pass


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Potential sampled at ascending abscissae, linearly interpolated."""

    x: np.ndarray
    values: np.ndarray
    kind: str = field(default="tabulated", init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise OutOfRange("tabulated potential needs two equal-length 1D arrays (>= 2 samples)")
        if np.any(np.diff(x) <= 0):
            raise OutOfRange("tabulated abscissae must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise OutOfRange("tabulated potential values must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    def __call__(self, x, consts: PhysicalConstants = REDUCED):
        return np.interp(np.asarray(x, dtype=float), self.x, self.values)

    def check_grid(self, grid):
        if grid.x_min < self.x[0] or grid.x_max > self.x[-1]:
            raise GridMismatch("grid extends beyond the tabulated potential")


PotentialSpec = Union[Box, Harmonic, DoubleWell, Free, Tabulated]


def potential_from_dict(d: dict) -> PotentialSpec:
    """Build a potential from a ``{"kind": ..., **params}`` mapping."""
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "box":
        return Box(**d)
    if kind == "harmonic":
        return Harmonic(**d)
    if kind == "doublewell":
        return DoubleWell(**d)
    if kind == "free":
        return Free(**d)
    if kind == "tabulated":
        return Tabulated(x=d["x"], values=d["values"])
    raise OutOfRange(f"unknown potential kind {kind!r}")

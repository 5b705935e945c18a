"""Closed-form particle in a box with the kinetic term scaled by (1 - lambda)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import REDUCED, PhysicalConstants, as_lambda
from .errors import BadQuantumNumber, GridMismatch, OutOfRange
from .grid import Grid, WaveFunction
from .potentials import Box


@dataclass(frozen=True)
class BoxSpec:
    L: float
    n_max: int = 5

    def __post_init__(self):
        if not self.L > 0:
            raise OutOfRange("L must be > 0")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise OutOfRange("n_max must be a positive integer")

    def potential(self) -> Box:
        return Box(self.L)

    def grid(self, n_points: int = 2001) -> Grid:
        return Grid(-self.L / 2, self.L / 2, n_points)

    def wavenumber(self, n: int) -> float:
        return n * math.pi / self.L


def _check_n(n, box):
    if int(n) != n or not 1 <= n <= box.n_max:
        raise BadQuantumNumber(f"n must be an integer in [1, {box.n_max}], got {n!r}")


def box_energy(n: int, box: BoxSpec, lam=0.0, consts: PhysicalConstants = REDUCED) -> float:
    """(1 - lambda) n^2 pi^2 hbar^2 / (2 m L^2): the renormalized mass m / (1 - lambda)."""
    _check_n(n, box)
    lam = as_lambda(lam)
    return (1.0 - lam) * (n * math.pi * consts.hbar) ** 2 / (2.0 * consts.mass * box.L**2)


def box_wavefunction(n: int, box: BoxSpec, grid: Grid) -> WaveFunction:
    """sqrt(2/L) sin(k_n (x + L/2)) sampled on ``grid`` and renormalized there.

    Independent of lambda: only the energies feel the renormalized mass.
    """
    _check_n(n, box)
    tol = 1e-9 * box.L
    if abs(grid.x_min + box.L / 2) > tol or abs(grid.x_max - box.L / 2) > tol:
        raise GridMismatch(f"grid must span [-L/2, L/2] = [{-box.L / 2}, {box.L / 2}]")
    amp = math.sqrt(2.0 / box.L) * np.sin(box.wavenumber(n) * (grid.x + box.L / 2))
    amp[0] = amp[-1] = 0.0
    return WaveFunction(grid, amp).normalized()

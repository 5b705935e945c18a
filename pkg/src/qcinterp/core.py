"""Physical constants, the interpolation parameter and its periodic drive.

Everything downstream works in reduced units where hbar = m = k_B = 1 unless a
:class:`PhysicalConstants` instance says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "k_B"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise OutOfRange(f"{name} must be finite and > 0, got {value!r}")


REDUCED = PhysicalConstants()


@dataclass(frozen=True)
class InterpolationParam:
    """The quantum/classical blending weight, 0 (quantum) <= value <= 1 (classical)."""

    value: float

    def __post_init__(self):
        v = self.value
        if not isinstance(v, (int, float, np.floating, np.integer)) or isinstance(v, bool):
            raise OutOfRange(f"lambda must be a real scalar, got {v!r}")
        if not (0.0 <= v <= 1.0):
            raise OutOfRange(f"lambda must lie in [0, 1], got {v!r}")
        object.__setattr__(self, "value", float(v))

    def __float__(self):
        return self.value

    @property
    def kinetic_fraction(self) -> float:
        """Share of the quantum kinetic energy kept, ``1 - lambda``."""
        return 1.0 - self.value

    @property
    def is_classical(self) -> bool:
        return self.value == 1.0

    @property
    def is_quantum(self) -> bool:
        return self.value == 0.0


def make_lambda(x) -> InterpolationParam:
    if isinstance(x, InterpolationParam):
        return x
    return InterpolationParam(x)


def as_lambda(x) -> float:
    """Validate ``x`` (float or InterpolationParam) and return it as a float."""
    return make_lambda(x).value


@dataclass(frozen=True)
class DriveSpec:
    omega_drive: float
    t_start: float
    t_end: float
    n_samples: int

    def __post_init__(self):
        if not self.omega_drive > 0:
            raise OutOfRange(f"omega_drive must be > 0, got {self.omega_drive!r}")
        if not self.t_end > self.t_start:
            raise OutOfRange("t_end must exceed t_start")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise OutOfRange(f"n_samples must be an integer >= 2, got {self.n_samples!r}")

    @property
    def period(self) -> float:
        """Period of |sin(Omega t)|, i.e. pi / Omega."""
        return math.pi / self.omega_drive

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, int(self.n_samples))


def _drive_values(omega_drive, t):
    # min() guards against 1 + ulp from libm on some platforms
    return np.minimum(np.abs(np.sin(omega_drive * np.asarray(t, dtype=float))), 1.0)


def lambda_drive(drive: DriveSpec, t: float) -> InterpolationParam:
    """lambda(t) = |sin(Omega t)|.

    Note that |sin| reaches 1/2 at t = pi/(6 Omega), not at a quarter period.
    """
    if not (drive.t_start <= t <= drive.t_end):
        raise OutOfRange(f"t={t!r} outside drive window [{drive.t_start}, {drive.t_end}]")
    return InterpolationParam(float(_drive_values(drive.omega_drive, t)))


def lambda_drive_series(drive: DriveSpec) -> tuple[np.ndarray, np.ndarray]:
    """Sample the drive on its own time grid; returns ``(times, lambdas)``."""
    t = drive.times()
    return t, _drive_values(drive.omega_drive, t)

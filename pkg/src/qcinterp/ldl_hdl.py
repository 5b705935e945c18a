"""Oscillator ensemble driven through lambda(t) = |sin(Omega t)|.

Samples with lambda near 0 are labelled LDL-like (quantum ensemble), samples
with lambda near 1 HDL-like (classical ensemble). Thermodynamic values are
evaluated quasi-statically: each sample uses the equilibrium formulas at its
instantaneous lambda, with u held fixed along the drive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DriveSpec, lambda_drive_series
from .errors import OutOfRange
from .thermo import entropy_u, free_energy_u, mean_energy_u

LDL_BELOW = 0.1
HDL_ABOVE = 0.9

LDL, HDL, MIXED = "LDL-like", "HDL-like", "mixed"


def state_label(lam: float) -> str:
    if lam < LDL_BELOW:
        return LDL
    if lam > HDL_ABOVE:
        return HDL
    return MIXED


@dataclass(frozen=True, eq=False)
class OscillationSeries:
    times: np.ndarray
    lambdas: np.ndarray
    F_over_kT: np.ndarray
    S_over_k: np.ndarray
    mean_energy: np.ndarray
    zpe_share: np.ndarray
    thermal_share: np.ndarray
    state_label: tuple
    u: float
    variant: str

    def equal_share(self, tol: float = 1e-9) -> np.ndarray:
        """Samples where the weighted ZPE term (1 - lambda) u/2 equals the classical lambda term."""
        return np.abs(self.zpe_share - self.thermal_share) <= tol


def oscillation_series(drive: DriveSpec, u: float, variant: str = "full") -> OscillationSeries:
    """Evaluate F/kT, S/k and <E>/kT along the drive's time grid."""
    if not u > 0:
        raise OutOfRange("u must be > 0")
    t, lam = lambda_drive_series(drive)
    u_arr = np.full_like(lam, float(u))
    return OscillationSeries(
        times=t,
        lambdas=lam,
        F_over_kT=free_energy_u(u_arr, lam, variant),
        S_over_k=entropy_u(u_arr, lam, variant),
        mean_energy=mean_energy_u(u_arr, lam, variant),
        zpe_share=(1.0 - lam) * 0.5 * u,
        thermal_share=lam.copy(),
        state_label=tuple(state_label(x) for x in lam),
        u=float(u),
        variant=variant,
    )


@dataclass(frozen=True)
class EqualityReport:
    u: float
    zpe_over_kT: float
    thermal_over_kT: float
    ratio: float
    regime: str
    equal: bool


def equality_report(u: float, tol: float = 1e-2) -> EqualityReport:
    """Compare hbar omega / 2 with kT, both in units of kT.

    ``regime`` is ``"balanced"`` when |u/2 - 1| < tol, otherwise
    ``"thermal-dominated"`` (u/2 < 1) or ``"quantum-dominated"``.
    """
    if not u > 0:
        raise OutOfRange("u must be > 0")
    half = 0.5 * u
    equal = abs(half - 1.0) < tol
    if equal:
        regime = "balanced"
    elif half < 1.0:
        regime = "thermal-dominated"
    else:
        regime = "quantum-dominated"
    return EqualityReport(float(u), half, 1.0, half, regime, equal)

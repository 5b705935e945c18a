"""Interpolated quantum/classical thermodynamics of a harmonic oscillator.

ln Z is the convex combination (1 - lambda) ln Z_qm + lambda ln Z_cl with
Z_cl = 1/u and u = hbar omega / kT. Two quantum parts are supported:

* ``"zpe_only"``: Z_qm = exp(-u/2), zero-point energy alone;
* ``"full"``: Z_qm = exp(-u/2) / (1 - exp(-u)), the whole ladder.

All results are dimensionless (F/kT, S/k, C_V/k). Lambda is treated as
temperature independent in every derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import REDUCED, PhysicalConstants, as_lambda
from .errors import NoRootInBracket, OutOfRange

VARIANTS = ("zpe_only", "full")

ENTROPY_BRACKET = (1.0, 1e3)
ENTROPY_TOL = 1e-10


def _check_variant(variant):
    if variant not in VARIANTS:
        raise OutOfRange(f"variant must be one of {VARIANTS}, got {variant!r}")


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if not np.all(u > 0) or not np.all(np.isfinite(u)):
        raise OutOfRange("u = hbar omega / kT must be finite and > 0")
    return u


@dataclass(frozen=True)
class ThermoPoint:
    """A state point (lambda, u) with optional physical omega and T.

    Build from any two of ``u``, ``omega``, ``T`` via :meth:`build`.
    """

    lam: float
    u: float
    omega: float | None = None
    T: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "lam", as_lambda(self.lam))
        _check_u(self.u)

    @classmethod
    def build(cls, lam, u=None, omega=None, T=None, consts: PhysicalConstants = REDUCED):
        given = sum(v is not None for v in (u, omega, T))
        if u is not None and given == 1:
            return cls(lam, float(u))
        if given != 2:
            raise OutOfRange("give u alone, or exactly two of u, omega, T")
        if u is None:
            if not (omega > 0 and T > 0):
                raise OutOfRange("omega and T must be > 0")
            u = consts.hbar * omega / (consts.k_B * T)
        elif omega is None:
            omega = u * consts.k_B * T / consts.hbar
        else:
            T = consts.hbar * omega / (consts.k_B * u)
        return cls(lam, float(u), float(omega), float(T))

    def kT(self, consts: PhysicalConstants = REDUCED) -> float:
        """Thermal energy; in reduced units (no T, no omega) this is 1."""
        if self.T is not None:
            return consts.k_B * self.T
        if self.omega is not None:
            return consts.hbar * self.omega / self.u
        return 1.0


# --- vectorized kernels on (u, lambda) --------------------------------------

def _log1m_exp(u):
    """ln(1 - e^-u) without cancellation."""
    return np.log(-np.expm1(-u))


def _bose(u):
    """1/(e^u - 1) written in e^-u so large u underflows to 0 instead of overflowing."""
    return np.exp(-u) / -np.expm1(-u)


def free_energy_u(u, lam, variant="full"):
    """F/kT as an array function of u."""
    _check_variant(variant)
    u = _check_u(u)
    quantum = 0.5 * u if variant == "zpe_only" else 0.5 * u + _log1m_exp(u)
    return (1.0 - lam) * quantum + lam * np.log(u)


def entropy_u(u, lam, variant="full"):
    """S/k = u d(F/kT)/du - F/kT."""
    _check_variant(variant)
    u = _check_u(u)
    quantum = 0.0 if variant == "zpe_only" else u * _bose(u) - _log1m_exp(u)
    return (1.0 - lam) * quantum + lam * (1.0 - np.log(u))


def heat_capacity_u(u, lam, variant="full"):
    """C_V/k; the Einstein function (u/2 / sinh(u/2))^2 for the quantum part."""
    _check_variant(variant)
    u = _check_u(u)
    if variant == "zpe_only":
        quantum = np.zeros_like(u)
    else:
        half = 0.5 * u
        # u^2 e^u / (e^u - 1)^2 written so that large u neither overflows nor divides 0/0
        quantum = np.where(half < 300.0, (half / np.sinh(np.minimum(half, 300.0))) ** 2, 0.0)
    return (1.0 - lam) * quantum + lam


def mean_energy_u(u, lam, variant="full"):
    """<E>/kT = (1 - lambda) <e_qm>/kT + lambda."""
    _check_variant(variant)
    u = _check_u(u)
    quantum = 0.5 * u if variant == "zpe_only" else u * (_bose(u) + 0.5)
    return (1.0 - lam) * quantum + lam


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


# --- public point-wise API ----------------------------------------------------

def bose_occupation(point: ThermoPoint) -> float:
    """<n> = 1 / (e^u - 1)."""
    return _scalar(_bose(_check_u(point.u)))


def mean_energy_qm(point: ThermoPoint, consts: PhysicalConstants = REDUCED) -> float:
    """hbar omega (<n> + 1/2), in the energy unit fixed by the point (kT = 1 if unspecified)."""
    u = _check_u(point.u)
    return _scalar(point.kT(consts) * u * (_bose(u) + 0.5))


def mean_energy_cl(T: float, consts: PhysicalConstants = REDUCED) -> float:
    """Equipartition k_B T, independent of omega."""
    if not T > 0:
        raise OutOfRange("T must be > 0")
    return consts.k_B * T


def free_energy(point: ThermoPoint, variant: str = "full") -> float:
    return _scalar(free_energy_u(point.u, point.lam, variant))


def entropy(point: ThermoPoint, variant: str = "full") -> float:
    return _scalar(entropy_u(point.u, point.lam, variant))


def heat_capacity(point: ThermoPoint, variant: str = "full") -> float:
    return _scalar(heat_capacity_u(point.u, point.lam, variant))


def gibbs_energy(point: ThermoPoint, variant: str = "full") -> float:
    """G/kT with the volume-derivative term dropped (incompressible solution), i.e. F/kT."""
    return free_energy(point, variant)


def entropy_zero(lam, variant: str = "full", bracket=ENTROPY_BRACKET, tol: float = ENTROPY_TOL) -> float:
    """Root u* of S/k(u) = 0 by plain bisection on ``bracket``.

    Raises NoRootInBracket when S/k does not change sign, which is what happens
    for lambda = 0: the quantum entropy only decays towards zero.
    """
    lam = as_lambda(lam)
    lo, hi = bracket

    def f(u):
        return float(entropy_u(u, lam, variant))

    f_lo, f_hi = f(lo), f(hi)
    # a strict sign change is required: at lambda = 0 S/k underflows to exactly 0
    # near u = 1000 without ever crossing
    if not f_lo * f_hi < 0:
        raise NoRootInBracket(f"S/k has no sign change on {bracket} for lambda={lam}")
    while True:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) < tol or mid in (lo, hi):
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid


@dataclass(frozen=True, eq=False)
class ThermoCurve:
    lam: float
    u_values: np.ndarray
    F_over_kT: np.ndarray
    S_over_k: np.ndarray
    Cv_over_k: np.ndarray
    variant: str = "full"


def thermo_curve(lam, u_grid, variant: str = "full") -> ThermoCurve:
    lam = as_lambda(lam)
    u = _check_u(np.atleast_1d(np.asarray(u_grid, dtype=float)))
    if u.ndim != 1 or np.any(np.diff(u) <= 0):
        raise OutOfRange("u_grid must be a strictly increasing 1D array")
    return ThermoCurve(lam, u, free_energy_u(u, lam, variant), entropy_u(u, lam, variant),
                       heat_capacity_u(u, lam, variant), variant)


# --- entropy-enthalpy compensation ---------------------------------------------

@dataclass(frozen=True)
class CompensationRecord:
    delta_H: float
    delta_S: float
    T_c: float
    zpe: float
    residual: float


def zero_point_energy(omega: float, consts: PhysicalConstants = REDUCED) -> float:
    if not omega >= 0:
        raise OutOfRange("omega must be >= 0")
    return 0.5 * consts.hbar * omega


def molar_zpe_from_wavenumber(wavenumber_cm: float) -> float:
    """Half the quantum energy of an IR band given in cm^-1, in J/mol."""
    from scipy.constants import Avogadro, c, h

    if not wavenumber_cm > 0:
        raise OutOfRange("wavenumber must be > 0")
    return 0.5 * h * c * (wavenumber_cm * 100.0) * Avogadro


def compensation_enthalpy(T_c: float, delta_S: float, omega: float,
                          consts: PhysicalConstants = REDUCED) -> CompensationRecord:
    """Delta H = T_c Delta S + hbar omega / 2; the residual is zero by construction."""
    if not T_c > 0:
        raise OutOfRange("T_c must be > 0")
    zpe = zero_point_energy(omega, consts)
    return CompensationRecord(T_c * delta_S + zpe, float(delta_S), float(T_c), zpe, 0.0)


def compensation_residual(delta_H: float, delta_S: float, T_c: float, zpe: float) -> CompensationRecord:
    """Record for a measured (Delta H, Delta S) pair against a given zero-point energy."""
    if not T_c > 0:
        raise OutOfRange("T_c must be > 0")
    r = delta_H - T_c * delta_S - zpe
    if not math.isfinite(r):
        raise OutOfRange("non-finite compensation residual")
    return CompensationRecord(float(delta_H), float(delta_S), float(T_c), float(zpe), r)

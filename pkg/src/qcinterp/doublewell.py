"""Two-level reduction of the symmetric quartic double well.

Around each minimum +-a the well is replaced by the harmonic potential
4 V0 a^2 (x -+ a)^2 with the renormalized mass m / (1 - lambda). The Gaussian
ground states of those two oscillators span a 2x2 model whose off-diagonal
element, scaled by (1 - lambda), carries the tunneling.

Sign convention: the tunneling coefficient is returned exactly as defined by
``Delta/2 = -(hbar^2/2m) * integral(psi_- d^2 psi_+ / dx^2)``, which is
*negative* for well separated Gaussians (4 alpha a^2 > 1). With that sign the
symmetric combination is the lower level. Gaps are reported as magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .core import REDUCED, PhysicalConstants, as_lambda
from .errors import ClassicalSingularity, GridMismatch, OutOfRange
from .grid import Grid, WaveFunction, build_hamiltonian, solve_eigenstates
from .potentials import DoubleWell

DoubleWellSpec = DoubleWell

#: above this lambda the Gaussian width collapses and alpha is treated as infinite
CLASSICAL_CUTOFF = 1.0 - 1e-6

_SYMMETRIC = np.array([1.0, 1.0]) / math.sqrt(2.0)
_ANTISYMMETRIC = np.array([1.0, -1.0]) / math.sqrt(2.0)


@dataclass(frozen=True)
class HarmonicApprox:
    K: float
    omega_lambda: float
    alpha_lambda: float
    m_lambda: float
    lam: float

    @property
    def sigma(self) -> float:
        """Standard deviation of the Gaussian density |psi_+|^2."""
        return 1.0 / (2.0 * math.sqrt(self.alpha_lambda))


def harmonic_params(well: DoubleWell, lam, consts: PhysicalConstants = REDUCED) -> HarmonicApprox:
    lam = as_lambda(lam)
    if lam > CLASSICAL_CUTOFF:
        raise ClassicalSingularity(
            f"lambda={lam} too close to 1: the Gaussian width vanishes (alpha -> infinity)"
        )
    K = well.K
    m_lam = consts.mass / (1.0 - lam)
    omega = math.sqrt(K / m_lam)
    alpha = m_lam * omega / (2.0 * consts.hbar)
    return HarmonicApprox(K=K, omega_lambda=omega, alpha_lambda=alpha, m_lambda=m_lam, lam=lam)


def _gaussian(alpha, center, x):
    return (2.0 * alpha / math.pi) ** 0.25 * np.exp(-alpha * (x - center) ** 2)


def _gaussian_dd(alpha, center, x):
    s = x - center
    return (4.0 * alpha**2 * s**2 - 2.0 * alpha) * _gaussian(alpha, center, x)


def _check_coverage(grid: Grid, approx: HarmonicApprox, centers):
    sig = approx.sigma
    lo = min(centers) - 6 * sig
    hi = max(centers) + 6 * sig
    if grid.x_min > lo or grid.x_max < hi:
        raise GridMismatch(
            f"grid [{grid.x_min}, {grid.x_max}] does not cover [{lo:.4g}, {hi:.4g}] (6 widths)"
        )
    if grid.dx > 0.5 * sig:
        raise GridMismatch(f"grid spacing {grid.dx:.3g} does not resolve Gaussian width {sig:.3g}")


def gaussian_state(approx: HarmonicApprox, center: float, grid: Grid) -> WaveFunction:
    """(2 alpha / pi)^(1/4) exp(-alpha (x - center)^2), renormalized on the grid."""
    _check_coverage(grid, approx, [center])
    return WaveFunction(grid, _gaussian(approx.alpha_lambda, center, grid.x)).normalized()


def overlap(approx: HarmonicApprox, well: DoubleWell) -> float:
    """Integral of psi_+ psi_-, exp(-2 alpha a^2)."""
    return math.exp(-2.0 * approx.alpha_lambda * well.a**2)


def overlap_quadrature(approx: HarmonicApprox, well: DoubleWell, grid: Grid) -> float:
    _check_coverage(grid, approx, [-well.a, well.a])
    x = grid.x
    integrand = _gaussian(approx.alpha_lambda, well.a, x) * _gaussian(approx.alpha_lambda, -well.a, x)
    return float(np.trapezoid(integrand, dx=grid.dx))


def tunneling_coefficient(approx: HarmonicApprox, well: DoubleWell, grid: Grid,
                          consts: PhysicalConstants = REDUCED, differentiate: str = "+") -> float:
    """Delta = -(hbar^2/m) * integral(psi_- psi_+'') over the whole grid (trapezoid).

    The second derivative is taken analytically. ``differentiate="-"`` swaps
    the roles, integral(psi_+ psi_-''); both agree by symmetry of the kinetic
    operator, which makes a useful self-check.
    """
    _check_coverage(grid, approx, [-well.a, well.a])
    a, alpha, x = well.a, approx.alpha_lambda, grid.x
    if differentiate == "+":
        integrand = _gaussian(alpha, -a, x) * _gaussian_dd(alpha, a, x)
    elif differentiate == "-":
        integrand = _gaussian(alpha, a, x) * _gaussian_dd(alpha, -a, x)
    else:
        raise OutOfRange("differentiate must be '+' or '-'")
    return float(-(consts.hbar**2 / consts.mass) * np.trapezoid(integrand, dx=grid.dx))


def tunneling_coefficient_exact(approx: HarmonicApprox, well: DoubleWell,
                                consts: PhysicalConstants = REDUCED) -> float:
    """Closed form of the same integral: -(hbar^2/m) alpha (4 alpha a^2 - 1) exp(-2 alpha a^2)."""
    alpha, a = approx.alpha_lambda, well.a
    return -(consts.hbar**2 / consts.mass) * alpha * (4 * alpha * a**2 - 1) * math.exp(-2 * alpha * a**2)


def two_level_gap(well: DoubleWell, lam, consts: PhysicalConstants = REDUCED) -> float:
    """(1 - lambda) |Delta|, with the classical branch (lambda -> 1) returning 0."""
    lam = as_lambda(lam)
    if lam > CLASSICAL_CUTOFF:
        return 0.0
    approx = harmonic_params(well, lam, consts)
    return (1.0 - lam) * abs(tunneling_coefficient_exact(approx, well, consts))


@dataclass(frozen=True)
class TwoLevelSystem:
    eps: float
    delta: float
    enthalpy_offset: float = 0.0
    lam: float = 0.0

    @property
    def diagonal(self) -> float:
        return self.enthalpy_offset + self.eps

    @property
    def coupling(self) -> float:
        return (1.0 - self.lam) * self.delta / 2.0

    @property
    def matrix(self) -> np.ndarray:
        d, c = self.diagonal, self.coupling
        return np.array([[d, c], [c, d]])


def two_level_hamiltonian(eps: float, delta: float, enthalpy_offset: float = 0.0,
                          lam=0.0) -> TwoLevelSystem:
    return TwoLevelSystem(float(eps), float(delta), float(enthalpy_offset), as_lambda(lam))


def two_level_from_well(well: DoubleWell, lam, grid: Grid | None = None,
                        consts: PhysicalConstants = REDUCED,
                        enthalpy_offset: float = 0.0) -> TwoLevelSystem:
    """Assemble the 2x2 model for a well: eps = hbar omega_lambda / 2 and Delta from the overlap integral.

    Delta comes from grid quadrature when a grid is given, else from the closed form.
    """
    approx = harmonic_params(well, lam, consts)
    if grid is None:
        delta = tunneling_coefficient_exact(approx, well, consts)
    else:
        delta = tunneling_coefficient(approx, well, grid, consts)
    eps = 0.5 * consts.hbar * approx.omega_lambda
    return two_level_hamiltonian(eps, delta, enthalpy_offset, lam)


class Splitting(NamedTuple):
    E_plus: float
    E_minus: float
    symmetric: np.ndarray
    antisymmetric: np.ndarray

    @property
    def gap(self) -> float:
        return abs(self.E_minus - self.E_plus)


def splitting(sys: TwoLevelSystem) -> Splitting:
    """Energies of the symmetric (E_plus) and antisymmetric (E_minus) combinations.

    For a matrix with equal diagonal entries these are always the eigenvectors;
    E_plus = diag + coupling and E_minus = diag - coupling.
    """
    return Splitting(sys.diagonal + sys.coupling, sys.diagonal - sys.coupling,
                     _SYMMETRIC.copy(), _ANTISYMMETRIC.copy())


def oscillation_frequency(sys: TwoLevelSystem, consts: PhysicalConstants = REDUCED) -> float:
    """Angular frequency (1 - lambda) Delta / hbar of the left/right population difference."""
    return (1.0 - sys.lam) * sys.delta / consts.hbar


def oscillation_period(sys: TwoLevelSystem, consts: PhysicalConstants = REDUCED) -> float:
    w = abs(oscillation_frequency(sys, consts))
    return math.inf if w == 0 else 2.0 * math.pi / w


def well_probability(t, sys: TwoLevelSystem, consts: PhysicalConstants = REDUCED):
    """P(left) - P(right) = cos((1 - lambda) Delta t / hbar) for a start in the left well."""
    out = np.cos(oscillation_frequency(sys, consts) * np.asarray(t, dtype=float))
    return float(out) if out.ndim == 0 else out


def propagate_two_level(sys: TwoLevelSystem, t, consts: PhysicalConstants = REDUCED):
    """Population difference from explicit exp(-iHt/hbar) applied to |+a>.

    Computed by diagonalizing the 2x2 matrix, independent of :func:`well_probability`.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    evals, evecs = np.linalg.eigh(sys.matrix)
    start = np.array([1.0, 0.0], dtype=complex)
    coeffs = evecs.conj().T @ start
    phases = np.exp(-1j * np.outer(t, evals) / consts.hbar)
    states = (phases * coeffs) @ evecs.T
    return np.abs(states[:, 0]) ** 2 - np.abs(states[:, 1]) ** 2


@dataclass(frozen=True, eq=False)
class TwoLevelDensityMatrix:
    p: float
    matrix: np.ndarray


def density_matrix(p: float) -> TwoLevelDensityMatrix:
    """(p/2) I + ((1-p)/2)(|+a> + |-a>)(<+a| + <-a|): mixed at p = 1, pure at p = 0."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"mixing weight p must lie in [0, 1], got {p!r}")
    ones = np.ones((2, 2))
    m = 0.5 * p * np.eye(2) + 0.5 * (1.0 - p) * ones
    m.flags.writeable = False
    return TwoLevelDensityMatrix(float(p), m)


def mixing_weight(lam, p_map: Callable[[float], float] | None = None) -> float:
    """p(lambda); the identity map by default. Any map must fix p(0)=0 and p(1)=1."""
    lam = as_lambda(lam)
    if p_map is None:
        return lam
    p = float(p_map(lam))
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p_map returned {p} outside [0, 1]")
    return p


def commutator_max(sys: TwoLevelSystem, rho: TwoLevelDensityMatrix) -> float:
    H = sys.matrix
    return float(np.max(np.abs(H @ rho.matrix - rho.matrix @ H)))


class GridSplitting(NamedTuple):
    E0: float
    E1: float
    gap: float
    ground: WaveFunction
    excited: WaveFunction


def grid_splitting_oracle(well: DoubleWell, lam, grid: Grid,
                          consts: PhysicalConstants = REDUCED) -> GridSplitting:
    """Two lowest levels of the full finite-difference (1 - lambda) H0 + V0 (x^2 - a^2)^2."""
    lam = as_lambda(lam)
    if lam >= 1.0:
        raise ClassicalSingularity("grid doublet needs lambda < 1")
    (e0, g0), (e1, g1) = solve_eigenstates(build_hamiltonian(grid, well, lam, consts), 2)
    return GridSplitting(e0, e1, e1 - e0, g0, g1)


def doublet_gap_flux(well: DoubleWell, lam, grid: Grid,
                     consts: PhysicalConstants = REDUCED) -> float:
    """Grid doublet E1 - E0 evaluated without subtracting two nearly equal energies.

    For a symmetric tridiagonal operator with off-diagonal -t the even and odd
    eigenvectors e, o obey E_o - E_e = t o_1 e_0 / sum_{j>=1} e_j o_j (centre
    node j = 0). Each parity is solved on the half grid; the tiny barrier
    values e_0, o_1 come from recursing outward from the centre (the growing,
    stable direction) and splicing onto the eigenvector at the well minimum.
    This stays accurate in deep wells where E1 - E0 drops below the rounding
    level of the full eigensolve.

    Needs a grid symmetric about 0 with a node at x = 0.
    """
    lam = as_lambda(lam)
    if lam >= 1.0:
        raise ClassicalSingularity("grid doublet needs lambda < 1")
    H = build_hamiltonian(grid, well, lam, consts)
    d, off = H.diagonal, H.off_diagonal
    c = d.size // 2
    if d.size % 2 == 0 or abs(grid.x_min + grid.x_max) > 1e-12 * grid.dx or abs(grid.interior[c]) > 1e-9 * grid.dx:
        raise GridMismatch("grid must be symmetric about 0 with a node at x = 0")
    t = -off[0]
    k = int(np.argmin(np.abs(grid.interior[c:] - well.a)))
    if not 1 < k < d.size - c - 1:
        raise GridMismatch("grid does not contain the well minimum")

    # even half problem in the basis (e_0 / sqrt 2, e_1, ...) keeps it symmetric
    off_e = off[c:].copy()
    off_e[0] *= math.sqrt(2.0)
    (E_e,), ve = eigh_tridiagonal(d[c:], off_e, select="i", select_range=(0, 0))
    (E_o,), vo = eigh_tridiagonal(d[c + 1:], off[c + 1:], select="i", select_range=(0, 0))
    ve = ve[:, 0].copy()
    ve[0] /= math.sqrt(2.0)
    vo = vo[:, 0]
    # full-grid unit norm
    ve /= math.sqrt(ve[0] ** 2 + 2.0 * np.sum(ve[1:] ** 2))
    vo /= math.sqrt(2.0 * np.sum(vo**2))

    def outward(E, p0, p1):
        p = np.empty(k + 1)
        p[0], p[1] = p0, p1
        for j in range(1, k):
            p[j + 1] = ((d[c + j] - E) * p[j] - t * p[j - 1]) / t
        return p

    re = outward(E_e, 1.0, (d[c] - E_e) / (2.0 * t))
    ro = outward(E_o, 0.0, 1.0)
    e0 = ve[k] / re[k]
    o1 = vo[k - 1] / ro[k]
    return float(t * o1 * e0 / np.dot(ve[1:], vo))


def parity(psi: WaveFunction) -> int:
    """+1 for even, -1 for odd, 0 if neither (grid assumed symmetric about 0)."""
    amp = np.real(psi.amplitudes)
    scale = np.max(np.abs(amp))
    if np.max(np.abs(amp - amp[::-1])) < 1e-6 * scale:
        return 1
    if np.max(np.abs(amp + amp[::-1])) < 1e-6 * scale:
        return -1
    return 0


def barrier_density(psi: WaveFunction) -> float:
    """Density at x = 0 relative to the peak density."""
    rho = psi.density
    return float(np.interp(0.0, psi.x, rho) / rho.max())

"""Finite-difference machinery on a uniform 1D grid with Dirichlet walls.

The end points of a :class:`Grid` are the walls: wave functions vanish there,
and every discrete operator acts on the ``n_points - 2`` interior nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .core import REDUCED, PhysicalConstants, as_lambda
from .errors import ConvergenceFailure, OutOfRange

#: relative density floor used whenever we divide by rho or sqrt(rho)
DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise OutOfRange("x_max must exceed x_min")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise OutOfRange(f"n_points must be an integer >= 16, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def symmetric(cls, half_width: float, n_points: int) -> "Grid":
        return cls(-half_width, half_width, n_points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @cached_property
    def x(self) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, self.n_points)
        x.flags.writeable = False
        return x

    @property
    def interior(self) -> np.ndarray:
        return self.x[1:-1]

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x >= self.x_min) & (x <= self.x_max)))


@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: Grid
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.shape != (self.grid.n_points,):
            raise OutOfRange(
                f"expected {self.grid.n_points} amplitudes, got shape {amp.shape}"
            )
        if not np.all(np.isfinite(amp)):
            raise OutOfRange("wave function amplitudes must be finite")
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        """Trapezoidal L2 norm."""
        return float(np.sqrt(np.trapezoid(self.density, dx=self.grid.dx)))

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0:
            raise OutOfRange("cannot normalize the zero wave function")
        return WaveFunction(self.grid, self.amplitudes / n)

    def inner(self, other: "WaveFunction") -> complex:
        """<self|other> with the trapezoidal rule."""
        return complex(np.trapezoid(np.conj(self.amplitudes) * other.amplitudes, dx=self.grid.dx))

    def phase(self, consts: PhysicalConstants = REDUCED) -> np.ndarray:
        """Action S(x) = hbar * arg(psi), unwrapped along x."""
        return consts.hbar * np.unwrap(np.angle(self.amplitudes))

    def mean_x(self) -> float:
        rho = self.density
        return float(np.trapezoid(self.x * rho, dx=self.grid.dx) / np.trapezoid(rho, dx=self.grid.dx))

    def width(self) -> float:
        """Standard deviation of the position density."""
        rho = self.density
        total = np.trapezoid(rho, dx=self.grid.dx)
        mu = np.trapezoid(self.x * rho, dx=self.grid.dx) / total
        var = np.trapezoid((self.x - mu) ** 2 * rho, dx=self.grid.dx) / total
        return float(np.sqrt(var))


def gaussian_packet(grid: Grid, x0: float, sigma: float, p: float = 0.0,
                    consts: PhysicalConstants = REDUCED) -> WaveFunction:
    """Normalized Gaussian with density std ``sigma`` and phase ``p x / hbar``.

    The walls are zeroed so the state is admissible under Dirichlet boundaries.
    """
    if not sigma > 0:
        raise OutOfRange("sigma must be > 0")
    x = grid.x
    amp = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * p * x / consts.hbar)
    amp[0] = amp[-1] = 0.0
    return WaveFunction(grid, amp).normalized()


@dataclass(frozen=True, eq=False)
class DiscreteHamiltonian:
    """Symmetric tridiagonal (1 - lambda) H0 + V on the interior nodes.

    ``diagonal`` has ``n_points - 2`` entries and ``off_diagonal`` one fewer;
    the wall nodes carry psi = 0 and are not unknowns.
    """

    grid: Grid
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    lam: float

    def __post_init__(self):
        for name in ("diagonal", "off_diagonal"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.off_diagonal.shape[0] != self.diagonal.shape[0] - 1:
            raise OutOfRange("off_diagonal must be one shorter than diagonal")

    @property
    def size(self) -> int:
        return self.diagonal.shape[0]

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out

    def norm_bound(self) -> float:
        """Gershgorin bound on the spectral radius."""
        row = np.abs(self.diagonal).copy()
        row[:-1] += np.abs(self.off_diagonal)
        row[1:] += np.abs(self.off_diagonal)
        return float(row.max())


def kinetic_coupling(grid: Grid, lam, consts: PhysicalConstants = REDUCED) -> float:
    """(1 - lambda) hbar^2 / (2 m dx^2), the magnitude of each off-diagonal entry."""
    return (1.0 - as_lambda(lam)) * consts.hbar**2 / (2.0 * consts.mass * grid.dx**2)


def build_hamiltonian(grid: Grid, potential, lam, consts: PhysicalConstants = REDUCED) -> DiscreteHamiltonian:
    lam = as_lambda(lam)
    potential.check_grid(grid)
    t = kinetic_coupling(grid, lam, consts)
    v = np.asarray(potential(grid.interior, consts), dtype=float)
    if not np.all(np.isfinite(v)):
        raise OutOfRange("potential is not finite on the grid")
    n = grid.n_points - 2
    return DiscreteHamiltonian(grid, 2.0 * t + v, np.full(n - 1, -t), lam)


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # first lobe positive, so repeated solves give identical output
    idx = np.flatnonzero(np.abs(vec) > 1e-3 * np.abs(vec).max())[0]
    return vec if vec[idx] > 0 else -vec


def solve_eigenstates(H: DiscreteHamiltonian, k: int) -> list[tuple[float, WaveFunction]]:
    """The ``k`` lowest eigenpairs, ascending, trapezoid-orthonormal and real."""
    if not 1 <= k <= H.size:
        raise OutOfRange(f"k must lie in [1, {H.size}], got {k}")
    grid = H.grid
    if not np.any(H.off_diagonal):
        # lambda = 1: purely diagonal operator, eigenvectors are grid spikes
        order = np.argsort(H.diagonal, kind="stable")[:k]
        energies = H.diagonal[order]
        vecs = np.zeros((H.size, k))
        vecs[order, np.arange(k)] = 1.0
    else:
        try:
            energies, vecs = eigh_tridiagonal(
                H.diagonal, H.off_diagonal, select="i", select_range=(0, k - 1)
            )
        except (LinAlgError, ValueError) as exc:
            raise ConvergenceFailure(f"tridiagonal eigensolve failed: {exc}") from exc
        scale = max(H.norm_bound(), 1.0)
        for j in range(k):
            r = H.matvec(vecs[:, j]) - energies[j] * vecs[:, j]
            if np.max(np.abs(r)) > 1e-10 * scale:
                raise ConvergenceFailure(f"eigenpair {j} residual {np.max(np.abs(r)):.3e} too large")
    out = []
    for j in range(k):
        full = np.zeros(grid.n_points)
        full[1:-1] = _fix_sign(vecs[:, j]) / np.sqrt(grid.dx)
        out.append((float(energies[j]), WaveFunction(grid, full)))
    return out


def _regularized_inverse(rho: np.ndarray) -> np.ndarray:
    """Regularized 1/rho, namely 1/(rho + eps).

    eps = DENSITY_FLOOR * max(rho). The form is smooth in rho, which keeps the
    nonlinear propagator's fixed-point iteration contractive near the floor.
    """
    peak = rho.max()
    if peak == 0:
        return np.zeros_like(rho)
    return 1.0 / (rho + DENSITY_FLOOR * peak)


def quantum_potential(psi: WaveFunction, consts: PhysicalConstants = REDUCED) -> np.ndarray:
    """Q = -(hbar^2/2m) (d^2 sqrt(rho)/dx^2) / sqrt(rho) by central differences.

    The division is regularized as sqrt(rho) / (rho + eps) with the density
    floor eps = ``DENSITY_FLOOR * max(rho)``, so Q -> 0 smoothly in empty tails.
    The two end points copy their interior neighbour.
    """
    rho = psi.density
    r = np.sqrt(rho)
    dx = psi.grid.dx
    q = np.zeros_like(r)
    lap = (r[2:] - 2.0 * r[1:-1] + r[:-2]) / dx**2
    inv = _regularized_inverse(rho)[1:-1]
    q[1:-1] = -(consts.hbar**2 / (2.0 * consts.mass)) * lap * r[1:-1] * inv
    q[0], q[-1] = q[1], q[-2]
    return q


def bohm_velocity(psi: WaveFunction, consts: PhysicalConstants = REDUCED) -> np.ndarray:
    """Guidance velocity hbar Im(psi* dpsi/dx) / (m |psi|^2), density-floor regularized."""
    amp = psi.amplitudes
    dpsi = np.gradient(amp, psi.grid.dx)
    inv = _regularized_inverse(psi.density)
    return consts.hbar * np.imag(np.conj(amp) * dpsi) * inv / consts.mass

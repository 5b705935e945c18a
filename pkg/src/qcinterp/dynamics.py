"""Crank-Nicolson propagation of the interpolating equation and Bohmian paths.

The propagated operator is H_qm - lambda Q[rho]. Because Q depends on the state,
each step is closed by a Picard iteration: Q is averaged between the start of
the step and the current guess for its end, the linear CN system is solved, and
the guess is replaced until successive iterates agree.

Stability: CN is unconditionally stable for the linear part, but the Picard
map only contracts when ``dt * lambda * max|Q| / hbar`` is modest. Shrink
``dt`` if :class:`~qcinterp.errors.PicardDivergence` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .core import REDUCED, PhysicalConstants, as_lambda
from .errors import OutOfRange, PicardDivergence, TrajectoryEscaped
from .grid import WaveFunction, bohm_velocity, build_hamiltonian, quantum_potential

PICARD_TOL = 1e-10
PICARD_MAX_ITER = 50


@dataclass(frozen=True, eq=False)
class Evolution:
    """Saved frames of one propagation run (a single solution branch)."""

    times: np.ndarray
    states: tuple
    lam: float
    dt: float
    picard_iterations: np.ndarray

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def grid(self):
        return self.states[0].grid

    def norms(self) -> np.ndarray:
        return np.array([s.norm() for s in self.states])


def _cn_solve(diag, off, c, rhs):
    """Solve (I + c H) y = rhs for tridiagonal H with constant off-diagonal."""
    n = diag.shape[0]
    ab = np.empty((3, n), dtype=complex)
    ab[0, 1:] = c * off
    ab[0, 0] = 0.0
    ab[1] = 1.0 + c * diag
    ab[2, :-1] = c * off
    ab[2, -1] = 0.0
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def _apply(diag, off, v):
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


def evolve(psi0: WaveFunction, potential, lam, dt: float, steps: int,
           consts: PhysicalConstants = REDUCED, save_every: int = 1,
           tol: float = PICARD_TOL, max_iter: int = PICARD_MAX_ITER) -> Evolution:
    """Propagate ``psi0`` for ``steps`` steps of size ``dt``.

    Frames are kept every ``save_every`` steps (the initial and final state are
    always kept). Raises PicardDivergence with the failing step index if the
    inner iteration does not reach ``tol`` within ``max_iter`` sweeps.
    """
    lam = as_lambda(lam)
    if not dt > 0:
        raise OutOfRange("dt must be > 0")
    if int(steps) != steps or steps < 0:
        raise OutOfRange("steps must be a non-negative integer")
    if save_every < 1:
        raise OutOfRange("save_every must be >= 1")
    grid = psi0.grid
    H0 = build_hamiltonian(grid, potential, 0.0, consts)
    d0, off = np.asarray(H0.diagonal), np.asarray(H0.off_diagonal)
    c = 1j * dt / (2.0 * consts.hbar)

    full = np.array(psi0.amplitudes)
    full[0] = full[-1] = 0.0
    psi = full[1:-1].copy()

    frames = [WaveFunction(grid, full)]
    times = [0.0]
    iters = np.zeros(int(steps), dtype=int)

    def q_interior(interior):
        buf = np.zeros(grid.n_points, dtype=complex)
        buf[1:-1] = interior
        return quantum_potential(WaveFunction(grid, buf), consts)[1:-1]

    for step in range(1, int(steps) + 1):
        if lam == 0.0:
            rhs = psi - c * _apply(d0, off, psi)
            psi = _cn_solve(d0, off, c, rhs)
            iters[step - 1] = 1
        else:
            q_start = q_interior(psi)
            guess = psi
            for it in range(1, max_iter + 1):
                d = d0 - lam * 0.5 * (q_start + q_interior(guess))
                rhs = psi - c * _apply(d, off, psi)
                new = _cn_solve(d, off, c, rhs)
                resid = float(np.max(np.abs(new - guess)))
                guess = new
                if resid < tol:
                    break
            else:
                raise PicardDivergence(
                    f"Picard iteration did not converge at step {step} "
                    f"(residual {resid:.3e} after {max_iter} iterations)",
                    step=step, residual=resid,
                )
            psi = guess
            iters[step - 1] = it
        if step % save_every == 0 or step == steps:
            full = np.zeros(grid.n_points, dtype=complex)
            full[1:-1] = psi
            frames.append(WaveFunction(grid, full))
            times.append(step * dt)
    return Evolution(np.array(times), tuple(frames), lam, dt, iters)


@dataclass(frozen=True, eq=False)
class TrajectorySet:
    """``positions[i, j]`` is the position of seed ``j`` at ``times[i]``."""

    times: np.ndarray
    positions: np.ndarray
    seeds: np.ndarray

    def path(self, j: int) -> np.ndarray:
        return self.positions[:, j]


def integrate_trajectories(evolution: Evolution, seeds,
                           consts: PhysicalConstants = REDUCED) -> TrajectorySet:
    """Explicit-midpoint integration of dx/dt = v(x, t) through the saved frames.

    v is interpolated linearly in x on the grid and linearly in t between frames.
    """
    seeds = np.atleast_1d(np.asarray(seeds, dtype=float))
    grid = evolution.grid
    if not grid.contains(seeds):
        raise OutOfRange("all seeds must lie inside the grid")
    times = np.asarray(evolution.times)
    if len(times) > 2:
        steps = np.diff(times)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise OutOfRange("trajectory integration needs uniformly spaced frames")
    x = grid.x
    vel = [bohm_velocity(s, consts) for s in evolution.states]

    pos = np.empty((len(times), seeds.size))
    pos[0] = seeds
    cur = seeds.copy()

    def check(p, t):
        if np.any(p < grid.x_min) or np.any(p > grid.x_max):
            raise TrajectoryEscaped(f"trajectory left the grid near t={t:.6g}")

    for i in range(len(times) - 1):
        h = times[i + 1] - times[i]
        v0, v1 = vel[i], vel[i + 1]
        k1 = np.interp(cur, x, v0)
        mid = cur + 0.5 * h * k1
        check(mid, times[i] + 0.5 * h)
        k2 = np.interp(mid, x, 0.5 * (v0 + v1))
        cur = cur + h * k2
        check(cur, times[i + 1])
        pos[i + 1] = cur
    return TrajectorySet(times, pos, seeds)


def first_crossing(times, path_a, path_b):
    """Time at which two paths first meet or swap order, or ``None``."""
    diff = np.asarray(path_a) - np.asarray(path_b)
    sign = np.sign(diff)
    hits = np.flatnonzero(sign == 0)
    flips = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    candidates = []
    if hits.size:
        candidates.append(float(times[hits[0]]))
    if flips.size:
        i = flips[0]
        # linear estimate of the meeting time inside the bracketing interval
        frac = diff[i] / (diff[i] - diff[i + 1])
        candidates.append(float(times[i] + frac * (times[i + 1] - times[i])))
    return min(candidates) if candidates else None

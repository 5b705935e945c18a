"""Numerics for the interpolating (quantum <-> classical) Schrodinger equation.

lambda = 0 is ordinary quantum mechanics, lambda = 1 the classical limit.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DriveSpec,
    InterpolationParam,
    PhysicalConstants,
    lambda_drive,
    make_lambda,
)
from .errors import (  # noqa: E402
    BadQuantumNumber,
    ClassicalSingularity,
    ConfigError,
    ConvergenceFailure,
    GridMismatch,
    NoRootInBracket,
    OutOfRange,
    ParseError,
    PicardDivergence,
    TrajectoryEscaped,
)
from .grid import (  # noqa: E402
    Grid,
    WaveFunction,
    bohm_velocity,
    build_hamiltonian,
    gaussian_packet,
    quantum_potential,
    solve_eigenstates,
)
from .dynamics import evolve, integrate_trajectories  # noqa: E402
from .potentials import Box, DoubleWell, Free, Harmonic, Tabulated  # noqa: E402

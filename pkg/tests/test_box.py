import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcinterp.box import BoxSpec, box_energy, box_wavefunction
from qcinterp.errors import BadQuantumNumber, GridMismatch, OutOfRange
from qcinterp.grid import Grid


def test_energy_examples():
    box = BoxSpec(1.0)
    assert box_energy(1, box, 1.0) == 0.0
    assert box_energy(1, box, 0.0) == pytest.approx(4.934802200544679, rel=1e-14)
    assert box_energy(2, box, 0.5) == pytest.approx(9.869604401089358, rel=1e-14)


@pytest.mark.parametrize("n", [0, -1, 6, 2.5])
def test_bad_quantum_number(n):
    with pytest.raises(BadQuantumNumber):
        box_energy(n, BoxSpec(1.0, n_max=5))


def test_spec_validation():
    with pytest.raises(OutOfRange):
        BoxSpec(0.0)
    with pytest.raises(OutOfRange):
        BoxSpec(1.0, n_max=0)


@given(st.integers(1, 5), st.floats(0, 1), st.floats(0.1, 10))
def test_ratio_law(n, lam, L):
    box = BoxSpec(L)
    assert box_energy(n, box, lam) == pytest.approx((1 - lam) * box_energy(n, box, 0.0), rel=1e-14, abs=0)


def test_wavefunction_values():
    box = BoxSpec(1.0)
    g = box.grid(2001)
    psi1 = box_wavefunction(1, box, g)
    psi2 = box_wavefunction(2, box, g)
    mid = g.n_points // 2
    assert psi1.amplitudes[mid].real == pytest.approx(math.sqrt(2), rel=1e-6)
    assert abs(psi2.amplitudes[mid]) < 1e-12


def test_wavefunctions_orthonormal():
    box = BoxSpec(2.0)
    g = box.grid(2001)
    states = [box_wavefunction(n, box, g) for n in range(1, 6)]
    G = np.array([[a.inner(b).real for b in states] for a in states])
    assert np.max(np.abs(G - np.eye(5))) < 1e-6


def test_wavefunction_grid_mismatch():
    box = BoxSpec(1.0)
    with pytest.raises(GridMismatch):
        box_wavefunction(1, box, Grid(-1, 1, 101))

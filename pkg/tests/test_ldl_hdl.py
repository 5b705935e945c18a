import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcinterp.core import DriveSpec
from qcinterp.errors import OutOfRange
from qcinterp.ldl_hdl import equality_report, oscillation_series, state_label
from qcinterp.thermo import entropy_u, free_energy_u


def test_endpoints_of_drive():
    s = oscillation_series(DriveSpec(1.0, 0.0, math.pi, 3), 2.0)
    assert s.lambdas[0] == 0.0 and s.state_label[0] == "LDL-like"
    assert s.lambdas[1] == pytest.approx(1.0) and s.state_label[1] == "HDL-like"
    assert s.F_over_kT[0] == pytest.approx(free_energy_u(2.0, 0.0))
    assert s.S_over_k[1] == pytest.approx(entropy_u(2.0, 1.0))


def test_equal_share_at_half():
    # lambda = 1/2 at t = pi/6 with Omega = 1
    s = oscillation_series(DriveSpec(1.0, 0.0, math.pi, 13), 2.0)
    eq = s.equal_share()
    half = np.isclose(s.lambdas, 0.5, atol=1e-12)
    assert half.sum() == 2
    assert np.array_equal(eq, half)
    assert {"LDL-like", "HDL-like"} <= set(s.state_label)


def test_two_sample_series():
    s = oscillation_series(DriveSpec(1.0, 0.0, 1.0, 2), 1.0)
    assert len(s.times) == len(s.state_label) == 2


def test_periodicity():
    drive = DriveSpec(2.0, 0.0, 3 * math.pi / 2.0, 301)
    s = oscillation_series(drive, 1.5)
    per = 100  # samples per pi / Omega
    for arr in (s.lambdas, s.F_over_kT, s.S_over_k, s.mean_energy):
        assert np.allclose(arr[per:], arr[:-per], atol=1e-12)


@given(st.floats(0, 1))
def test_labels(lam):
    label = state_label(lam)
    if lam < 0.1:
        assert label == "LDL-like"
    elif lam > 0.9:
        assert label == "HDL-like"
    else:
        assert label == "mixed"


def test_ldl_samples_follow_quantum_curve():
    s = oscillation_series(DriveSpec(1.0, 0.0, 2 * math.pi, 400), 3.0)
    for lam, F, S, label in zip(s.lambdas, s.F_over_kT, s.S_over_k, s.state_label):
        if label == "LDL-like":
            assert abs(F - free_energy_u(3.0, 0.0)) <= lam * abs(free_energy_u(3.0, 1.0) - free_energy_u(3.0, 0.0)) + 1e-12
            assert abs(S - entropy_u(3.0, 0.0)) <= lam * abs(entropy_u(3.0, 1.0) - entropy_u(3.0, 0.0)) + 1e-12


def test_equality_report():
    assert equality_report(2.0).equal and equality_report(2.0).regime == "balanced"
    assert equality_report(2.0).ratio == 1.0
    assert equality_report(0.2).regime == "thermal-dominated"
    assert equality_report(20.0).regime == "quantum-dominated"
    with pytest.raises(OutOfRange):
        equality_report(0.0)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcinterp.core import (
    DriveSpec,
    InterpolationParam,
    PhysicalConstants,
    lambda_drive,
    lambda_drive_series,
    make_lambda,
)
from qcinterp.errors import OutOfRange


def test_make_lambda_endpoints():
    assert make_lambda(0.0).value == 0.0
    assert make_lambda(0.0).is_quantum
    assert make_lambda(1.0).value == 1.0
    assert make_lambda(1.0).is_classical
    assert make_lambda(0.25).kinetic_fraction == 0.75


@pytest.mark.parametrize("bad", [1.5, -0.1, float("nan"), float("inf"), True, "0.5", None])
def test_make_lambda_rejects(bad):
    with pytest.raises(OutOfRange):
        make_lambda(bad)


def test_make_lambda_passthrough():
    lam = InterpolationParam(0.3)
    assert make_lambda(lam) is lam


@pytest.mark.parametrize("field", ["hbar", "mass", "k_B"])
def test_constants_positive(field):
    with pytest.raises(OutOfRange):
        PhysicalConstants(**{field: 0.0})
    with pytest.raises(OutOfRange):
        PhysicalConstants(**{field: -1.0})


def test_drive_examples():
    drive = DriveSpec(1.0, 0.0, 10.0, 11)
    assert lambda_drive(drive, 0.0).value == 0.0
    assert lambda_drive(drive, math.pi / 2).value == pytest.approx(1.0, abs=1e-15)
    assert lambda_drive(drive, math.pi / 4).value == pytest.approx(math.sqrt(2) / 2, rel=1e-12)
    # |sin| hits 1/2 at a twelfth of the full sine period
    assert lambda_drive(drive, math.pi / 6).value == pytest.approx(0.5, rel=1e-12)


def test_drive_window():
    drive = DriveSpec(1.0, 0.0, 1.0, 5)
    with pytest.raises(OutOfRange):
        lambda_drive(drive, 1.5)


@pytest.mark.parametrize("args", [(0.0, 0, 1, 5), (1.0, 1, 1, 5), (1.0, 0, 1, 1), (1.0, 0, 1, 2.5)])
def test_drive_spec_invalid(args):
    with pytest.raises(OutOfRange):
        DriveSpec(*args)


def test_drive_series_shape():
    t, lam = lambda_drive_series(DriveSpec(2.0, 0.0, 3.0, 7))
    assert t.shape == lam.shape == (7,)
    assert t[0] == 0.0 and t[-1] == 3.0


@given(st.floats(0.1, 10.0), st.floats(-100.0, 100.0))
def test_drive_bounded_and_periodic(omega, t):
    drive = DriveSpec(omega, -1e3, 1e3, 2)
    lam = lambda_drive(drive, t).value
    assert 0.0 <= lam <= 1.0
    shifted = lambda_drive(drive, t + drive.period).value
    assert shifted == pytest.approx(lam, abs=1e-9 * max(1.0, abs(omega * t)))


def test_drive_dense_sample_in_range():
    _, lam = lambda_drive_series(DriveSpec(3.7, -50.0, 50.0, 100001))
    assert np.all((lam >= 0.0) & (lam <= 1.0))

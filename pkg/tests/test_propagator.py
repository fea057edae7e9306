import math

import numpy as np
import pytest
from scipy.linalg import expm

from corrmem.polariton import DegeneracyError
from corrmem.propagator import (
    dark_following_infidelity,
    propagate,
    propagate_trace,
    transport_dark,
)
from corrmem.schedule import ControlSchedule, constant, storage_ramp
from corrmem.system import build_hamiltonian, straight_line


def test_zero_couplings_identity():
    cfg = straight_line([0.0, 0.0], [constant(0.0, 3.0)] * 2)
    np.testing.assert_array_equal(propagate(cfg, 3.0, 7).M, np.eye(5))


@pytest.mark.parametrize("steps", [1, 3, 50])
def test_time_independent_matches_expm(line2, steps):
    h = build_hamiltonian(line2, 0.0).h
    M = propagate(line2, 2.5, steps).M
    assert np.abs(M - expm(-1j * h * 2.5)).max() <= 1e-12


def test_rabi_flop():
    cfg = straight_line([1.0], [constant(0.0, math.pi)])
    M = propagate(cfg, math.pi, 10).M
    assert abs(M[0, 0]) == pytest.approx(1.0, abs=1e-12)
    assert M[0, 0].real == pytest.approx(-1.0, abs=1e-12)


def test_trace_endpoint_matches_product(ramp2):
    a0 = np.array([1.0, 0, 0, 0, 0], dtype=complex)
    times, amps = propagate_trace(ramp2, 10.0, 40, a0)
    assert amps.shape == (41, 5)
    assert times[-1] == 10.0
    np.testing.assert_allclose(amps[-1], propagate(ramp2, 10.0, 40).M @ a0, atol=1e-13)


def test_second_order_step_halving(ramp2):
    Ms = [propagate(ramp2, 10.0, s).M for s in (50, 100, 200)]
    r = np.abs(Ms[0] - Ms[1]).max() / np.abs(Ms[1] - Ms[2]).max()
    assert 3.5 <= r <= 4.5


def test_unitary(ramp2):
    assert propagate(ramp2, 10.0, 500).unitarity_error() < 1e-12


def test_frozen_schedule_stays_dark(line2):
    assert dark_following_infidelity(line2, 5.0, 200) < 1e-13


def test_slow_ramp_follows_dark_state():
    cfg = straight_line([1.0], [storage_ramp(50.0, 1.0)])
    infs = [dark_following_infidelity(cfg, T, steps=int(20 * T) + 200) for T in (20, 80, 320)]
    assert infs[0] > infs[1] > infs[2]
    assert infs[2] < 1e-3


def test_doubling_past_threshold_halves():
    cfg = straight_line([1.0, 1.0], [storage_ramp(200.0, 1.0), storage_ramp(200.0, 1.0)])
    a = dark_following_infidelity(cfg, 80.0, 2000)
    b = dark_following_infidelity(cfg, 160.0, 4000)
    assert a < 1e-2
    assert b <= a / 2


def test_dimension_change_detected():
    # only one control switches off: dark subspace grows mid-path
    cfg = straight_line(
        [1.0, 1.0],
        [constant(1.0, 2.0), ControlSchedule("custom_samples", 1.0, 2.0, samples=((0, 1.0), (1, 0.0), (2, 0.0)))],
    )
    with pytest.raises(DegeneracyError):
        transport_dark(cfg, np.linspace(0, 2, 21), np.eye(5)[0])

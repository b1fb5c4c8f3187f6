import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerhhg.laser import (
    DEFAULT_PHOTON_FRACTION,
    PulseSpec,
    electric_field,
    pulse_for_gap,
    time_grid,
    vector_potential,
)

DEFAULT = PulseSpec()


def test_defaults():
    assert DEFAULT.E0 == 0.15
    assert DEFAULT.n_cyc == 15
    assert DEFAULT.phi == 0.0
    assert DEFAULT.omega0 == pytest.approx(1.9801 / 6.3, abs=1e-4)


def test_pulse_for_gap_ties_omega0():
    pulse = pulse_for_gap(1.9801, photon_fraction=12.6)
    assert pulse.omega0 == pytest.approx(1.9801 / 12.6, rel=1e-14)
    assert DEFAULT_PHOTON_FRACTION == 6.3


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        PulseSpec(omega0=0.0)
    with pytest.raises(ValueError):
        PulseSpec(n_cyc=0)
    with pytest.raises(ValueError):
        PulseSpec(dt=-0.1)


def test_duration_and_step_count():
    pulse = PulseSpec(omega0=2.0 * math.pi, n_cyc=1, dt=0.1)
    assert pulse.duration == pytest.approx(1.0)
    assert pulse.n_steps == 10


def test_time_grid_uniform_and_covers_pulse():
    grid = time_grid(DEFAULT)
    assert grid[0] == 0.0
    assert grid[-1] >= DEFAULT.duration
    assert grid[-2] < DEFAULT.duration
    # exactly k * dt by construction
    assert np.array_equal(grid, np.arange(len(grid)) * DEFAULT.dt)


def test_vector_potential_endpoints_vanish():
    a0 = vector_potential(DEFAULT, 0.0)
    aT = vector_potential(DEFAULT, DEFAULT.duration)
    assert np.allclose(a0, 0.0, atol=1e-14)
    assert np.allclose(aT, 0.0, atol=1e-12)


def test_field_zero_outside_pulse():
    t = np.array([-1.0, DEFAULT.duration + 0.5])
    assert np.all(vector_potential(DEFAULT, t) == 0.0)
    assert np.all(electric_field(DEFAULT, t) == 0.0)


def test_peak_vector_potential_amplitude():
    # envelope max at T/2 where the carrier is also extremal for integer n_cyc
    t_mid = 0.5 * DEFAULT.duration
    amp = np.linalg.norm(vector_potential(DEFAULT, t_mid))
    assert amp == pytest.approx(DEFAULT.E0 / DEFAULT.omega0, rel=1e-10)


def test_polarization_direction():
    pulse = PulseSpec(phi=110.0)
    a = vector_potential(pulse, 0.3 * pulse.duration)
    ang = math.degrees(math.atan2(a[1], a[0])) % 180.0
    assert ang == pytest.approx(110.0, abs=1e-9)


def test_field_is_minus_derivative_of_vector_potential():
    ts = np.linspace(0.05, DEFAULT.duration - 0.05, 200)
    h = 1e-4
    fd = -(vector_potential(DEFAULT, ts + h) - vector_potential(DEFAULT, ts - h)) / (2 * h)
    ef = electric_field(DEFAULT, ts)
    assert np.max(np.abs(ef - fd)) < 1e-6 * np.max(np.abs(ef))


@given(phi=st.floats(0.0, 360.0), n_cyc=st.integers(1, 20),
       omega0=st.floats(0.05, 3.0))
@settings(max_examples=50, deadline=None)
def test_derivative_property_random_pulses(phi, n_cyc, omega0):
    pulse = PulseSpec(phi=phi, n_cyc=n_cyc, omega0=omega0)
    ts = np.linspace(0.1 * pulse.duration, 0.9 * pulse.duration, 25)
    h = 1e-5 * pulse.duration
    fd = -(vector_potential(pulse, ts + h) - vector_potential(pulse, ts - h)) / (2 * h)
    ef = electric_field(pulse, ts)
    scale = max(np.max(np.abs(ef)), pulse.E0 * 1e-3)
    assert np.max(np.abs(ef - fd)) < 1e-5 * scale


def test_scalar_and_array_inputs_consistent():
    t = 12.3
    single = electric_field(DEFAULT, t)
    batch = electric_field(DEFAULT, np.array([t, t]))
    assert single.shape == (2,)
    assert batch.shape == (2, 2)
    assert np.array_equal(batch[0], single)

"""Exact time propagation of the two occupied orbitals.

Strang splitting: exp(-i H0 dt/2) exp(-i H_laser(t + dt/2) dt) exp(-i H0 dt/2),
with the static half-step exponential precomputed from the eigensystem and
the laser factor a per-step diagonal phase.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, laser
from .model import Geometry, ModelSpec, StaticEigensystem, build_geometry, build_h0, solve_static

OCCUPATION = 2.0  # electrons per occupied orbital (half filling, spin degenerate)


class NormDriftError(RuntimeError):
    """Propagation lost unitarity beyond tolerance."""


@dataclass(frozen=True)
class EvolutionRecord:
    times: np.ndarray  # (N+1,)
    states: np.ndarray  # (N+1, 4, 2); [:, :, i] is orbital i
    position: np.ndarray  # (N+1, 2), total <r>(t) over all electrons
    acceleration: np.ndarray  # (N+1, 2)
    dt: float


def laser_hamiltonian(geometry: Geometry, efield) -> np.ndarray:
    """diag(E_x x_i + E_y y_i) over sites."""
    efield = np.asarray(efield, dtype=float)
    return np.diag(geometry.sites @ efield)


def half_step_exponential(eig: StaticEigensystem, dt: float) -> np.ndarray:
    """exp(-i H0 dt/2) from the static eigendecomposition."""
    u = eig.states
    return (u * np.exp(-0.5j * eig.energies * dt)) @ u.T


def step(state, exp_h0_half, geometry: Geometry, efield_mid, dt: float):
    """One split-operator step with the field evaluated at the midpoint."""
    state = np.asarray(state, dtype=complex)
    phase = np.exp(-1j * dt * (geometry.sites @ np.asarray(efield_mid, dtype=float)))
    if state.ndim == 1:
        return exp_h0_half @ (phase * (exp_h0_half @ state))
    return exp_h0_half @ (phase[:, None] * (exp_h0_half @ state))


def positions_from_states(states, geometry: Geometry) -> np.ndarray:
    """Total <r>(t) of all electrons from a (..., 4, n_orb) state history."""
    density = OCCUPATION * np.sum(np.abs(np.asarray(states)) ** 2, axis=-1)
    return density @ geometry.sites


def acceleration_from_position(position, dt: float) -> np.ndarray:
    """Second derivative by a 5-point central finite difference (exact for
    polynomials up to degree 5); the two samples at each end are zeroed
    (field and dipole velocity vanish at the pulse edges).

    The 4th-order stencil keeps the multiplicative high-frequency bias,
    (omega dt)^4/90 in amplitude, below the 1% level for all reported
    harmonics at dt = 0.1; a 3-point stencil would bias the 15th harmonic
    by several percent.
    """
    position = np.asarray(position, dtype=float)
    if position.shape[0] < 5:
        raise ValueError("need at least five samples to differentiate twice")
    accel = np.zeros_like(position)
    accel[2:-2] = (
        -position[4:] + 16.0 * position[3:-1] - 30.0 * position[2:-2]
        + 16.0 * position[1:-3] - position[:-4]
    ) / (12.0 * dt**2)
    return accel


def propagate(model: ModelSpec, pulse: laser.PulseSpec,
              norm_tol: float = 1e-8) -> EvolutionRecord:
    """Propagate both occupied orbitals over the full pulse grid.

    Initial condition: the two lowest static eigenvectors (ground state at
    half filling).  Raises NormDriftError if any state norm deviates from 1
    by more than norm_tol.
    """
    geometry = build_geometry(model)
    eig = solve_static(build_h0(model))
    times = laser.time_grid(pulse)
    dt = pulse.dt
    efield_mid = laser.electric_field(pulse, times[:-1] + 0.5 * dt)

    psi0 = eig.states[:, :2].astype(complex)
    exp_half = half_step_exponential(eig, dt)
    states = kernels.propagate_states(psi0, exp_half, geometry.sites, efield_mid, dt)

    norms = np.sqrt(np.sum(np.abs(states) ** 2, axis=1))
    drift = np.max(np.abs(norms - 1.0))
    if drift > norm_tol:
        raise NormDriftError(f"norm drift {drift:.3e} exceeds {norm_tol:.1e}")

    position = positions_from_states(states, geometry)
    acceleration = acceleration_from_position(position, dt)
    return EvolutionRecord(times=times, states=states, position=position,
                           acceleration=acceleration, dt=dt)

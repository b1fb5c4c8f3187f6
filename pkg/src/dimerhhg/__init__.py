"""High-harmonic generation from a tight-binding molecular dimer.

Library layout:
    model       geometry, static Hamiltonian, eigensystem, dipoles
    laser       sin^2 pulse, vector potential, electric field, time grid
    propagator  split-operator propagation and observables
    spectrum    windowed FFT spectra and per-order band intensities
    adiabatic   instantaneous-eigenbasis decomposition and approximations
    scans       polarization scans and coupling-strength sweeps
    cli         batch front-end emitting CSV/JSON data files
    kernels     compiled hot loops with a pure-numpy fallback
"""

from .kernels import BACKEND
from .laser import PulseSpec, pulse_for_gap
from .model import ModelSpec, build_geometry, build_h0, solve_static

__all__ = [
    "BACKEND",
    "ModelSpec",
    "PulseSpec",
    "build_geometry",
    "build_h0",
    "pulse_for_gap",
    "solve_static",
]

__version__ = "0.1.0"

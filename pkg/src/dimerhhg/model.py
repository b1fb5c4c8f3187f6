"""Dimer geometry, static Hamiltonian, eigensystem and dipole matrix elements.

The target is two parallel two-site molecules (four sites total), coupled
by a weak hopping between the two closest cross-molecule sites.  All
quantities use the hbar = |e| = 1 unit system with the intramolecular
hopping defining the energy scale.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(frozen=True)
class ModelSpec:
    """Geometry and coupling parameters of the four-site dimer."""

    t0: float = -1.0
    t1: float = -0.02
    d: float = 9.2
    l: float = 5.5
    alpha_mol: float = 90.0
    alpha_inter: float = 20.0

    def __post_init__(self):
        if self.l <= 0:
            raise ValueError("molecular length l must be positive")
        if self.d <= 0:
            raise ValueError("intermolecular distance d must be positive")


@dataclass(frozen=True)
class Geometry:
    """Site positions, indices 0..3; sites 1 and 2 are the closest
    cross-molecule pair."""

    sites: np.ndarray  # (4, 2)

    @property
    def x(self):
        return self.sites[:, 0]

    @property
    def y(self):
        return self.sites[:, 1]


@dataclass(frozen=True)
class StaticEigensystem:
    """Eigenvalues (ascending), orthonormal real eigenvectors (columns),
    and the gap between levels 1 and 2."""

    energies: np.ndarray  # (4,)
    states: np.ndarray  # (4, 4), states[:, i] is the i-th eigenvector
    gap: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "gap", float(self.energies[2] - self.energies[1]))


def build_geometry(spec: ModelSpec) -> Geometry:
    """Place the four sites: molecule centers at +-(d/2) along the
    intermolecular axis, sites at center +- (l/2) along the molecular axis.

    The sign of the molecular offset is chosen so that site 1 (molecule A)
    and site 2 (molecule B) are the closest cross-molecule pair; molecule B
    is the inversion image of molecule A, so site 3 = -site 0 and
    site 2 = -site 1 hold exactly.
    """
    ai = np.radians(spec.alpha_inter)
    am = np.radians(spec.alpha_mol)
    center = 0.5 * spec.d * np.array([np.cos(ai), np.sin(ai)])
    offset = 0.5 * spec.l * np.array([np.cos(am), np.sin(am)])
    if np.dot(center, offset) < 0:
        offset = -offset
    site0 = -center - offset
    site1 = -center + offset
    sites = np.array([site0, site1, -site1, -site0])
    sites.setflags(write=False)
    return Geometry(sites=sites)


def build_h0(spec: ModelSpec) -> np.ndarray:
    """Tridiagonal 4x4 hopping Hamiltonian: t0 within each molecule,
    t1 between sites 1 and 2."""
    t0, t1 = spec.t0, spec.t1
    return np.array(
        [
            [0.0, t0, 0.0, 0.0],
            [t0, 0.0, t1, 0.0],
            [0.0, t1, 0.0, t0],
            [0.0, 0.0, t0, 0.0],
        ]
    )


def _fix_signs(states: np.ndarray) -> np.ndarray:
    """Make the largest-|component| entry of each eigenvector positive."""
    lead = np.argmax(np.abs(states), axis=0)
    signs = np.sign(states[lead, np.arange(states.shape[1])])
    signs[signs == 0] = 1.0
    return states * signs


def solve_static(h0: np.ndarray) -> StaticEigensystem:
    """Diagonalize the static Hamiltonian.

    The solver is deterministic and the sign fix makes repeated calls
    bitwise identical.  For t1 = 0 the level pairs are degenerate and the
    returned basis within each pair (orthonormal, sign-fixed) is a
    convention; dipoles inside a degenerate subspace are basis dependent.
    """
    energies, states = kernels.eigh_sym(np.asarray(h0, dtype=float))
    states = _fix_signs(states)
    energies = np.asarray(energies, dtype=float)
    states = np.ascontiguousarray(states)
    energies.setflags(write=False)
    states.setflags(write=False)
    return StaticEigensystem(energies=energies, states=states)


def eigenvalues_closed_form(t0: float, t1: float) -> np.ndarray:
    """Ascending eigenvalues +-(sqrt(t1^2 + 4 t0^2) +- |t1|)/2 of the
    four-site chain; used as an independent cross-check of the solver."""
    root = np.sqrt(t1 * t1 + 4.0 * t0 * t0)
    outer = 0.5 * (root + abs(t1))
    inner = 0.5 * (root - abs(t1))
    return np.array([-outer, -inner, inner, outer])


def transition_dipole(eigensystem: StaticEigensystem, geometry: Geometry,
                      i: int, j: int) -> np.ndarray:
    """Matrix element (u_i^T X u_j, u_i^T Y u_j) of the position operator."""
    if i == j:
        raise ValueError("transition dipole requires i != j")
    ui = eigensystem.states[:, i]
    uj = eigensystem.states[:, j]
    return np.array(
        [np.dot(ui * geometry.x, uj), np.dot(ui * geometry.y, uj)]
    )


def dipole_direction(dipole: np.ndarray) -> float:
    """Direction of a dipole vector in degrees, in (-90, 90] mod 180
    (a dipole and its negative are the same axis)."""
    ang = np.degrees(np.arctan2(dipole[1], dipole[0]))
    while ang <= -90.0:
        ang += 180.0
    while ang > 90.0:
        ang -= 180.0
    return float(ang)


def dipole_t1_expansion_check(spec: ModelSpec, i: int, j: int,
                              delta: float = 1e-3) -> float:
    """Estimate the order of the leading t1-dependent term of |dipole(i, j)|.

    Evaluates the dipole magnitude at t1 = delta*t0, delta/2*t0, delta/4*t0
    and fits the log-log slope of the consecutive differences.  At t1 = 0
    the levels within each pair are degenerate, so the expansion is taken
    along the smooth t1 -> 0+ branch; consecutive differences avoid
    needing the limit value explicitly.

    Returns the fitted exponent (2.0 for the cross-gap-free transitions:
    the linear contributions cancel).
    """
    if (i, j) not in {(0, 1), (1, 0), (2, 3), (3, 2)}:
        raise ValueError("expansion check applies to the (0,1)/(2,3) pairs")
    if delta == 0:
        eig = solve_static(build_h0(spec))
        geo = build_geometry(spec)
        return float(np.linalg.norm(transition_dipole(eig, geo, i, j)))

    geo = build_geometry(spec)
    mags = []
    for scale in (1.0, 0.5, 0.25):
        probe = ModelSpec(t0=spec.t0, t1=delta * scale * spec.t0, d=spec.d,
                          l=spec.l, alpha_mol=spec.alpha_mol,
                          alpha_inter=spec.alpha_inter)
        eig = solve_static(build_h0(probe))
        mags.append(np.linalg.norm(transition_dipole(eig, geo, i, j)))
    d1 = abs(mags[0] - mags[1])
    d2 = abs(mags[1] - mags[2])
    return float(np.log2(d1 / d2))


def model_summary(spec: ModelSpec) -> dict:
    """JSON-friendly dump of the geometry and static eigensystem."""
    geo = build_geometry(spec)
    eig = solve_static(build_h0(spec))
    return {
        "sites": geo.sites.tolist(),
        "energies": eig.energies.tolist(),
        "states": eig.states.tolist(),
        "gap": eig.gap,
    }

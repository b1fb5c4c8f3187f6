"""Polarization-angle scans and coupling-strength sweeps.

Every scan point is an independent pure task (one propagation or frame
sweep plus a spectrum); the module distributes them over a process pool
and merges results in a fixed order, so identical inputs give identical
tables.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import adiabatic, laser, propagator, spectrum
from .model import ModelSpec, eigenvalues_closed_form

ODD_HARMONICS = (1, 3, 5, 7, 9, 11, 13, 15)
ENGINES = ("exact", "adia-intra", "adia-inter")
CLASS_WINDOW = 15.0  # degrees around each characteristic axis


class ScanError(RuntimeError):
    pass


def position_series(model: ModelSpec, pulse: laser.PulseSpec, engine: str):
    """Total position expectation series for the selected engine."""
    if engine == "exact":
        return propagator.propagate(model, pulse).position
    if engine == "adia-intra":
        return adiabatic.adia_intra_position(adiabatic.compute_frames(model, pulse))
    if engine == "adia-inter":
        record = propagator.propagate(model, pulse)
        frames = adiabatic.compute_frames(model, pulse)
        return adiabatic.adia_inter_position(adiabatic.decompose(record, frames))
    raise ValueError(f"unknown engine {engine!r}")


def harmonic_intensities(model: ModelSpec, pulse: laser.PulseSpec, engine: str,
                         harmonics=ODD_HARMONICS) -> dict:
    """Per-order band intensities for one run."""
    pos = position_series(model, pulse, engine)
    accel = propagator.acceleration_from_position(pos, pulse.dt)
    spec = spectrum.power_spectrum(accel, pulse.dt, pulse.omega0)
    return spectrum.harmonic_table(spec, harmonics)


def _intensity_task(args):
    model, pulse, engine, harmonics = args
    try:
        return harmonic_intensities(model, pulse, engine, harmonics)
    except propagator.NormDriftError as exc:
        raise ScanError(f"propagation failed at phi={pulse.phi}: {exc}") from exc


def _run_tasks(tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_intensity_task, tasks, chunksize=8))
    return [_intensity_task(t) for t in tasks]


@dataclass(frozen=True)
class PolarScan:
    phis: np.ndarray  # degrees, [0, 180)
    harmonics: tuple
    intensities: np.ndarray  # (n_harmonics, n_phi)
    normalized: np.ndarray  # intensities / per-row max
    peak_angle: dict  # n -> refined argmax angle (degrees)
    engine: str


def default_phi_grid(step: float = 1.0) -> np.ndarray:
    return np.arange(0.0, 180.0, step)


def _refine_peak(phis, values, idx) -> float:
    """Parabolic sub-grid refinement around the grid maximum; periodic in
    180 degrees when the grid covers the half circle.  Never moves the
    peak by more than one grid step."""
    n = len(phis)
    if n < 3:
        return float(phis[idx])
    h = phis[1] - phis[0]
    periodic = abs((phis[-1] + h) - (phis[0] + 180.0)) < 1e-9
    if periodic:
        lo, hi = (idx - 1) % n, (idx + 1) % n
    else:
        if idx == 0 or idx == n - 1:
            return float(phis[idx])
        lo, hi = idx - 1, idx + 1
    denom = values[lo] - 2.0 * values[idx] + values[hi]
    if denom >= 0:
        return float(phis[idx])
    shift = 0.5 * (values[lo] - values[hi]) / denom
    shift = min(1.0, max(-1.0, shift))
    return float((phis[idx] + shift * h) % 180.0)


def polar_scan(model: ModelSpec, pulse_template: laser.PulseSpec, phis=None,
               engine: str = "exact", harmonics=ODD_HARMONICS,
               jobs: int = 1) -> PolarScan:
    """One run per polarization angle; peak angles with sub-grid refinement.

    The stored grid covers [0, 180) only: phi and phi + 180 give the same
    intensities by inversion symmetry."""
    if phis is None:
        phis = default_phi_grid()
    phis = np.asarray(phis, dtype=float)
    harmonics = tuple(int(n) for n in harmonics)
    tasks = [(model, replace(pulse_template, phi=float(p)), engine, harmonics)
             for p in phis]
    tables = _run_tasks(tasks, jobs)
    intensities = np.array([[tab[n] for tab in tables] for n in harmonics])
    maxima = intensities.max(axis=1)
    maxima[maxima == 0.0] = 1.0
    normalized = intensities / maxima[:, None]
    peak_angle = {
        n: _refine_peak(phis, intensities[i], int(np.argmax(intensities[i])))
        for i, n in enumerate(harmonics)
    }
    return PolarScan(phis=phis, harmonics=harmonics, intensities=intensities,
                     normalized=normalized, peak_angle=peak_angle, engine=engine)


def lobe_width(scan: PolarScan, n: int) -> float:
    """FWHM of the dominant lobe of the normalized I_n(phi), linear
    interpolation on the periodic grid; 180 if the lobe never drops
    below half maximum."""
    i = scan.harmonics.index(n)
    vals = scan.normalized[i]
    phis = scan.phis
    npts = len(phis)
    h = phis[1] - phis[0]
    k0 = int(np.argmax(vals))
    half = 0.5 * vals[k0]

    def crossing(direction):
        prev = vals[k0]
        for step_count in range(1, npts):
            k = (k0 + direction * step_count) % npts
            cur = vals[k]
            if cur < half:
                frac = (prev - half) / (prev - cur)
                return (step_count - 1 + frac) * h
            prev = cur
        return None

    right = crossing(+1)
    left = crossing(-1)
    if right is None or left is None:
        return 180.0
    return float(min(180.0, left + right))


def classify_angle(angle: float, alpha_mol: float, alpha_inter: float,
                   window: float = CLASS_WINDOW) -> str:
    """Bucket a peak angle as molecular / intermolecular / unclassified,
    comparing axes modulo 180 degrees."""

    def axis_distance(a, b):
        diff = abs(a - b) % 180.0
        return min(diff, 180.0 - diff)

    if axis_distance(angle, alpha_mol) <= window:
        return "molecular"
    if axis_distance(angle, alpha_inter) <= window:
        return "intermolecular"
    return "unclassified"


@dataclass(frozen=True)
class CouplingSweep:
    t1_ratios: np.ndarray  # |t1 / t0|, ascending
    harmonics: tuple
    peak_angles: np.ndarray  # (n_harmonics, n_t1)
    classes: np.ndarray  # same shape, strings
    flip_threshold: dict  # n -> |t1/t0| or None
    perp_inter: np.ndarray  # I_n at phi perpendicular to the intermolecular axis
    perp_mol: np.ndarray  # I_n at phi perpendicular to the molecular axes
    crossings: dict  # n -> |t1/t0| where perp_mol first exceeds perp_inter
    engine: str


def log_grid(t1_min: float, t1_max: float, points_per_decade: int = 10) -> np.ndarray:
    """Log-spaced |t1/t0| grid (zero excluded by construction)."""
    if t1_min <= 0 or t1_max <= t1_min:
        raise ValueError("need 0 < t1_min < t1_max")
    decades = math.log10(t1_max / t1_min)
    n = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(t1_min), math.log10(t1_max), n)


def _sweep_point(model_template: ModelSpec, pulse_template: laser.PulseSpec,
                 ratio: float, photon_fraction: float, freeze_omega0: bool):
    model = replace(model_template, t1=ratio * model_template.t0)
    if freeze_omega0:
        pulse = pulse_template
    else:
        gap = float(np.diff(eigenvalues_closed_form(model.t0, model.t1))[1])
        pulse = replace(pulse_template, omega0=gap / photon_fraction)
    return model, pulse


def _perp_angles(model: ModelSpec):
    return ((model.alpha_inter + 90.0) % 180.0, (model.alpha_mol + 90.0) % 180.0)


def coupling_sweep(model_template: ModelSpec, pulse_template: laser.PulseSpec,
                   t1_ratios=None, engine: str = "exact", phis=None,
                   harmonics=ODD_HARMONICS,
                   photon_fraction: float = laser.DEFAULT_PHOTON_FRACTION,
                   freeze_omega0: bool = False, jobs: int = 1,
                   refine_iters: int = 6) -> CouplingSweep:
    """Sweep |t1/t0|: per point a polar scan (peak-angle map) plus the two
    perpendicular-polarization runs; flip thresholds and curve crossings
    are refined by bisection between grid points."""
    if t1_ratios is None:
        t1_ratios = log_grid(1e-5, 0.5, 10)
    t1_ratios = np.asarray(t1_ratios, dtype=float)
    if np.any(t1_ratios <= 0) or np.any(t1_ratios >= abs(model_template.t0)):
        raise ValueError("t1 grid must lie strictly inside (0, |t0|)")
    if phis is None:
        phis = default_phi_grid(2.0)
    harmonics = tuple(int(n) for n in harmonics)
    phi_perp_inter, phi_perp_mol = _perp_angles(model_template)

    peak_angles = np.empty((len(harmonics), len(t1_ratios)))
    classes = np.empty(peak_angles.shape, dtype=object)
    perp_inter = np.empty(peak_angles.shape)
    perp_mol = np.empty(peak_angles.shape)

    for k, ratio in enumerate(t1_ratios):
        model, pulse = _sweep_point(model_template, pulse_template, ratio,
                                    photon_fraction, freeze_omega0)
        scan = polar_scan(model, pulse, phis, engine, harmonics, jobs=jobs)
        tab_inter, tab_mol = _run_tasks(
            [(model, replace(pulse, phi=phi_perp_inter), engine, harmonics),
             (model, replace(pulse, phi=phi_perp_mol), engine, harmonics)],
            jobs=1)
        for i, n in enumerate(harmonics):
            peak_angles[i, k] = scan.peak_angle[n]
            classes[i, k] = classify_angle(scan.peak_angle[n],
                                           model.alpha_mol, model.alpha_inter)
            perp_inter[i, k] = tab_inter[n]
            perp_mol[i, k] = tab_mol[n]

    flip_threshold = {}
    crossings = {}
    for i, n in enumerate(harmonics):
        flip_threshold[n] = _refine_flip(
            model_template, pulse_template, t1_ratios, classes[i], n, engine,
            phis, photon_fraction, freeze_omega0, jobs, refine_iters)
        crossings[n] = _refine_crossing(
            model_template, pulse_template, t1_ratios,
            perp_mol[i], perp_inter[i], n, engine,
            (phi_perp_inter, phi_perp_mol),
            photon_fraction, freeze_omega0, refine_iters)

    return CouplingSweep(t1_ratios=t1_ratios, harmonics=harmonics,
                         peak_angles=peak_angles, classes=classes,
                         flip_threshold=flip_threshold,
                         perp_inter=perp_inter, perp_mol=perp_mol,
                         crossings=crossings, engine=engine)


def _classify_at(model_template, pulse_template, ratio, n, engine, phis,
                 photon_fraction, freeze_omega0, jobs):
    model, pulse = _sweep_point(model_template, pulse_template, ratio,
                                photon_fraction, freeze_omega0)
    scan = polar_scan(model, pulse, phis, engine, (n,), jobs=jobs)
    return classify_angle(scan.peak_angle[n], model.alpha_mol, model.alpha_inter)


def _refine_flip(model_template, pulse_template, t1_ratios, classes, n, engine,
                 phis, photon_fraction, freeze_omega0, jobs, refine_iters):
    """Smallest |t1/t0| whose peak angle classifies as intermolecular,
    bisected between the bracketing grid points (log scale)."""
    hits = np.nonzero(classes == "intermolecular")[0]
    if len(hits) == 0:
        return None
    k = int(hits[0])
    if k == 0:
        return float(t1_ratios[0])
    lo, hi = math.log10(t1_ratios[k - 1]), math.log10(t1_ratios[k])
    for _ in range(refine_iters):
        mid = 0.5 * (lo + hi)
        cls = _classify_at(model_template, pulse_template, 10.0**mid, n,
                           engine, phis, photon_fraction, freeze_omega0, jobs)
        if cls == "intermolecular":
            hi = mid
        else:
            lo = mid
    return float(10.0**hi)


def _refine_crossing(model_template, pulse_template, t1_ratios, curve_mol,
                     curve_inter, n, engine, perp_phis, photon_fraction,
                     freeze_omega0, refine_iters):
    """First |t1/t0| where the perpendicular-to-molecular curve exceeds the
    perpendicular-to-intermolecular one, bisected on the sign of the
    log-intensity difference."""
    above = curve_mol > curve_inter
    hits = np.nonzero(above)[0]
    if len(hits) == 0:
        return None
    k = int(hits[0])
    if k == 0:
        return float(t1_ratios[0])
    phi_inter, phi_mol = perp_phis

    def diff(ratio):
        model, pulse = _sweep_point(model_template, pulse_template, ratio,
                                    photon_fraction, freeze_omega0)
        tab_i = harmonic_intensities(model, replace(pulse, phi=phi_inter),
                                     engine, (n,))
        tab_m = harmonic_intensities(model, replace(pulse, phi=phi_mol),
                                     engine, (n,))
        return tab_m[n] - tab_i[n]

    lo, hi = math.log10(t1_ratios[k - 1]), math.log10(t1_ratios[k])
    for _ in range(refine_iters):
        mid = 0.5 * (lo + hi)
        if diff(10.0**mid) > 0:
            hi = mid
        else:
            lo = mid
    return float(10.0**hi)


def scaling_exponent(sweep: CouplingSweep, n: int, fit_range=(1e-3, 1e-2),
                     curve: str = "perp_mol") -> float:
    """Least-squares slope of log I_n versus log |t1| on the chosen
    perpendicular-polarization curve."""
    i = sweep.harmonics.index(n)
    values = {"perp_mol": sweep.perp_mol, "perp_inter": sweep.perp_inter}[curve][i]
    mask = (sweep.t1_ratios >= fit_range[0]) & (sweep.t1_ratios <= fit_range[1])
    if np.count_nonzero(mask) < 4:
        raise ValueError("fit range selects fewer than 4 sweep points")
    slope = np.polyfit(np.log10(sweep.t1_ratios[mask]),
                       np.log10(values[mask]), 1)[0]
    return float(slope)


@dataclass(frozen=True)
class SpacingStats:
    log_gaps: np.ndarray  # consecutive-order log10 intensity gaps at reference t1
    gap_mean: float
    gap_spread: float
    crossing_log_gaps: np.ndarray  # log10 gaps between consecutive crossings
    crossing_gap_mean: float
    crossing_gap_spread: float


def equal_spacing_check(sweep: CouplingSweep, reference_ratio: float = 0.02) -> SpacingStats:
    """Regularity statistics: log-intensity ladder of the perpendicular-to-
    intermolecular curve at a reference coupling, and log-t1 gaps between
    consecutive harmonics' crossing points."""
    k = int(np.argmin(np.abs(np.log10(sweep.t1_ratios) - math.log10(reference_ratio))))
    logs = np.log10(sweep.perp_inter[:, k])
    gaps = -np.diff(logs)  # positive when intensities are ordered descending
    cross = [sweep.crossings[n] for n in sweep.harmonics
             if sweep.crossings.get(n) is not None]
    cross_gaps = -np.diff(np.log10(cross)) if len(cross) >= 2 else np.array([])
    return SpacingStats(
        log_gaps=gaps,
        gap_mean=float(np.mean(gaps)) if gaps.size else 0.0,
        gap_spread=float(np.std(gaps)) if gaps.size else 0.0,
        crossing_log_gaps=cross_gaps,
        crossing_gap_mean=float(np.mean(cross_gaps)) if cross_gaps.size else 0.0,
        crossing_gap_spread=float(np.std(cross_gaps)) if cross_gaps.size else 0.0,
    )

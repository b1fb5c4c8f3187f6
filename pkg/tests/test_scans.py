import numpy as np
import pytest

from dimerhhg.laser import PulseSpec
from dimerhhg.model import ModelSpec
from dimerhhg.scans import (
    CouplingSweep,
    classify_angle,
    coupling_sweep,
    default_phi_grid,
    equal_spacing_check,
    harmonic_intensities,
    lobe_width,
    log_grid,
    polar_scan,
    position_series,
    scaling_exponent,
)

MODEL = ModelSpec()
# dt=0.1 is plenty for peak-angle and classification work and twice as fast
PULSE = PulseSpec(dt=0.1)


def test_position_series_engines():
    pulse = PulseSpec(dt=0.1, n_cyc=3, phi=30.0)
    for engine in ("exact", "adia-intra", "adia-inter"):
        series = position_series(MODEL, pulse, engine)
        assert series.shape == (pulse.n_steps + 1, 2)
        assert np.isfinite(series).all()
    with pytest.raises(ValueError):
        position_series(MODEL, pulse, "semiclassical")


def test_harmonic_intensities_returns_requested_orders():
    table = harmonic_intensities(MODEL, PULSE, "exact", (1, 3, 5))
    assert sorted(table) == [1, 3, 5]
    assert all(v > 0 for v in table.values())


def test_default_phi_grid():
    grid = default_phi_grid(2.0)
    assert grid[0] == 0.0
    assert grid[-1] == 178.0
    assert len(grid) == 90


@pytest.fixture(scope="module")
def coarse_scan():
    return polar_scan(MODEL, PULSE, default_phi_grid(5.0), harmonics=(1, 3, 15))


def test_polar_scan_shapes(coarse_scan):
    assert coarse_scan.intensities.shape == (3, 36)
    assert coarse_scan.normalized.max() == 1.0
    assert coarse_scan.engine == "exact"


def test_polar_scan_peak_angles(coarse_scan):
    # low orders peak along the molecular axes, the highest near the
    # intermolecular axis
    assert coarse_scan.peak_angle[1] == pytest.approx(90.0, abs=3.0)
    assert coarse_scan.peak_angle[3] == pytest.approx(90.0, abs=3.0)
    assert coarse_scan.peak_angle[15] == pytest.approx(20.0, abs=3.0)


def test_polar_scan_parallel_matches_serial(coarse_scan):
    parallel = polar_scan(MODEL, PULSE, default_phi_grid(5.0),
                          harmonics=(1, 3, 15), jobs=2)
    assert np.array_equal(parallel.intensities, coarse_scan.intensities)
    assert parallel.peak_angle == coarse_scan.peak_angle


def test_lobe_width_narrows_with_order(coarse_scan):
    w1 = lobe_width(coarse_scan, 1)
    w3 = lobe_width(coarse_scan, 3)
    assert 0 < w3 < w1 <= 180.0


def test_refinement_stays_within_one_grid_step(coarse_scan):
    grid = default_phi_grid(5.0)
    for n, angle in coarse_scan.peak_angle.items():
        nearest = np.min(np.abs((grid - angle + 90) % 180 - 90))
        assert nearest <= 5.0 + 1e-9


def test_classify_angle():
    assert classify_angle(88.0, 90.0, 20.0) == "molecular"
    assert classify_angle(25.0, 90.0, 20.0) == "intermolecular"
    assert classify_angle(55.0, 90.0, 20.0) == "unclassified"
    # axes compare modulo 180
    assert classify_angle(178.0, 90.0, 5.0) == "intermolecular"


def test_log_grid():
    grid = log_grid(1e-3, 1e-1, 5)
    assert len(grid) == 11
    assert grid[0] == pytest.approx(1e-3)
    assert grid[-1] == pytest.approx(1e-1)
    assert np.all(np.diff(np.log10(grid)) > 0)
    with pytest.raises(ValueError):
        log_grid(0.0, 1e-1)
    with pytest.raises(ValueError):
        log_grid(1e-1, 1e-3)


def test_coupling_sweep_rejects_bad_grid():
    with pytest.raises(ValueError):
        coupling_sweep(MODEL, PULSE, t1_ratios=[0.5, 1.5])


@pytest.fixture(scope="module")
def small_sweep():
    return coupling_sweep(
        MODEL, PULSE, t1_ratios=log_grid(5e-3, 5e-2, 2),
        phis=default_phi_grid(10.0), harmonics=(3, 15), refine_iters=2)


def test_coupling_sweep_shapes(small_sweep):
    n_pts = len(small_sweep.t1_ratios)
    assert small_sweep.peak_angles.shape == (2, n_pts)
    assert small_sweep.perp_inter.shape == (2, n_pts)
    assert set(np.unique(small_sweep.classes)) <= {
        "molecular", "intermolecular", "unclassified"}


def test_coupling_sweep_flip_and_crossing(small_sweep):
    # over this range H15 flips to intermolecular while H3 stays molecular
    assert small_sweep.flip_threshold[3] is None
    threshold = small_sweep.flip_threshold[15]
    assert threshold is not None
    # H15 is intermolecular from the very first grid point here, so the
    # reported threshold clamps to the grid start
    assert threshold == pytest.approx(5e-3, rel=1e-12)
    crossing = small_sweep.crossings[15]
    assert crossing is not None and crossing <= threshold * 3


def test_scaling_exponent_on_synthetic_sweep():
    ratios = np.logspace(-3, -2, 6)
    mol = np.stack([1e-5 * ratios**4])
    inter = np.stack([2e-3 * np.ones_like(ratios)])
    sweep = CouplingSweep(
        t1_ratios=ratios, harmonics=(3,),
        peak_angles=np.zeros((1, 6)), classes=np.full((1, 6), "molecular"),
        flip_threshold={3: None}, perp_inter=inter, perp_mol=mol,
        crossings={3: None}, engine="exact")
    assert scaling_exponent(sweep, 3, curve="perp_mol") == pytest.approx(4.0, abs=1e-9)
    assert scaling_exponent(sweep, 3, curve="perp_inter") == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        scaling_exponent(sweep, 3, fit_range=(1e-3, 1.5e-3))


def test_equal_spacing_check_on_synthetic_sweep():
    ratios = np.logspace(-3, -1, 9)
    harmonics = (1, 3, 5)
    # intensities one decade apart, crossings half a decade apart
    inter = np.stack([10.0**(-n) * np.ones_like(ratios) for n in (1, 2, 3)])
    sweep = CouplingSweep(
        t1_ratios=ratios, harmonics=harmonics,
        peak_angles=np.zeros((3, 9)), classes=np.full((3, 9), "molecular"),
        flip_threshold=dict.fromkeys(harmonics),
        perp_inter=inter, perp_mol=inter,
        crossings={1: 1e-1, 3: 10**-1.5, 5: 1e-2}, engine="exact")
    stats = equal_spacing_check(sweep, reference_ratio=0.02)
    assert stats.gap_mean == pytest.approx(1.0, abs=1e-9)
    assert stats.gap_spread == pytest.approx(0.0, abs=1e-9)
    assert stats.crossing_gap_mean == pytest.approx(0.5, abs=1e-9)
    assert stats.crossing_gap_spread == pytest.approx(0.0, abs=1e-9)

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimerhhg.model import (
    ModelSpec,
    build_geometry,
    build_h0,
    dipole_direction,
    dipole_t1_expansion_check,
    eigenvalues_closed_form,
    model_summary,
    solve_static,
    transition_dipole,
)

DEFAULT = ModelSpec()


def test_default_geometry_matches_hand_computation():
    geo = build_geometry(DEFAULT)
    ai = np.radians(20.0)
    center = 4.6 * np.array([np.cos(ai), np.sin(ai)])
    offset = np.array([0.0, 2.75])
    assert np.allclose(geo.sites[0], -center - offset, atol=1e-12)
    assert np.allclose(geo.sites[1], -center + offset, atol=1e-12)
    # the numbers themselves, for the default model
    assert np.allclose(geo.sites[1], [-4.322595, 1.176709], atol=1e-5)


def test_geometry_is_inversion_symmetric():
    geo = build_geometry(DEFAULT)
    assert np.array_equal(geo.sites[3], -geo.sites[0])
    assert np.array_equal(geo.sites[2], -geo.sites[1])


def test_sites_1_2_are_closest_cross_pair():
    geo = build_geometry(DEFAULT)
    cross = {(i, j): np.linalg.norm(geo.sites[i] - geo.sites[j])
             for i in (0, 1) for j in (2, 3)}
    assert min(cross, key=cross.get) == (1, 2)


@given(alpha_mol=st.floats(0.0, 180.0), alpha_inter=st.floats(0.0, 180.0),
       d=st.floats(0.5, 50.0), l=st.floats(0.5, 50.0))
@settings(max_examples=50, deadline=None)
def test_closest_pair_property_holds_for_any_angles(alpha_mol, alpha_inter, d, l):
    geo = build_geometry(ModelSpec(alpha_mol=alpha_mol, alpha_inter=alpha_inter,
                                   d=d, l=l))
    d12 = np.linalg.norm(geo.sites[1] - geo.sites[2])
    d03 = np.linalg.norm(geo.sites[0] - geo.sites[3])
    assert d12 <= d03 + 1e-9
    assert np.allclose(geo.sites[2], -geo.sites[1], atol=1e-12)


def test_invalid_lengths_rejected():
    with pytest.raises(ValueError):
        ModelSpec(l=0.0)
    with pytest.raises(ValueError):
        ModelSpec(d=-1.0)


def test_h0_structure():
    h0 = build_h0(DEFAULT)
    assert h0.shape == (4, 4)
    assert np.array_equal(h0, h0.T)
    assert h0[0, 1] == h0[2, 3] == -1.0
    assert h0[1, 2] == -0.02
    assert h0[0, 2] == h0[0, 3] == h0[1, 3] == 0.0
    assert np.all(np.diag(h0) == 0.0)


def test_eigenvalues_match_closed_form():
    eig = solve_static(build_h0(DEFAULT))
    expected = eigenvalues_closed_form(-1.0, -0.02)
    assert np.max(np.abs(eig.energies - expected)) < 1e-12


def test_gap_value():
    eig = solve_static(build_h0(DEFAULT))
    assert eig.gap == pytest.approx(np.sqrt(0.02**2 + 4.0) - 0.02, abs=1e-12)
    assert eig.gap == pytest.approx(1.9801, abs=1e-4)


def test_eigenvectors_orthonormal_and_deterministic():
    h0 = build_h0(DEFAULT)
    eig1 = solve_static(h0)
    eig2 = solve_static(h0)
    assert np.allclose(eig1.states.T @ eig1.states, np.eye(4), atol=1e-12)
    assert np.array_equal(eig1.states, eig2.states)
    assert np.array_equal(eig1.energies, eig2.energies)


@given(t0=st.floats(-3.0, -0.1), t1=st.floats(-1.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_closed_form_eigenvalues_property(t0, t1):
    spec = ModelSpec(t0=t0, t1=t1)
    eig = solve_static(build_h0(spec))
    assert np.max(np.abs(eig.energies - eigenvalues_closed_form(t0, t1))) < 1e-10


def test_parity_alternates_for_default_model():
    # eigenvectors of the inversion-symmetric chain alternate under the
    # site-reversal operation (v_i -> v_{3-i})
    eig = solve_static(build_h0(DEFAULT))
    for n, parity in enumerate((1.0, -1.0, 1.0, -1.0)):
        v = eig.states[:, n]
        assert np.allclose(v[::-1], parity * v, atol=1e-10)


def test_transition_dipole_directions():
    geo = build_geometry(DEFAULT)
    eig = solve_static(build_h0(DEFAULT))
    low = dipole_direction(transition_dipole(eig, geo, 0, 1))
    high = dipole_direction(transition_dipole(eig, geo, 1, 2))
    assert low == pytest.approx(20.0, abs=0.5)
    assert abs(high) == pytest.approx(90.0, abs=1.0)


def test_transition_dipole_symmetric_in_indices():
    geo = build_geometry(DEFAULT)
    eig = solve_static(build_h0(DEFAULT))
    assert np.allclose(transition_dipole(eig, geo, 0, 3),
                       transition_dipole(eig, geo, 3, 0), atol=1e-14)
    with pytest.raises(ValueError):
        transition_dipole(eig, geo, 1, 1)


def test_parity_forbidden_dipoles_vanish():
    # same-parity levels have zero dipole in an inversion-symmetric target
    geo = build_geometry(DEFAULT)
    eig = solve_static(build_h0(DEFAULT))
    assert np.linalg.norm(transition_dipole(eig, geo, 0, 2)) < 1e-12
    assert np.linalg.norm(transition_dipole(eig, geo, 1, 3)) < 1e-12


def test_dipole_direction_axis_convention():
    assert dipole_direction(np.array([1.0, 0.0])) == 0.0
    assert dipole_direction(np.array([-1.0, 0.0])) == 0.0
    assert dipole_direction(np.array([0.0, -2.0])) == 90.0
    assert dipole_direction(np.array([1.0, 1.0])) == pytest.approx(45.0)


def test_intramolecular_dipole_t1_dependence_is_quadratic():
    order = dipole_t1_expansion_check(DEFAULT, 0, 1)
    assert order == pytest.approx(2.0, abs=0.1)


def test_model_summary_is_json_serializable():
    summary = model_summary(DEFAULT)
    parsed = json.loads(json.dumps(summary))
    assert parsed["gap"] == pytest.approx(1.9801, abs=1e-4)
    assert np.array(parsed["sites"]).shape == (4, 2)

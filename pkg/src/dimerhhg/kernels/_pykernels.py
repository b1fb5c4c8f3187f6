"""Pure-numpy reference implementations of the hot kernels.

Semantics must match dimerhhg.kernels._ckernels exactly; the test suite
cross-checks both backends against each other.
"""

import numpy as np


def eigh_sym(a):
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending.

    Returns (w, v) with v[:, k] the k-th eigenvector.  No sign convention
    is applied here; callers fix the gauge.
    """
    a = np.asarray(a, dtype=float)
    return np.linalg.eigh(a)


def propagate_states(psi0, exp_h0_half, coords, efield_mid, dt):
    """Split-operator propagation of a block of state vectors.

    psi0:        (n_sites, n_orb) complex initial states
    exp_h0_half: (n_sites, n_sites) complex, exp(-i H0 dt/2)
    coords:      (n_sites, 2) site positions
    efield_mid:  (n_steps, 2) electric field at the step midpoints
    dt:          time step

    Returns the full history, shape (n_steps + 1, n_sites, n_orb).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    exp_h0_half = np.asarray(exp_h0_half, dtype=complex)
    coords = np.asarray(coords, dtype=float)
    efield_mid = np.asarray(efield_mid, dtype=float)
    n_steps = efield_mid.shape[0]

    history = np.empty((n_steps + 1,) + psi0.shape, dtype=complex)
    history[0] = psi0
    psi = psi0.copy()
    # site-energy per unit field, precomputed: phase_k = x_k E_x + y_k E_y
    site_dot = efield_mid @ coords.T  # (n_steps, n_sites)
    for k in range(n_steps):
        psi = exp_h0_half @ psi
        psi *= np.exp(-1j * dt * site_dot[k])[:, None]
        psi = exp_h0_half @ psi
        history[k + 1] = psi
    return history


def instantaneous_frames(h0, coords, efield, first_signs=None):
    """Instantaneous eigensystem along a field sample sequence.

    h0:     (n, n) static Hamiltonian (real symmetric)
    coords: (n, 2) site positions
    efield: (n_t, 2) field samples
    first_signs: optional (n, n) reference frame; the first frame is
        gauge-fixed against it.  If None, the first frame gets the
        largest-|component|-positive convention.

    Returns (energies, vectors): (n_t, n) ascending and (n_t, n, n) with
    vectors[t][:, k] the k-th eigenvector, gauge-chained so that
    consecutive same-index vectors have positive overlap.
    """
    h0 = np.asarray(h0, dtype=float)
    coords = np.asarray(coords, dtype=float)
    efield = np.asarray(efield, dtype=float)
    n = h0.shape[0]
    n_t = efield.shape[0]

    site_dot = efield @ coords.T  # (n_t, n)
    hams = np.broadcast_to(h0, (n_t, n, n)).copy()
    idx = np.arange(n)
    hams[:, idx, idx] += site_dot

    energies, vectors = np.linalg.eigh(hams)

    # gauge chain: flip signs so consecutive overlaps stay positive
    if first_signs is None:
        lead = np.argmax(np.abs(vectors[0]), axis=0)
        signs = np.sign(vectors[0][lead, idx])
    else:
        signs = np.sign(np.einsum("ik,ik->k", np.asarray(first_signs), vectors[0]))
    signs[signs == 0] = 1.0
    vectors[0] *= signs

    overlaps = np.einsum("tik,tik->tk", vectors[:-1], vectors[1:])
    flips = np.where(overlaps < 0, -1.0, 1.0)
    cum = np.cumprod(flips, axis=0)
    vectors[1:] *= cum[:, None, :]
    return energies, vectors

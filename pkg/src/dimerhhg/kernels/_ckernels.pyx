# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: split-operator stepping and instantaneous
eigensystems via cyclic Jacobi rotations.

API mirrors dimerhhg.kernels._pykernels.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt, cos, sin

cnp.import_array()


cdef void _jacobi(double[:, :] a, double[:] w, double[:, :] v, int n) noexcept nogil:
    """Cyclic Jacobi on a working copy `a`; eigenvalues into w (unsorted),
    accumulated rotations into v (columns are eigenvectors)."""
    cdef int p, q, i, sweep
    cdef double off, app, aqq, apq, theta, t, c, s, tau, aip, aiq, vip, viq
    cdef double scale = 0.0

    for p in range(n):
        for q in range(n):
            v[p, q] = 1.0 if p == q else 0.0
            scale += a[p, q] * a[p, q]
    if scale < 1.0:
        scale = 1.0

    for sweep in range(64):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if off < 1e-32 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if fabs(apq) < 1e-300:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = 0.5 * (aqq - app) / apq
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = aip - s * (aiq + tau * aip)
                        a[i, q] = aiq + s * (aip - tau * aiq)
                        a[p, i] = a[i, p]
                        a[q, i] = a[i, q]
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = vip - s * (viq + tau * vip)
                    v[i, q] = viq + s * (vip - tau * viq)
    for p in range(n):
        w[p] = a[p, p]


cdef void _sort_ascending(double[:] w, double[:, :] v, int n) noexcept nogil:
    cdef int i, j, k
    cdef double tmp
    for i in range(n - 1):
        k = i
        for j in range(i + 1, n):
            if w[j] < w[k]:
                k = j
        if k != i:
            tmp = w[i]; w[i] = w[k]; w[k] = tmp
            for j in range(n):
                tmp = v[j, i]; v[j, i] = v[j, k]; v[j, k] = tmp


def eigh_sym(a):
    """Jacobi eigendecomposition of a real symmetric matrix, ascending."""
    cdef cnp.ndarray[double, ndim=2] work = np.array(a, dtype=np.float64, order="C")
    cdef int n = work.shape[0]
    cdef cnp.ndarray[double, ndim=1] w = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] v = np.empty((n, n), dtype=np.float64)
    _jacobi(work, w, v, n)
    _sort_ascending(w, v, n)
    return w, v


def propagate_states(psi0, exp_h0_half, coords, efield_mid, double dt):
    """Split-operator propagation; see _pykernels.propagate_states."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] psi = \
        np.array(psi0, dtype=np.complex128, order="C")
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] u = \
        np.array(exp_h0_half, dtype=np.complex128, order="C")
    cdef cnp.ndarray[double, ndim=2] xy = \
        np.array(coords, dtype=np.float64, order="C")
    cdef cnp.ndarray[double, ndim=2] ef = \
        np.array(efield_mid, dtype=np.float64, order="C")

    cdef int n = psi.shape[0]
    cdef int m = psi.shape[1]
    cdef int n_steps = ef.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] hist = \
        np.empty((n_steps + 1, n, m), dtype=np.complex128)

    cdef double complex[:, :] p = psi
    cdef double complex[:, :] uu = u
    cdef double complex[:, :, :] h = hist
    cdef double[:, :] c = xy
    cdef double[:, :] e = ef

    cdef int k, i, j, o
    cdef double phase
    cdef double complex acc
    cdef double complex[4][8] tmp  # scratch, n<=4, m<=8

    if n > 4 or m > 8:
        raise ValueError("kernel compiled for n_sites<=4, n_orb<=8")

    with nogil:
        for o in range(m):
            for i in range(n):
                h[0, i, o] = p[i, o]
        for k in range(n_steps):
            # half step in H0
            for o in range(m):
                for i in range(n):
                    acc = 0
                    for j in range(n):
                        acc = acc + uu[i, j] * p[j, o]
                    tmp[i][o] = acc
            # full diagonal laser step
            for i in range(n):
                phase = -dt * (e[k, 0] * c[i, 0] + e[k, 1] * c[i, 1])
                for o in range(m):
                    tmp[i][o] = tmp[i][o] * (cos(phase) + 1j * sin(phase))
            # second half step in H0
            for o in range(m):
                for i in range(n):
                    acc = 0
                    for j in range(n):
                        acc = acc + uu[i, j] * tmp[j][o]
                    p[i, o] = acc
                    h[k + 1, i, o] = acc
    return hist


def instantaneous_frames(h0, coords, efield, first_signs=None):
    """Instantaneous eigensystems along a field sequence; see _pykernels."""
    cdef cnp.ndarray[double, ndim=2] h = \
        np.array(h0, dtype=np.float64, order="C")
    cdef cnp.ndarray[double, ndim=2] xy = \
        np.array(coords, dtype=np.float64, order="C")
    cdef cnp.ndarray[double, ndim=2] ef = \
        np.array(efield, dtype=np.float64, order="C")
    cdef int n = h.shape[0]
    cdef int n_t = ef.shape[0]

    cdef cnp.ndarray[double, ndim=2] energies = np.empty((n_t, n), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=3] vectors = np.empty((n_t, n, n), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] work = np.empty((n, n), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] ref

    if first_signs is not None:
        ref = np.array(first_signs, dtype=np.float64, order="C")
    else:
        ref = np.empty((0, 0), dtype=np.float64)

    cdef double[:, :] en = energies
    cdef double[:, :, :] vec = vectors
    cdef double[:, :] wk = work
    cdef double[:, :] hh = h
    cdef double[:, :] c = xy
    cdef double[:, :] e = ef
    cdef double[:, :] rf = ref
    cdef bint have_ref = first_signs is not None

    cdef int t, i, j, k, lead
    cdef double ov, best

    with nogil:
        for t in range(n_t):
            for i in range(n):
                for j in range(n):
                    wk[i, j] = hh[i, j]
                wk[i, i] += e[t, 0] * c[i, 0] + e[t, 1] * c[i, 1]
            _jacobi(wk, en[t], vec[t], n)
            _sort_ascending(en[t], vec[t], n)
            # gauge fix against the previous frame (or the reference/lead rule)
            for k in range(n):
                ov = 0.0
                if t > 0:
                    for i in range(n):
                        ov += vec[t - 1, i, k] * vec[t, i, k]
                elif have_ref:
                    for i in range(n):
                        ov += rf[i, k] * vec[t, i, k]
                else:
                    lead = 0
                    best = fabs(vec[t, 0, k])
                    for i in range(1, n):
                        if fabs(vec[t, i, k]) > best:
                            best = fabs(vec[t, i, k])
                            lead = i
                    ov = vec[t, lead, k]
                if ov < 0.0:
                    for i in range(n):
                        vec[t, i, k] = -vec[t, i, k]
    return energies, vectors

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the statevector gate kernel and the Jacobi eigensolver."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def apply_unitary(state, int n, targets, u):
    """Apply ``u`` to ``targets`` of an ``n``-qubit vector (qubit 0 = MSB)."""
    cdef const double complex[::1] psi = np.ascontiguousarray(state, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(u, dtype=np.complex128)
    cdef const Py_ssize_t[::1] tq = np.ascontiguousarray(targets, dtype=np.intp)
    cdef Py_ssize_t k = tq.shape[0]
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t sub = 1 << k
    out_arr = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t[::1] offs = np.zeros(sub, dtype=np.intp)
    cdef double complex[::1] buf = np.empty(sub, dtype=np.complex128)
    cdef Py_ssize_t mask = 0, r, c, j, bit, base
    cdef double complex acc
    for j in range(k):
        mask |= (<Py_ssize_t>1) << (n - 1 - tq[j])
    for r in range(sub):
        for j in range(k):
            if (r >> (k - 1 - j)) & 1:
                offs[r] += (<Py_ssize_t>1) << (n - 1 - tq[j])
    for base in range(dim):
        if base & mask:
            continue
        for c in range(sub):
            buf[c] = psi[base + offs[c]]
        for r in range(sub):
            acc = 0
            for c in range(sub):
                acc = acc + m[r, c] * buf[c]
            out[base + offs[r]] = acc
    return out_arr


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def jacobi_eigh(a, double tol=1e-15, int max_sweeps=100):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ``a @ v[:, i] == w[i] * v[:, i]``, ``w`` ascending.
    """
    arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] A = arr
    cdef Py_ssize_t dim = A.shape[0]
    v_arr = np.eye(dim, dtype=np.complex128)
    cdef double complex[:, ::1] V = v_arr
    cdef Py_ssize_t p, q, i, sweep
    cdef double scale = 0, off, mag, app, aqq, theta, t, c, s
    cdef double complex phase, pc, xp, xq
    for p in range(dim):
        for q in range(dim):
            scale += cabs2(A[p, q])
    scale = sqrt(scale)
    if scale < 1e-300:
        scale = 1e-300
    for sweep in range(max_sweeps):
        off = 0
        for p in range(dim):
            for q in range(dim):
                if p != q:
                    off += cabs2(A[p, q])
        if sqrt(off) <= tol * scale:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                mag = sqrt(cabs2(A[p, q]))
                if mag <= 1e-300:
                    continue
                phase = A[p, q] / mag
                pc = phase.conjugate()
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if theta >= 0:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for i in range(dim):
                    xp = A[i, p]
                    xq = A[i, q]
                    A[i, p] = c * xp - s * pc * xq
                    A[i, q] = s * xp + c * pc * xq
                for i in range(dim):
                    xp = A[p, i]
                    xq = A[q, i]
                    A[p, i] = c * xp - s * phase * xq
                    A[q, i] = s * xp + c * phase * xq
                A[p, q] = 0
                A[q, p] = 0
                for i in range(dim):
                    xp = V[i, p]
                    xq = V[i, q]
                    V[i, p] = c * xp - s * pc * xq
                    V[i, q] = s * xp + c * pc * xq
    w = np.real(np.diag(arr)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v_arr[:, order]

"""Pure numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is unavailable or ``DISCOPILE_PURE_PYTHON`` is set.
"""
from __future__ import annotations

import math

import numpy as np


def apply_unitary(state: np.ndarray, n: int, targets, u: np.ndarray) -> np.ndarray:
    """Apply ``u`` to ``targets`` of an ``n``-qubit vector (qubit 0 = MSB)."""
    targets = [int(t) for t in targets]
    k = len(targets)
    psi = state.reshape((2,) * n)
    psi = np.moveaxis(psi, targets, range(k))
    shape = psi.shape
    out = u.reshape(2 ** k, 2 ** k) @ psi.reshape(2 ** k, -1)
    out = np.moveaxis(out.reshape(shape), range(k), targets)
    return np.ascontiguousarray(out).reshape(-1)


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, v)`` with ``a @ v[:, i] == w[i] * v[:, i]``, ``w`` ascending.
    """
    a = np.array(a, dtype=complex, copy=True)
    dim = a.shape[0]
    v = np.eye(dim, dtype=complex)
    scale = max(float(np.sqrt(np.sum(np.abs(a) ** 2))), 1e-300)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(np.abs(a - np.diag(np.diag(a))) ** 2)))
        if off <= tol * scale:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                pc = phase.conjugate()
                # columns: A <- A J
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * pc * colq
                a[:, q] = s * colp + c * pc * colq
                # rows: A <- J^H A
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * phase * rowq
                a[q, :] = s * rowp + c * phase * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * pc * vq
                v[:, q] = s * vp + c * pc * vq
    w = np.real(np.diag(a)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]

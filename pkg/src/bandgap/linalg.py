"""Dense symmetric eigensolver: cyclic Jacobi rotations.

Kept in-repo so the plane-wave band solver does not lean on an external
eigensolver for its verification role.  The kernel is numba-compiled; the
n ~ 256 matrices arising from n_basis = 128 solve in well under a second.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["jacobi_eigh", "ConvergenceError"]


class ConvergenceError(RuntimeError):
    """Eigensolve failed to reduce the off-diagonal norm in the sweep budget."""


@njit(cache=True)
def _jacobi_kernel(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    fro2 = 0.0
    for i in range(n):
        for j in range(n):
            fro2 += a[i, j] * a[i, j]
    thresh2 = (tol * tol) * fro2
    converged = False
    for _ in range(max_sweeps):
        off2 = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off2 += a[i, j] * a[i, j]
        if off2 <= thresh2:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = 1.0
                if theta != 0.0:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq
    return a, v, converged


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-15, max_sweeps: int = 40):
    """Eigendecomposition of a real symmetric matrix.

    Returns (w, V) with ascending eigenvalues and orthonormal columns,
    like numpy.linalg.eigh.  `tol` is relative to the Frobenius norm;
    quadratic convergence means the final off-diagonal mass is far below
    the stopping threshold.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("need a square matrix")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    d, v, ok = _jacobi_kernel(a, tol, max_sweeps)
    if not ok:
        raise ConvergenceError(f"jacobi_eigh: off-diagonal norm above tolerance after {max_sweeps} sweeps")
    w = np.diag(d).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]

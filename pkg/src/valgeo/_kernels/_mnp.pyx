# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled min-norm-point kernel (Wolfe's algorithm).

Mirrors ``pywolfe.py`` operation for operation; the Monte-Carlo membership
loops call this on ~1e5 points per estimate, which is why it is compiled.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_lapack cimport dgesv

cnp.import_array()

BACKEND = "cython"


cdef int _solve_bordered(double* gram, int k, double* a, double* rhs,
                         int* ipiv, double ridge) noexcept nogil:
    """Solve the (k+1) bordered system for the affine minimizer."""
    cdef int dim = k + 1
    cdef int i, j, nrhs = 1, info = 0
    for j in range(k):
        for i in range(k):
            a[i + j * dim] = gram[i * k + j]
        a[k + j * dim] = 1.0
        a[j + k * dim] = 1.0
    a[k + k * dim] = 0.0
    if ridge > 0.0:
        for i in range(k):
            a[i + i * dim] += ridge
    for i in range(k):
        rhs[i] = 0.0
    rhs[k] = 1.0
    dgesv(&dim, &nrhs, a, &dim, ipiv, rhs, &dim, &info)
    return info


cdef double _point_distance(const double* verts, int m, int n, const double* x0,
                            double* w, double* sq, double* x, double* lam,
                            double* alpha, double* gram, double* a, double* rhs,
                            int* ipiv, int* corral, int max_iter) noexcept nogil:
    cdef int i, j, t, k, jstar, drop, it, info, in_corral
    cdef double scale, tol, s, xx, best, theta, r, smin, lsum, tr

    scale = 0.0
    for j in range(m):
        s = 0.0
        for t in range(n):
            w[j * n + t] = verts[j * n + t] - x0[t]
            s += w[j * n + t] * w[j * n + t]
        sq[j] = s
        if s > scale:
            scale = s
    if scale == 0.0:
        return 0.0
    tol = 1e-12 * scale

    jstar = 0
    for j in range(1, m):
        if sq[j] < sq[jstar]:
            jstar = j
    corral[0] = jstar
    lam[0] = 1.0
    k = 1
    for t in range(n):
        x[t] = w[jstar * n + t]

    for it in range(max_iter):
        xx = 0.0
        for t in range(n):
            xx += x[t] * x[t]
        best = 0.0
        jstar = 0
        for j in range(m):
            s = 0.0
            for t in range(n):
                s += w[j * n + t] * x[t]
            if j == 0 or s < best:
                best = s
                jstar = j
        if xx - best <= tol:
            return sqrt(xx if xx > 0.0 else 0.0)
        in_corral = 0
        for i in range(k):
            if corral[i] == jstar:
                in_corral = 1
                break
        if in_corral:
            return sqrt(xx if xx > 0.0 else 0.0)
        corral[k] = jstar
        lam[k] = 0.0
        k += 1

        while True:
            tr = 0.0
            for i in range(k):
                for j in range(i, k):
                    s = 0.0
                    for t in range(n):
                        s += w[corral[i] * n + t] * w[corral[j] * n + t]
                    gram[i * k + j] = s
                    gram[j * k + i] = s
                tr += gram[i * k + i]
            info = _solve_bordered(gram, k, a, rhs, ipiv, 0.0)
            if info != 0:
                info = _solve_bordered(gram, k, a, rhs, ipiv,
                                       1e-12 * (tr if tr > 1.0 else 1.0) / k)
                if info != 0:
                    break
            for i in range(k):
                alpha[i] = rhs[i]
            smin = alpha[0]
            for i in range(1, k):
                if alpha[i] < smin:
                    smin = alpha[i]
            if smin > 1e-12:
                for i in range(k):
                    lam[i] = alpha[i]
                for t in range(n):
                    x[t] = 0.0
                for i in range(k):
                    for t in range(n):
                        x[t] += alpha[i] * w[corral[i] * n + t]
                break
            theta = 1.0
            for i in range(k):
                if alpha[i] <= 1e-12:
                    s = lam[i] - alpha[i]
                    if s > 0.0:
                        r = lam[i] / s
                        if r < theta:
                            theta = r
            if theta < 0.0:
                theta = 0.0
            for i in range(k):
                lam[i] = theta * alpha[i] + (1.0 - theta) * lam[i]
            drop = 0
            for i in range(1, k):
                if lam[i] < lam[drop]:
                    drop = i
            for i in range(drop, k - 1):
                corral[i] = corral[i + 1]
                lam[i] = lam[i + 1]
            k -= 1
            lsum = 0.0
            for i in range(k):
                lsum += lam[i]
            if k == 0 or lsum <= 0.0:
                corral[0] = jstar
                lam[0] = 1.0
                k = 1
                for t in range(n):
                    x[t] = w[jstar * n + t]
                break
            for i in range(k):
                lam[i] /= lsum

    xx = 0.0
    for t in range(n):
        xx += x[t] * x[t]
    return sqrt(xx if xx > 0.0 else 0.0)


def hull_distances(points, vertices, int max_iter=1000):
    """Euclidean distance from each row of ``points`` to conv(vertices)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(
        np.atleast_2d(np.asarray(points, dtype=np.float64)))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] verts = np.ascontiguousarray(
        np.asarray(vertices, dtype=np.float64))
    cdef int npts = pts.shape[0]
    cdef int m = verts.shape[0]
    cdef int n = verts.shape[1]
    if pts.shape[1] != n:
        raise ValueError("points and vertices have different dimensions")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(npts, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wbuf = np.empty(m * n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sqbuf = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xbuf = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lambuf = np.empty(m + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alphabuf = np.empty(m + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grambuf = np.empty((m + 1) * (m + 1), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] abuf = np.empty((m + 2) * (m + 2), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rhsbuf = np.empty(m + 2, dtype=np.float64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] ipivbuf = np.empty(m + 2, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] corralbuf = np.empty(m + 1, dtype=np.int32)
    cdef double* vp = &verts[0, 0]
    cdef double* pp = &pts[0, 0]
    cdef int i
    if m == 0:
        raise ValueError("empty vertex set")
    with nogil:
        for i in range(npts):
            out[i] = _point_distance(
                vp, m, n, pp + i * n,
                &wbuf[0], &sqbuf[0], &xbuf[0], &lambuf[0], &alphabuf[0],
                &grambuf[0], &abuf[0], &rhsbuf[0], <int*> &ipivbuf[0],
                <int*> &corralbuf[0], max_iter)
    return out

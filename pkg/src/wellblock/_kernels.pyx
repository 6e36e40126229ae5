# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled time-stepping kernels: repeated tridiagonal (Thomas) solves for
the implicit scheme and fused explicit-update loops.  A pure-Python/numpy
fallback with the same signatures lives in ``_kernels_py``; the backend is
selected at import time in ``_backend``.
"""

import numpy as np

BACKEND = "cython"


def tridiag_solve(double[::1] lower, double[::1] diag, double[::1] upper,
                  double[::1] rhs):
    """Solve one tridiagonal system; lower[0] and upper[n-1] are ignored.

    Returns the solution array, or raises ZeroDivisionError on a lost pivot
    (caller translates to SingularSystem).
    """
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i
    out = np.empty(n, dtype=np.float64)
    cp = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef double[::1] c = cp
    cdef double denom
    denom = diag[0]
    if denom == 0.0:
        raise ZeroDivisionError("zero pivot")
    c[0] = upper[0] / denom
    x[0] = rhs[0] / denom
    for i in range(1, n):
        denom = diag[i] - lower[i] * c[i - 1]
        if denom == 0.0:
            raise ZeroDivisionError("zero pivot")
        c[i] = upper[i] / denom
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - c[i] * x[i + 1]
    return out


def implicit_steps_1d(double[::1] lower, double[::1] diag, double[::1] upper,
                      double[::1] dvec, double[::1] svec, double[::1] p,
                      Py_ssize_t n_steps):
    """Advance p by n_steps of  M p_new = dvec * p_old + svec  in place.

    M is the constant tridiagonal (lower, diag, upper); the Thomas
    elimination coefficients are factored once and reused every step.
    """
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t i, step
    cp_arr = np.empty(n, dtype=np.float64)
    inv_arr = np.empty(n, dtype=np.float64)
    y_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] c = cp_arr
    cdef double[::1] inv = inv_arr
    cdef double[::1] y = y_arr
    cdef double denom
    denom = diag[0]
    if denom == 0.0:
        raise ZeroDivisionError("zero pivot")
    inv[0] = 1.0 / denom
    c[0] = upper[0] * inv[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * c[i - 1]
        if denom == 0.0:
            raise ZeroDivisionError("zero pivot")
        inv[i] = 1.0 / denom
        c[i] = upper[i] * inv[i]
    for step in range(n_steps):
        y[0] = (dvec[0] * p[0] + svec[0]) * inv[0]
        for i in range(1, n):
            y[i] = (dvec[i] * p[i] + svec[i] - lower[i] * y[i - 1]) * inv[i]
        p[n - 1] = y[n - 1]
        for i in range(n - 2, -1, -1):
            p[i] = y[i] - c[i] * p[i + 1]
    return np.asarray(p)


def explicit_steps_1d(double[::1] a_left, double[::1] a_right,
                      double[::1] src, double[::1] p, Py_ssize_t n_steps):
    """Advance p by n_steps of the explicit update, in place.

    p_i += a_left[i] (p_{i-1} - p_i) + a_right[i] (p_{i+1} - p_i) + src[i];
    boundary handling is encoded by zero coefficients.
    """
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t i, step
    buf = np.empty(n, dtype=np.float64)
    cdef double[::1] q = buf
    for step in range(n_steps):
        q[0] = p[0] + a_right[0] * (p[1] - p[0]) + src[0]
        for i in range(1, n - 1):
            q[i] = p[i] + a_left[i] * (p[i - 1] - p[i]) \
                 + a_right[i] * (p[i + 1] - p[i]) + src[i]
        q[n - 1] = p[n - 1] + a_left[n - 1] * (p[n - 2] - p[n - 1]) + src[n - 1]
        for i in range(n):
            p[i] = q[i]
    return np.asarray(p)


def explicit_steps_2d(double[:, ::1] a_n, double[:, ::1] a_s,
                      double[:, ::1] a_w, double[:, ::1] a_e,
                      double[:, ::1] src, double[:, ::1] p,
                      Py_ssize_t n_steps):
    """Five-point explicit update in place; out-of-range neighbours carry
    zero coefficients, Dirichlet nodes have all coefficients zero."""
    cdef Py_ssize_t nr = p.shape[0]
    cdef Py_ssize_t nc = p.shape[1]
    cdef Py_ssize_t i, j, step
    buf = np.empty((nr, nc), dtype=np.float64)
    cdef double[:, ::1] q = buf
    cdef double acc
    for step in range(n_steps):
        for i in range(nr):
            for j in range(nc):
                acc = p[i, j] + src[i, j]
                if i > 0:
                    acc += a_n[i, j] * (p[i - 1, j] - p[i, j])
                if i < nr - 1:
                    acc += a_s[i, j] * (p[i + 1, j] - p[i, j])
                if j > 0:
                    acc += a_w[i, j] * (p[i, j - 1] - p[i, j])
                if j < nc - 1:
                    acc += a_e[i, j] * (p[i, j + 1] - p[i, j])
                q[i, j] = acc
        for i in range(nr):
            for j in range(nc):
                p[i, j] = q[i, j]
    return np.asarray(p)

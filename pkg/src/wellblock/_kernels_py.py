"""Pure-Python/numpy fallback for the stepping kernels.

Same signatures as the compiled module; the implicit path uses LAPACK's
banded solver through scipy.  Selected automatically when the extension is
unavailable, or forced with WELLBLOCK_PURE_PYTHON=1.
"""

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "python"


def tridiag_solve(lower, diag, upper, rhs):
    if np.any(diag == 0.0):
        raise ZeroDivisionError("zero pivot")
    # solve_banded wants the diagonals stacked with shifted offsets
    ab = np.zeros((3, len(diag)))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    return solve_banded((1, 1), ab, rhs)


def implicit_steps_1d(lower, diag, upper, dvec, svec, p, n_steps):
    n = len(diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    if np.any(diag == 0.0):
        raise ZeroDivisionError("zero pivot")
    for _ in range(n_steps):
        p[:] = solve_banded((1, 1), ab, dvec * p + svec)
    return p


def explicit_steps_1d(a_left, a_right, src, p, n_steps):
    for _ in range(n_steps):
        q = p + src
        q[:-1] += a_right[:-1] * (p[1:] - p[:-1])
        q[1:] += a_left[1:] * (p[:-1] - p[1:])
        p[:] = q
    return p


def explicit_steps_2d(a_n, a_s, a_w, a_e, src, p, n_steps):
    for _ in range(n_steps):
        q = p + src
        q[1:, :] += a_n[1:, :] * (p[:-1, :] - p[1:, :])
        q[:-1, :] += a_s[:-1, :] * (p[1:, :] - p[:-1, :])
        q[:, 1:] += a_w[:, 1:] * (p[:, :-1] - p[:, 1:])
        q[:, :-1] += a_e[:, :-1] * (p[:, 1:] - p[:, :-1])
        p[:] = q
    return p

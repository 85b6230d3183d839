# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels.

Hot path of the time stepper: assembling the right-hand side, evaluating the
nodal power nonlinearity and solving one symmetric positive definite
tridiagonal system per step.  Mirrors blowlab._kernels_py exactly; the
backend selector picks whichever is available.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


def thomas_solve(double[::1] diag, double[::1] off, double[::1] rhs):
    """Solve the SPD tridiagonal system (diag, symmetric off-diagonal).

    Plain LU sweep without pivoting; stable because the systems assembled by
    the stepper are symmetric positive definite.
    """
    cdef Py_ssize_t m = diag.shape[0]
    if off.shape[0] != m - 1 or rhs.shape[0] != m:
        raise ValueError("inconsistent tridiagonal system shapes")
    x_arr = np.empty(m, dtype=np.float64)
    piv_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] piv = piv_arr
    cdef Py_ssize_t i
    cdef double w
    piv[0] = diag[0]
    x[0] = rhs[0]
    for i in range(1, m):
        w = off[i - 1] / piv[i - 1]
        piv[i] = diag[i] - w * off[i - 1]
        x[i] = rhs[i] - w * x[i - 1]
    x[m - 1] = x[m - 1] / piv[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = (x[i] - off[i] * x[i + 1]) / piv[i]
    return x_arr


def imex_step(double[::1] w_diag, double[::1] w_off,
              double[::1] a_diag, double[::1] a_off,
              double[::1] u, double[::1] p_vals,
              double[::1] load_w, double k_next, double tau):
    """One implicit-explicit update of the semidiscrete system.

    Solves (W + (1+tau) A) u_new = (W + A) u + tau * k_next * F(u) where
    F_i = load_w_i * |u_i|^{p_i - 2} u_i is the frozen nodal source.
    """
    cdef Py_ssize_t m = u.shape[0]
    if (w_diag.shape[0] != m or a_diag.shape[0] != m or p_vals.shape[0] != m
            or load_w.shape[0] != m or w_off.shape[0] != m - 1
            or a_off.shape[0] != m - 1):
        raise ValueError("inconsistent operator shapes")
    rhs_arr = np.empty(m, dtype=np.float64)
    bdiag_arr = np.empty(m, dtype=np.float64)
    boff_arr = np.empty(m - 1, dtype=np.float64)
    cdef double[::1] rhs = rhs_arr
    cdef double[::1] bdiag = bdiag_arr
    cdef double[::1] boff = boff_arr
    cdef Py_ssize_t i
    cdef double sd, se, au, source

    for i in range(m):
        sd = (w_diag[i] + a_diag[i]) * u[i]
        if i > 0:
            sd += (w_off[i - 1] + a_off[i - 1]) * u[i - 1]
        if i < m - 1:
            sd += (w_off[i] + a_off[i]) * u[i + 1]
        au = fabs(u[i])
        if au > 0.0:
            source = load_w[i] * pow(au, p_vals[i] - 2.0) * u[i]
        else:
            source = 0.0
        rhs[i] = sd + tau * k_next * source
        bdiag[i] = w_diag[i] + (1.0 + tau) * a_diag[i]
    for i in range(m - 1):
        boff[i] = w_off[i] + (1.0 + tau) * a_off[i]

    return thomas_solve(bdiag, boff, rhs)

"""Pure NumPy/SciPy stepping kernels.

Drop-in replacement for the compiled module: same function names, same
contracts, same results to machine precision.  Used automatically when the
compiled extension is unavailable, or on request via the backend selector.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solveh_banded


def thomas_solve(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the SPD tridiagonal system (diag, symmetric off-diagonal)."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m = diag.shape[0]
    if off.shape[0] != m - 1 or rhs.shape[0] != m:
        raise ValueError("inconsistent tridiagonal system shapes")
    if m == 1:  # solveh_banded rejects 1x1 systems
        return rhs / diag
    banded = np.zeros((2, m))
    banded[0, 1:] = off
    banded[1, :] = diag
    return solveh_banded(banded, rhs, lower=False)


def _tridiag_matvec(diag: np.ndarray, off: np.ndarray, u: np.ndarray) -> np.ndarray:
    out = diag * u
    out[:-1] += off * u[1:]
    out[1:] += off * u[:-1]
    return out


def imex_step(w_diag: np.ndarray, w_off: np.ndarray,
              a_diag: np.ndarray, a_off: np.ndarray,
              u: np.ndarray, p_vals: np.ndarray,
              load_w: np.ndarray, k_next: float, tau: float) -> np.ndarray:
    """One implicit-explicit update of the semidiscrete system.

    Solves (W + (1+tau) A) u_new = (W + A) u + tau * k_next * F(u) where
    F_i = load_w_i * |u_i|^{p_i - 2} u_i is the frozen nodal source.
    """
    u = np.asarray(u, dtype=float)
    m = u.shape[0]
    if (w_diag.shape[0] != m or a_diag.shape[0] != m or p_vals.shape[0] != m
            or load_w.shape[0] != m or w_off.shape[0] != m - 1
            or a_off.shape[0] != m - 1):
        raise ValueError("inconsistent operator shapes")
    au = np.abs(u)
    source = np.where(au > 0.0, load_w * au ** (p_vals - 2.0) * u, 0.0)
    rhs = _tridiag_matvec(w_diag + a_diag, w_off + a_off, u)
    rhs += tau * k_next * source
    return thomas_solve(w_diag + (1.0 + tau) * a_diag,
                        w_off + (1.0 + tau) * a_off, rhs)

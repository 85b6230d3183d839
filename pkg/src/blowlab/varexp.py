"""Variable-exponent Lebesgue machinery: modular and Luxemburg norm.

The modular of a profile u under a nodal exponent field s >= 1 is
rho(u) = int_Omega |u(x)|^{s(x)} dx; the Luxemburg norm is the unique
lambda > 0 with rho(u/lambda) = 1 (zero for u = 0).  lambda -> rho(u/lambda)
is continuous and strictly decreasing wherever finite, so the norm is found
by bracket expansion plus Brent root finding on the residual rho(u/lambda)-1.
"""
from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import brentq

from .mesh import RadialMesh, _check_length

__all__ = [
    "modular_weighted",
    "luxemburg_norm_weighted",
    "modular",
    "luxemburg_norm",
]

logger = logging.getLogger(__name__)

_MAX_BRACKET_EXPANSIONS = 200
_RESIDUAL_TOL = 1e-10


def _check_pair(weights: np.ndarray, u: np.ndarray, s: np.ndarray):
    weights = np.asarray(weights, dtype=float)
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    if not (weights.shape == u.shape == s.shape):
        raise ValueError(
            f"shape mismatch: weights {weights.shape}, u {u.shape}, s {s.shape}"
        )
    if np.any(weights <= 0.0):
        raise ValueError("quadrature weights must be strictly positive")
    if np.any(s < 1.0):
        raise ValueError(f"exponent field must be >= 1 everywhere (min {s.min()})")
    return weights, u, s


def modular_weighted(weights: np.ndarray, u: np.ndarray, s: np.ndarray) -> float:
    """Discrete modular sum_i w_i |u_i|^{s_i} over arbitrary positive weights."""
    weights, u, s = _check_pair(weights, u, s)
    return float(weights @ np.abs(u) ** s)


def luxemburg_norm_weighted(weights: np.ndarray, u: np.ndarray, s: np.ndarray) -> float:
    """Luxemburg norm for the discrete measure given by ``weights``.

    Solves modular(u/lambda) = 1 to residual <= 1e-10; returns 0.0 for u = 0.
    Raises RuntimeError if a bracket cannot be established (malformed data).
    """
    weights, u, s = _check_pair(weights, u, s)
    if not np.any(u != 0.0):
        return 0.0

    def residual(lam: float) -> float:
        return modular_weighted(weights, u / lam, s) - 1.0

    lo = hi = max(float(np.max(np.abs(u))), np.finfo(float).tiny)
    for _ in range(_MAX_BRACKET_EXPANSIONS):
        if residual(lo) <= 0.0:
            lo *= 0.5
        else:
            break
    else:
        raise RuntimeError("failed to bracket the Luxemburg norm from below")
    for _ in range(_MAX_BRACKET_EXPANSIONS):
        if residual(hi) >= 0.0:
            hi *= 2.0
        else:
            break
    else:
        raise RuntimeError("failed to bracket the Luxemburg norm from above")
    if residual(lo) == 0.0:
        return lo

    lam = brentq(residual, lo, hi, rtol=8.9e-16, maxiter=200)
    res = residual(lam)
    if abs(res) > _RESIDUAL_TOL:
        raise RuntimeError(f"Luxemburg residual {res:.3e} above tolerance")
    return float(lam)


def modular(mesh: RadialMesh, u: np.ndarray, s: np.ndarray) -> float:
    """Modular omega_{n-1} int_0^1 |u|^{s(r)} r^{n-1} dr for a Dirichlet profile."""
    u = _check_length(mesh, u, "u")
    s = _check_length(mesh, s, "s")
    return modular_weighted(mesh.omega * mesh.w, u, s)


def luxemburg_norm(mesh: RadialMesh, u: np.ndarray, s: np.ndarray) -> float:
    """Luxemburg norm of a Dirichlet profile on the unit ball."""
    u = _check_length(mesh, u, "u")
    s = _check_length(mesh, s, "s")
    return luxemburg_norm_weighted(mesh.omega * mesh.w, u, s)

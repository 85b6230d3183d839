"""Radial discretization of the unit ball in R^n with singular-weight quadrature.

Radial profiles u(r) on the unit ball are represented by their values at M
interior nodes 0 < r_0 < ... < r_{M-1} < 1.  The mesh may be graded toward
the origin (nodes r_i = ((i+1)/(M+1))**grading) so that the inverse-square
weight 1/|x|^2 is resolved without ever evaluating it at r = 0.

Between nodes a profile is treated as piecewise linear; on the innermost
cell [0, r_0] it is extended by the constant u(r_0) (zero radial flux at the
origin), and a homogeneous Dirichlet ghost value is appended at r = 1 for
gradient purposes.  All integrals reduce to exact moments of r^m over cells,
computed by a cancellation-free binomial expansion, so every quadrature
weight is strictly positive and the three quadratic forms below are exact
for the piecewise-linear interpolant:

* ``integrate``       -- omega_{n-1} * int_0^1 f r^{n-1} dr  (volume integral)
* ``weighted_l2_sq``  -- omega_{n-1} * int_0^1 u^2 r^{n-3} dr  (1/|x|^2 weight)
* ``grad_l2_sq``      -- omega_{n-1} * int_0^1 (u')^2 r^{n-1} dr

Because ``weighted_l2_sq`` and ``grad_l2_sq`` are the exact continuous
integrals of the same interpolant, the classical Hardy inequality
weighted <= H_n * grad with H_n = 4/(n-2)^2 holds for every nodal vector,
not merely asymptotically.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb, gamma, pi

import numpy as np

__all__ = [
    "RadialMesh",
    "build_mesh",
    "integrate",
    "dirichlet_integral",
    "weighted_l2_sq",
    "grad_l2_sq",
    "sphere_area",
    "ball_volume",
]

logger = logging.getLogger(__name__)


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1}."""
    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


def ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return sphere_area(n) / n


def _cell_moment(a: np.ndarray, h: np.ndarray, m: int) -> np.ndarray:
    """Exact int_0^h (a+x)^m dx per cell, as a sum of nonnegative terms."""
    out = np.zeros_like(a)
    for j in range(m + 1):
        out += comb(m, j) * a ** (m - j) * h ** (j + 1) / (j + 1)
    return out


def _hat_mass_cells(a: np.ndarray, h: np.ndarray, m: int):
    """Exact P1 mass entries on cells [a, a+h] under the weight r^m.

    Returns (maa, mab, mbb): the integrals of (left hat)^2, (left hat)*(right
    hat) and (right hat)^2 against r^m dr.  All summands are nonnegative, so
    the entries stay accurate on strongly graded meshes.
    """
    maa = np.zeros_like(a)
    mab = np.zeros_like(a)
    mbb = np.zeros_like(a)
    for j in range(m + 1):
        c = comb(m, j) * a ** (m - j) * h ** (j + 1)
        maa += c * 2.0 / ((j + 1) * (j + 2) * (j + 3))
        mab += c * 1.0 / ((j + 2) * (j + 3))
        mbb += c * 1.0 / (j + 3)
    return maa, mab, mbb


@dataclass(frozen=True)
class RadialMesh:
    """Discretized radial geometry of the unit ball in R^n.

    Attributes
    ----------
    n : int
        Space dimension, at least 3 (the inverse-square weight is integrable
        near the origin only for n >= 3).
    M : int
        Number of interior nodes.
    grading : float
        Mesh grading exponent, >= 1; larger values cluster nodes at r = 0.
    r : ndarray, shape (M,)
        Node radii, strictly increasing in (0, 1).
    h : ndarray, shape (M+1,)
        Cell widths for the cells [0, r_0], [r_0, r_1], ..., [r_{M-1}, 1].
    w : ndarray, shape (M,)
        Volume quadrature weights for integrands that vanish at r = 1
        (includes the sphere-area factor only via the integral routines).
    cell_volume : ndarray, shape (M+1,)
        Exact r^{n-1} moments of the cells.
    grad_coef : ndarray, shape (M,)
        Per-cell gradient coefficients V_cell / h_cell^2 for the M cells that
        connect node i to node i+1 (the last one to the Dirichlet ghost).
    sing_diag, sing_off : ndarray
        Tridiagonal representation of the exact piecewise-linear mass matrix
        under the singular weight r^{n-3}; the origin and boundary cells use
        the constant extension of the adjacent node value.
    omega : float
        Surface area of S^{n-1}.
    """

    n: int
    M: int
    grading: float
    r: np.ndarray
    h: np.ndarray
    w: np.ndarray
    cell_volume: np.ndarray
    grad_coef: np.ndarray
    sing_diag: np.ndarray
    sing_off: np.ndarray
    omega: float

    def __post_init__(self) -> None:
        if self.r.shape != (self.M,):
            raise ValueError(f"node array has shape {self.r.shape}, expected ({self.M},)")
        if not (np.all(self.w > 0.0) and np.all(self.grad_coef > 0.0)):
            raise ValueError("all quadrature weights must be strictly positive")


def build_mesh(n: int, M: int, grading: float = 2.0) -> RadialMesh:
    """Construct a graded radial mesh of the unit ball.

    Parameters
    ----------
    n : dimension, integer >= 3.
    M : number of interior nodes, >= 8.
    grading : grading exponent >= 1; nodes follow ((i+1)/(M+1))**grading,
        so the innermost radius scales like 1/M**grading.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"dimension must be >= 3 (got {n})")
    if int(M) != M or M < 8:
        raise ValueError(f"node count must be >= 8 (got {M})")
    if not grading >= 1.0:
        raise ValueError(f"grading must be >= 1 (got {grading})")
    n, M = int(n), int(M)

    i = np.arange(1, M + 1, dtype=float)
    r = (i / (M + 1)) ** float(grading)
    edges = np.concatenate(([0.0], r, [1.0]))
    h = np.diff(edges)
    a = edges[:-1]

    V = _cell_moment(a, h, n - 1)
    S = _cell_moment(a, h, n - 3)

    # Hat masses for Dirichlet integrands: node 0 owns the whole origin cell
    # (constant extension), node M-1 sees half of the boundary cell through
    # the hat that drops to zero at r = 1.
    w = np.empty(M)
    w[0] = V[0] + 0.5 * V[1]
    w[1:] = 0.5 * (V[1:-1] + V[2:])

    grad_coef = V[1:] / h[1:] ** 2

    maa, mab, mbb = _hat_mass_cells(a[1:-1], h[1:-1], n - 3)
    sing_diag = np.zeros(M)
    sing_diag[:-1] += maa
    sing_diag[1:] += mbb
    sing_diag[0] += S[0]    # constant extension over [0, r_0]
    sing_diag[-1] += S[-1]  # constant extension over [r_{M-1}, 1]
    sing_off = mab

    logger.debug("built mesh n=%d M=%d grading=%g r_min=%.3e", n, M, grading, r[0])
    return RadialMesh(
        n=n,
        M=M,
        grading=float(grading),
        r=r,
        h=h,
        w=w,
        cell_volume=V,
        grad_coef=grad_coef,
        sing_diag=sing_diag,
        sing_off=sing_off,
        omega=sphere_area(n),
    )


def _check_length(mesh: RadialMesh, f: np.ndarray, name: str) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (mesh.M,):
        raise ValueError(f"{name} has shape {f.shape}, expected ({mesh.M},)")
    return f


def integrate(mesh: RadialMesh, f: np.ndarray) -> float:
    """Volume integral of a radial profile over the unit ball.

    Realizes omega_{n-1} * int_0^1 f(r) r^{n-1} dr with the trapezoid rule on
    exact cell volumes.  The value at r = 1 is not part of the nodal data and
    is supplied by linear extrapolation from the last two nodes; constants
    are therefore integrated exactly (ball volume to machine precision).
    """
    f = _check_length(mesh, f, "f")
    fb = f[-1] + (f[-1] - f[-2]) * mesh.h[-1] / mesh.h[-2]
    return mesh.omega * (mesh.w @ f + 0.5 * mesh.cell_volume[-1] * fb)


def dirichlet_integral(mesh: RadialMesh, f: np.ndarray) -> float:
    """Volume integral for integrands that vanish at r = 1.

    Same rule as ``integrate`` but with the boundary value pinned to zero,
    the convention used for all functionals of Dirichlet profiles.
    """
    f = _check_length(mesh, f, "f")
    return mesh.omega * float(mesh.w @ f)


def weighted_l2_sq(mesh: RadialMesh, u: np.ndarray) -> float:
    """Squared L2 norm of u/|x|: omega_{n-1} * int_0^1 u^2 r^{n-3} dr.

    Exact for the piecewise-linear interpolant of u with constant extension
    on the innermost and outermost cells, hence nonnegative and zero only
    for u identical to zero at the nodes.
    """
    u = _check_length(mesh, u, "u")
    q = mesh.sing_diag @ (u * u) + 2.0 * (mesh.sing_off @ (u[:-1] * u[1:]))
    return mesh.omega * float(q)


def grad_l2_sq(mesh: RadialMesh, u: np.ndarray) -> float:
    """Squared L2 norm of the radial gradient with a Dirichlet ghost at r = 1.

    Uses the centered per-cell difference quotient (u_{i+1}-u_i)/h_i against
    the exact cell volume, which is the exact Dirichlet form of the
    piecewise-linear interpolant; the quadratic form is tridiagonal.
    """
    u = _check_length(mesh, u, "u")
    du = np.empty(mesh.M)
    du[:-1] = u[1:] - u[:-1]
    du[-1] = -u[-1]
    return mesh.omega * float(mesh.grad_coef @ (du * du))

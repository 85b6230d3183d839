"""Energy-type functionals tracked along trajectories.

For a profile u at time t with growth exponent p(r, t), modulation k(t) and
scaling parameter delta > 0:

* energy            J_delta(u, t) = (delta/2)||grad u||^2 - k(t) int |u|^p / p dx
* Nehari functional I_delta(u, t) = delta ||grad u||^2 - k(t) int |u|^p dx
* shifted energy    E(u, t) = J_1(u, t) + k_inf int 1/p(x, t) dx
* its negative      K(t) = -E(u, t), nondecreasing along solutions
* Lyapunov weight   L(u) = (||u/|x|||^2 + ||grad u||^2) / 2
* combined weight   M(t) = L + C1 * K with C1 = p_minus * H_n / (p_minus - 2)
* exponent drift    P(u, t) = int (p_t/p^2) (p ln|u| - 1) |u|^p dx

H_n = 4/(n-2)^2 is the Hardy constant of the unit ball.  The snapshot
constructor evaluates all of these consistently from one profile.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .mesh import RadialMesh, dirichlet_integral, grad_l2_sq, integrate, weighted_l2_sq
from .models import ExponentField, InitialDatum, SourceModulation

__all__ = [
    "Problem",
    "FunctionalSnapshot",
    "hardy_constant",
    "c1_constant",
    "energy_j",
    "nehari_i",
    "modified_energy",
    "lyapunov",
    "p_term",
    "snapshot",
    "nehari_scaling",
    "well_depth_estimate",
    "stable_set_member",
    "default_dictionary",
]

logger = logging.getLogger(__name__)


def hardy_constant(n: int) -> float:
    """Best constant H_n = 4/(n-2)^2 in the Hardy inequality on the ball."""
    if n < 3:
        raise ValueError(f"dimension must be >= 3 (got {n})")
    return 4.0 / (n - 2) ** 2


def c1_constant(p_minus: float, n: int) -> float:
    """Combination constant C1 = p_minus * H_n / (p_minus - 2)."""
    if not p_minus > 2.0:
        raise ValueError(f"p_minus must exceed 2 (got {p_minus})")
    return p_minus * hardy_constant(n) / (p_minus - 2.0)


@dataclass(frozen=True)
class Problem:
    """Mesh plus model data; the ambient context for all functionals."""

    mesh: RadialMesh
    exponent: ExponentField
    modulation: SourceModulation

    def p_values(self, t: float) -> np.ndarray:
        return np.asarray(self.exponent.p(self.mesh.r, float(t)), dtype=float)

    def p_t_values(self, t: float) -> np.ndarray:
        return np.asarray(self.exponent.p_t(self.mesh.r, float(t)), dtype=float)


@dataclass(frozen=True)
class FunctionalSnapshot:
    """All tracked functionals of one profile at one instant."""

    t: float
    J: float
    I: float
    E: float
    L: float
    K: float
    M: float
    P_term: float


def energy_j(prob: Problem, u: np.ndarray, t: float, delta: float = 1.0) -> float:
    """Energy J_delta(u, t)."""
    p = prob.p_values(t)
    source = dirichlet_integral(prob.mesh, np.abs(u) ** p / p)
    return 0.5 * delta * grad_l2_sq(prob.mesh, u) - prob.modulation.k(t) * source


def nehari_i(prob: Problem, u: np.ndarray, t: float, delta: float = 1.0) -> float:
    """Nehari functional I_delta(u, t)."""
    p = prob.p_values(t)
    source = dirichlet_integral(prob.mesh, np.abs(u) ** p)
    return delta * grad_l2_sq(prob.mesh, u) - prob.modulation.k(t) * source


def modified_energy(prob: Problem, u: np.ndarray, t: float) -> float:
    """Shifted energy E(u, t) = J_1(u, t) + k_inf int 1/p dx."""
    p = prob.p_values(t)
    return energy_j(prob, u, t, delta=1.0) + prob.modulation.k_inf * integrate(
        prob.mesh, 1.0 / p
    )

def lyapunov(prob: Problem, u: np.ndarray) -> float:
    """Lyapunov weight L(u) = (||u/|x|||^2 + ||grad u||^2) / 2."""
    return 0.5 * (weighted_l2_sq(prob.mesh, u) + grad_l2_sq(prob.mesh, u))


def p_term(prob: Problem, u: np.ndarray, t: float) -> float:
    """Exponent-drift integral P = int (p_t/p^2)(p ln|u| - 1)|u|^p dx.

    The integrand is extended by zero where u vanishes (|u|^p ln|u| -> 0).
    """
    p = prob.p_values(t)
    pt = prob.p_t_values(t)
    au = np.abs(np.asarray(u, dtype=float))
    integrand = np.zeros_like(au)
    mask = au > 0.0
    if np.any(mask):
        pm, ptm, am = p[mask], pt[mask], au[mask]
        integrand[mask] = ptm / pm**2 * (pm * np.log(am) - 1.0) * am**pm
    return dirichlet_integral(prob.mesh, integrand)


def snapshot(prob: Problem, u: np.ndarray, t: float) -> FunctionalSnapshot:
    """Evaluate every tracked functional of the profile u at time t."""
    mesh = prob.mesh
    p = prob.p_values(t)
    kv = prob.modulation.k(t)
    grad = grad_l2_sq(mesh, u)
    weighted = weighted_l2_sq(mesh, u)
    powers = np.abs(np.asarray(u, dtype=float)) ** p
    source = dirichlet_integral(mesh, powers)
    source_over_p = dirichlet_integral(mesh, powers / p)

    J = 0.5 * grad - kv * source_over_p
    I = grad - kv * source
    E = J + prob.modulation.k_inf * integrate(mesh, 1.0 / p)
    L = 0.5 * (weighted + grad)
    K = -E
    c1 = c1_constant(prob.exponent.p_minus, mesh.n)
    return FunctionalSnapshot(
        t=float(t), J=J, I=I, E=E, L=L, K=K, M=L + c1 * K, P_term=p_term(prob, u, t)
    )


def nehari_scaling(prob: Problem, u: np.ndarray, t: float, delta: float = 1.0) -> float:
    """Scaling root lambda0 > 0 with I_delta(lambda0 * u, t) = 0.

    Since p > 2 everywhere, lambda -> k int lambda^{p-2} |u|^p dx is strictly
    increasing, so the root is unique; it is found by bracket expansion and
    Brent iteration on g(lambda) = delta ||grad u||^2 - k int lambda^{p-2}|u|^p.
    """
    u = np.asarray(u, dtype=float)
    grad = grad_l2_sq(prob.mesh, u)
    if grad <= 0.0:
        raise ValueError("nehari_scaling requires a nonzero profile")
    kv = prob.modulation.k(t)
    if kv <= 0.0:
        raise ValueError(f"nehari_scaling requires k(t) > 0 (got {kv:g})")
    p = prob.p_values(t)
    powers = np.abs(u) ** p
    if dirichlet_integral(prob.mesh, powers) <= 0.0:
        raise ValueError("nehari_scaling requires a nonzero source integral")

    def g(lam: float) -> float:
        return delta * grad - kv * dirichlet_integral(prob.mesh, lam ** (p - 2.0) * powers)

    lo = hi = 1.0
    for _ in range(200):
        if g(lo) <= 0.0:
            lo *= 0.5
        else:
            break
    else:
        raise RuntimeError("failed to bracket the Nehari scaling from below")
    for _ in range(200):
        if g(hi) >= 0.0:
            hi *= 2.0
        else:
            break
    else:
        raise RuntimeError("failed to bracket the Nehari scaling from above")
    if g(lo) == 0.0:
        return lo
    return float(brentq(g, lo, hi, rtol=8.9e-16, maxiter=200))


def default_dictionary(mesh: RadialMesh) -> dict[str, np.ndarray]:
    """Smooth Dirichlet trial profiles used by minimization and estimation."""
    r = mesh.r
    return {
        "parabola": 1.0 - r**2,
        "parabola_sq": (1.0 - r**2) ** 2,
        "cone": 1.0 - r,
        "cosine": np.cos(0.5 * np.pi * r),
        "ring": r * (1.0 - r**2),
        "bump": np.exp(-4.0 * r**2) - np.exp(-4.0),
    }


def well_depth_estimate(
    prob: Problem,
    t: float = 0.0,
    delta: float = 1.0,
    dictionary: dict[str, np.ndarray] | None = None,
) -> float:
    """Upper estimate of the potential-well depth at time t.

    Minimizes J_delta(lambda0(v) * v, t) over the trial dictionary, where
    lambda0 places each profile on the Nehari set I_delta = 0.  A finite
    dictionary can only overshoot the true infimum, so the value is an upper
    estimate, positive for admissible exponents.
    """
    if dictionary is None:
        dictionary = default_dictionary(prob.mesh)
    if not dictionary:
        raise ValueError("well_depth_estimate requires a nonempty dictionary")
    best = np.inf
    best_name = None
    for name, v in dictionary.items():
        lam = nehari_scaling(prob, v, t, delta=delta)
        value = energy_j(prob, lam * v, t, delta=delta)
        if value < best:
            best, best_name = value, name
    logger.debug("well depth estimate %.6g from profile %s", best, best_name)
    return float(best)


def stable_set_member(
    prob: Problem,
    u: np.ndarray,
    t: float,
    delta: float = 1.0,
    depth: float | None = None,
) -> bool:
    """Membership test for the stable set {J < depth, I > 0}.

    ``depth`` defaults to the dictionary well-depth estimate at time t.
    """
    if depth is None:
        depth = well_depth_estimate(prob, t, delta=delta)
    return bool(
        energy_j(prob, u, t, delta=delta) < depth
        and nehari_i(prob, u, t, delta=delta) > 0.0
    )

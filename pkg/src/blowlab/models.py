"""Model data for the evolution problem: exponent fields, source modulations,
initial profiles, and their admissibility validation.

The source term k(t)|u|^{p(x,t)-2}u is admissible when

* the exponent field satisfies 2 < p_minus <= p(r,t) <= p_plus < 2(n-1)/(n-2)
  and is nondecreasing in time (p_t >= 0), and
* the modulation satisfies k(0) > 0, k' >= 0, and k(t) -> k_inf < infinity.

Validation samples both fields on a space-time grid and reports every
violated condition with its location, so a rejected configuration explains
itself instead of failing deep inside the solver.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mesh import RadialMesh

__all__ = [
    "ExponentField",
    "SourceModulation",
    "InitialDatum",
    "Violation",
    "ValidationReport",
    "constant_exponent",
    "separable_exponent",
    "constant_modulation",
    "saturating_modulation",
    "make_exponent",
    "make_modulation",
    "make_initial",
    "validate_exponent",
    "validate_modulation",
    "log_holder_constant",
    "critical_exponent",
]

logger = logging.getLogger(__name__)

_SLACK = 1e-12  # roundoff slack for inequality checks on sampled fields


def critical_exponent(n: int) -> float:
    """Upper admissibility limit 2(n-1)/(n-2) for the growth exponent."""
    return 2.0 * (n - 1) / (n - 2)


@dataclass(frozen=True)
class ExponentField:
    """Growth exponent p(r, t) with declared bounds.

    ``p`` and ``p_t`` map (r: ndarray, t: float) to nodal arrays; ``p_t`` is
    the exact time derivative of ``p``.  The declared bounds must enclose the
    field for all radii in [0, 1] and all t >= 0.
    """

    name: str
    p: Callable[[np.ndarray, float], np.ndarray]
    p_t: Callable[[np.ndarray, float], np.ndarray]
    p_minus: float
    p_plus: float


@dataclass(frozen=True)
class SourceModulation:
    """Time modulation k(t) of the source with its limit k_inf."""

    name: str
    k: Callable[[float], float]
    k_prime: Callable[[float], float]
    k0: float
    k_inf: float


@dataclass(frozen=True)
class InitialDatum:
    """Named radial initial profile; ``values`` evaluates it at node radii."""

    name: str
    values: Callable[[np.ndarray], np.ndarray]


def constant_exponent(value: float) -> ExponentField:
    """Constant-in-space-and-time exponent p = value."""
    v = float(value)
    return ExponentField(
        name=f"constant(p={v:g})",
        p=lambda r, t: np.full_like(r, v),
        p_t=lambda r, t: np.zeros_like(r),
        p_minus=v,
        p_plus=v,
    )


def separable_exponent(a: float, b: float = 0.0, c: float = 0.0) -> ExponentField:
    """Exponent p(r, t) = a + b*r + c*t/(1+t).

    The time factor saturates at c, so p_plus = a + max(b, 0) + max(c, 0) and
    p_minus = a + min(b, 0) + min(c, 0); p_t = c/(1+t)^2 is sign-definite.
    """
    a, b, c = float(a), float(b), float(c)
    return ExponentField(
        name=f"separable(a={a:g}, b={b:g}, c={c:g})",
        p=lambda r, t: a + b * r + c * (t / (1.0 + t)) * np.ones_like(r),
        p_t=lambda r, t: np.full_like(r, c / (1.0 + t) ** 2),
        p_minus=a + min(b, 0.0) + min(c, 0.0),
        p_plus=a + max(b, 0.0) + max(c, 0.0),
    )


def constant_modulation(k0: float) -> SourceModulation:
    """Constant modulation k = k0 (so k_inf = k0)."""
    k0 = float(k0)
    return SourceModulation(
        name=f"constant(k={k0:g})",
        k=lambda t: k0,
        k_prime=lambda t: 0.0,
        k0=k0,
        k_inf=k0,
    )


def saturating_modulation(k0: float, k_inf: float) -> SourceModulation:
    """Modulation k(t) = k_inf - (k_inf - k0) * exp(-t), nondecreasing for k_inf >= k0."""
    k0, k_inf = float(k0), float(k_inf)
    gap = k_inf - k0
    return SourceModulation(
        name=f"saturating(k0={k0:g}, k_inf={k_inf:g})",
        k=lambda t: k_inf - gap * np.exp(-t),
        k_prime=lambda t: gap * np.exp(-t),
        k0=k0,
        k_inf=k_inf,
    )


_EXPONENT_MODELS = {
    "constant": lambda params: constant_exponent(params["value"]),
    "separable": lambda params: separable_exponent(
        params["a"], params.get("b", 0.0), params.get("c", 0.0)
    ),
}

_MODULATION_MODELS = {
    "constant": lambda params: constant_modulation(params["k0"]),
    "saturating": lambda params: saturating_modulation(params["k0"], params["k_inf"]),
}


def _parabolic(amplitude: float) -> InitialDatum:
    A = float(amplitude)
    return InitialDatum(
        name=f"parabolic(A={A:g})",
        values=lambda r: A * (1.0 - r**2),
    )


def _bump(amplitude: float, width: float = 4.0) -> InitialDatum:
    A, s = float(amplitude), float(width)
    return InitialDatum(
        name=f"bump(A={A:g}, width={s:g})",
        values=lambda r: A * (np.exp(-s * r**2) - np.exp(-s)),
    )


def _linear(amplitude: float) -> InitialDatum:
    A = float(amplitude)
    return InitialDatum(
        name=f"linear(A={A:g})",
        values=lambda r: A * (1.0 - r),
    )


_INITIAL_FAMILIES = {
    "parabolic": lambda params: _parabolic(params["amplitude"]),
    "bump": lambda params: _bump(params["amplitude"], params.get("width", 4.0)),
    "linear": lambda params: _linear(params["amplitude"]),
}


def make_exponent(model: str, params: dict) -> ExponentField:
    """Instantiate a built-in exponent model ('constant' or 'separable')."""
    try:
        return _EXPONENT_MODELS[model](params)
    except KeyError as exc:
        raise ValueError(f"unknown exponent model {model!r}") from exc


def make_modulation(model: str, params: dict) -> SourceModulation:
    """Instantiate a built-in modulation model ('constant' or 'saturating')."""
    try:
        return _MODULATION_MODELS[model](params)
    except KeyError as exc:
        raise ValueError(f"unknown modulation model {model!r}") from exc


def make_initial(family: str, params: dict) -> InitialDatum:
    """Instantiate a built-in initial profile ('parabolic', 'bump' or 'linear')."""
    try:
        return _INITIAL_FAMILIES[family](params)
    except KeyError as exc:
        raise ValueError(f"unknown initial family {family!r}") from exc


@dataclass(frozen=True)
class Violation:
    """One violated admissibility condition with its sample location."""

    condition: str
    r: float | None
    t: float | None
    value: float
    message: str


@dataclass
class ValidationReport:
    """Outcome of sampling-based admissibility checks."""

    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def add(self, condition: str, r: float | None, t: float | None,
            value: float, message: str) -> None:
        self.ok = False
        self.violations.append(Violation(condition, r, t, value, message))

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]


def _default_t_grid(horizon: float) -> np.ndarray:
    return np.linspace(0.0, horizon, 33)


def validate_exponent(
    exponent: ExponentField,
    mesh: RadialMesh,
    t_grid: np.ndarray | None = None,
    horizon: float = 50.0,
) -> ValidationReport:
    """Check the exponent field on the node radii times a time grid.

    Verifies the strict bounds 2 < p_minus and p_plus < 2(n-1)/(n-2), that
    the samples stay inside the declared [p_minus, p_plus], and that
    p_t >= 0 everywhere.
    """
    report = ValidationReport(ok=True)
    crit = critical_exponent(mesh.n)
    if not exponent.p_minus > 2.0:
        report.add(
            "p_minus > 2", None, None, exponent.p_minus,
            f"p_minus must exceed 2 (got {exponent.p_minus:g})",
        )
    if not exponent.p_plus < crit:
        report.add(
            "p_plus < 2(n-1)/(n-2)", None, None, exponent.p_plus,
            f"p_plus must stay below the critical limit 2(n-1)/(n-2) = {crit:g} "
            f"(got {exponent.p_plus:g})",
        )
    if t_grid is None:
        t_grid = _default_t_grid(horizon)
    for t in np.asarray(t_grid, dtype=float):
        pv = np.asarray(exponent.p(mesh.r, float(t)), dtype=float)
        ptv = np.asarray(exponent.p_t(mesh.r, float(t)), dtype=float)
        for idx in np.flatnonzero(pv < exponent.p_minus - _SLACK)[:1]:
            report.add(
                "p >= p_minus", float(mesh.r[idx]), float(t), float(pv[idx]),
                f"p({mesh.r[idx]:.4f}, {t:.4f}) = {pv[idx]:.6g} falls below the "
                f"declared p_minus = {exponent.p_minus:g}",
            )
        for idx in np.flatnonzero(pv > exponent.p_plus + _SLACK)[:1]:
            report.add(
                "p <= p_plus", float(mesh.r[idx]), float(t), float(pv[idx]),
                f"p({mesh.r[idx]:.4f}, {t:.4f}) = {pv[idx]:.6g} exceeds the "
                f"declared p_plus = {exponent.p_plus:g}",
            )
        for idx in np.flatnonzero(ptv < -_SLACK)[:1]:
            report.add(
                "p_t >= 0", float(mesh.r[idx]), float(t), float(ptv[idx]),
                f"p_t({mesh.r[idx]:.4f}, {t:.4f}) = {ptv[idx]:.6g} is negative; "
                "the exponent must be nondecreasing in time",
            )
    if not report.ok:
        logger.info("exponent field rejected: %s", "; ".join(report.messages()))
    return report


def validate_modulation(
    modulation: SourceModulation,
    t_grid: np.ndarray | None = None,
    horizon: float = 50.0,
    tail_tol: float = 0.05,
) -> ValidationReport:
    """Check the modulation on a time grid.

    Verifies k(0) > 0, k' >= 0, k <= k_inf, and that k has approached its
    limit by the horizon: k(horizon) >= k_inf - tail_tol * |k_inf|.
    """
    report = ValidationReport(ok=True)
    k0 = float(modulation.k(0.0))
    if not k0 > 0.0:
        report.add("k(0) > 0", None, 0.0, k0, f"k(0) must be positive (got {k0:g})")
    if t_grid is None:
        t_grid = _default_t_grid(horizon)
    for t in np.asarray(t_grid, dtype=float):
        kv = float(modulation.k(float(t)))
        kp = float(modulation.k_prime(float(t)))
        scale = max(abs(modulation.k_inf), 1.0)
        if kp < -_SLACK * scale:
            report.add(
                "k' >= 0", None, float(t), kp,
                f"k'({t:.4f}) = {kp:.6g} is negative; the modulation must be nondecreasing",
            )
        if kv > modulation.k_inf + _SLACK * scale:
            report.add(
                "k <= k_inf", None, float(t), kv,
                f"k({t:.4f}) = {kv:.6g} exceeds the declared limit k_inf = {modulation.k_inf:g}",
            )
    k_end = float(modulation.k(horizon))
    if k_end < modulation.k_inf - tail_tol * abs(modulation.k_inf):
        report.add(
            "k(horizon) ~ k_inf", None, horizon, k_end,
            f"k({horizon:g}) = {k_end:.6g} has not approached k_inf = "
            f"{modulation.k_inf:g} within {tail_tol:g} relative",
        )
    if not report.ok:
        logger.info("modulation rejected: %s", "; ".join(report.messages()))
    return report


def log_holder_constant(
    exponent: ExponentField,
    mesh: RadialMesh,
    t_grid: np.ndarray | None = None,
    horizon: float = 50.0,
    max_space_samples: int = 48,
) -> float:
    """Estimate the log-Hoelder modulus of the exponent field.

    Returns the maximum of |p(xi) - p(eta)| * log(e + 1/|xi - eta|) over
    sampled space-time pairs, the smallest constant c with
    |p(xi) - p(eta)| <= c / log(e + 1/|xi - eta|) on the samples.  For a
    radial field the closest spatial representatives of two shells lie on a
    common ray, so the space-time distance is the Euclidean one in (r, t).
    """
    if t_grid is None:
        t_grid = _default_t_grid(horizon)
    t_grid = np.asarray(t_grid, dtype=float)
    t_grid = t_grid[:: max(1, len(t_grid) // 16)]  # keep the pair set small
    stride = max(1, mesh.M // max_space_samples)
    radii = mesh.r[::stride]
    rr, tt = np.meshgrid(radii, t_grid, indexing="ij")
    points = np.column_stack([rr.ravel(), tt.ravel()])
    values = np.concatenate(
        [np.asarray(exponent.p(radii, float(t)), dtype=float) for t in t_grid]
    )
    values = values.reshape(len(t_grid), len(radii)).T.ravel()

    diff = np.abs(values[:, None] - values[None, :])
    dist = np.sqrt(
        (points[:, 0, None] - points[None, :, 0]) ** 2
        + (points[:, 1, None] - points[None, :, 1]) ** 2
    )
    mask = dist > 0.0
    if not np.any(mask):
        return 0.0
    moduli = diff[mask] * np.log(np.e + 1.0 / dist[mask])
    return float(np.max(moduli))

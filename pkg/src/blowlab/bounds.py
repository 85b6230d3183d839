"""Blow-up time bounds, auxiliary constants, and inequality checkers.

Three bounds are computed for a given initial state:

* an upper bound valid when the modified energy starts negative,
* an upper bound valid when the modified energy starts small and nonnegative
  relative to the quadratic growth functional, and
* an unconditional lower bound built from interpolation-inequality constants.

All empirically estimated constants (interpolation and embedding constants)
are inflated by a safety factor, which only weakens the certified lower
bound; it never fabricates tightness.  The module also houses the random
trial check of the weighted-norm inequality and a discrete concavity
checker for sampled scalar functions.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .functionals import (
    Problem,
    c1_constant,
    default_dictionary,
    energy_j,
    hardy_constant,
    lyapunov,
    modified_energy,
)
from .mesh import RadialMesh, dirichlet_integral, grad_l2_sq
from .solver import (
    TERMINATION_BLOWUP,
    TERMINATION_UNDERFLOW,
    detect_blowup_time,
)

logger = logging.getLogger(__name__)

#: Diameter of the unit-ball domain.
DIAMETER = 2.0

#: Safety factor applied to empirically maximized inequality constants.
CONSTANT_INFLATION = 2.0

#: Tolerance factor absorbing time-discretization error when comparing the
#: observed blow-up bracket against the negative-energy upper bound.
UPPER_BOUND_SLACK = 1.05


def interpolation_exponent(q: float, n: int) -> float:
    """Interpolation weight alpha for the L^q norm between L^2 and the
    gradient norm: alpha = (1/2 - 1/q) / (1/2 + 1/n - 1/2) = n(q-2)/(2q).

    Requires 2 < q < 2n/(n-2) so that alpha lies in (0, 1).
    """
    q = float(q)
    if q <= 2.0:
        raise ValueError(f"interpolation exponent requires q > 2 (got {q})")
    alpha = (0.5 - 1.0 / q) / (0.5 + 1.0 / n - 0.5)
    if alpha >= 1.0:
        raise ValueError(
            f"interpolation exponent requires q < 2n/(n-2) = {2 * n / (n - 2):.6g} "
            f"(got q={q})"
        )
    return alpha


def growth_rate_exponent(q: float, n: int) -> float:
    """Exponent gamma = (1 - alpha) q / (2 - alpha q) of the growth ODE.

    Hard error when alpha * q >= 2 (i.e. q >= 2 + 4/n): the lower-bound
    machinery is undefined there and must not silently pass.
    """
    alpha = interpolation_exponent(q, n)
    denom = 2.0 - alpha * q
    if denom <= 0.0:
        raise ValueError(
            f"growth-rate exponent undefined: alpha*q = {alpha * q:.6g} >= 2 "
            f"for q = {q:.6g} (requires q < 2 + 4/n = {2.0 + 4.0 / n:.6g})"
        )
    gamma = (1.0 - alpha) * q / denom
    if gamma <= 1.0:
        raise ValueError(
            f"growth-rate exponent gamma = {gamma:.6g} <= 1; the tail "
            "integral would diverge"
        )
    return gamma


_PERTURBATION_SWEEPS = 2
_PERTURBATIONS_PER_SWEEP = 48


def _smooth_directions(mesh: RadialMesh) -> np.ndarray:
    r = mesh.r
    return np.stack([
        1.0 - r**2,
        r * (1.0 - r**2),
        (1.0 - r**2) ** 2,
        np.sin(np.pi * r),
    ])


def _maximize_ratio(mesh: RadialMesh, ratio, dictionary, rng) -> float:
    best_name, best_u, best = None, None, -np.inf
    for name, u in dictionary.items():
        val = ratio(u)
        if val > best:
            best_name, best_u, best = name, u, val
    if best_u is None or best <= 0.0:
        raise ValueError("profile dictionary yielded no usable candidate")
    directions = _smooth_directions(mesh)
    scale = 0.2 * float(np.max(np.abs(best_u)))
    for _ in range(_PERTURBATION_SWEEPS):
        for _ in range(_PERTURBATIONS_PER_SWEEP):
            coeffs = rng.standard_normal(directions.shape[0])
            cand = best_u + scale * (coeffs @ directions)
            val = ratio(cand)
            if val > best:
                best_u, best = cand, val
        scale *= 0.5
    logger.debug("ratio maximization: seed profile %s, final value %.6g",
                 best_name, best)
    return best


def gn_constant_estimate(mesh: RadialMesh, q: float, *,
                         rng: np.random.Generator | None = None,
                         seed: int = 0,
                         dictionary: dict[str, np.ndarray] | None = None) -> float:
    """Estimate the interpolation-inequality constant for the L^q norm.

    Maximizes ||u||_q^q / (||grad u||^(alpha q) ||u||_2^((1-alpha) q)) over a
    profile dictionary plus seeded smooth perturbations (coordinate ascent),
    then inflates the maximum by a safety factor.  Larger values only weaken
    the certified lower bound, so inflation is conservative.
    """
    alpha = interpolation_exponent(q, mesh.n)
    if rng is None:
        rng = np.random.default_rng(seed)
    if dictionary is None:
        dictionary = default_dictionary(mesh)

    def ratio(u: np.ndarray) -> float:
        grad = grad_l2_sq(mesh, u)
        l2 = dirichlet_integral(mesh, u * u)
        if grad <= 0.0 or l2 <= 0.0:
            return -np.inf
        qint = dirichlet_integral(mesh, np.abs(u) ** q)
        return qint / (grad ** (0.5 * alpha * q) * l2 ** (0.5 * (1.0 - alpha) * q))

    return CONSTANT_INFLATION * _maximize_ratio(mesh, ratio, dictionary, rng)


def sobolev_constant_estimate(mesh: RadialMesh, q: float, *,
                              rng: np.random.Generator | None = None,
                              seed: int = 0,
                              dictionary: dict[str, np.ndarray] | None = None) -> float:
    """Estimate the embedding constant in ||u||_q <= S ||grad u||_2.

    Same maximization strategy and safety inflation as
    gn_constant_estimate, for the ratio ||u||_q / ||grad u||_2.
    """
    interpolation_exponent(q, mesh.n)  # validates the admissible q range
    if rng is None:
        rng = np.random.default_rng(seed)
    if dictionary is None:
        dictionary = default_dictionary(mesh)

    def ratio(u: np.ndarray) -> float:
        grad = grad_l2_sq(mesh, u)
        if grad <= 0.0:
            return -np.inf
        qint = dirichlet_integral(mesh, np.abs(u) ** q)
        return qint ** (1.0 / q) / math.sqrt(grad)

    return CONSTANT_INFLATION * _maximize_ratio(mesh, ratio, dictionary, rng)


def hardy_check(mesh: RadialMesh, trials: int, *,
                rng: np.random.Generator | None = None,
                seed: int = 0) -> float:
    """Worst ratio of the 1/r^2-weighted norm to the gradient norm.

    Evaluates the ratio on random Dirichlet nodal functions; the result must
    stay below 4/(n-2)^2 for the discretization to inherit the weighted-norm
    inequality.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1 (got {trials})")
    if rng is None:
        rng = np.random.default_rng(seed)
    samples = rng.standard_normal((trials, mesh.M))
    weighted = (samples**2 @ mesh.sing_diag
                + 2.0 * (samples[:, :-1] * samples[:, 1:]) @ mesh.sing_off)
    du = np.empty_like(samples)
    du[:, :-1] = samples[:, 1:] - samples[:, :-1]
    du[:, -1] = -samples[:, -1]
    grad = du**2 @ mesh.grad_coef
    return float(np.max(weighted / grad))


def c_star_constant(k_inf: float, p_minus: float, p_plus: float,
                    n_minus: float, n_plus: float, n: int) -> float:
    """Growth-ODE constant: the larger of the two interpolation branches.

    Each branch combines the Young-split coefficient of its exponent with
    the domain-diameter power matching its growth-rate exponent.
    """
    def branch(q: float, n_q: float) -> float:
        alpha = interpolation_exponent(q, n)
        gamma = growth_rate_exponent(q, n)
        aq = alpha * q
        young = (2.0 - aq) / 2.0 * (2.0 / (k_inf * n_q * aq)) ** (-aq / (2.0 - aq))
        return young * DIAMETER ** (4.0 * gamma)

    return max(branch(p_plus, n_plus), branch(p_minus, n_minus))


@dataclass(frozen=True)
class BoundConstants:
    """Auxiliary constants feeding the three bounds."""

    h_n: float
    c1: float
    alpha_plus: float
    alpha_minus: float
    gamma_plus: float
    gamma_minus: float
    n_plus: float
    n_minus: float
    c_star: float
    s_plus: float
    s_minus: float
    diameter: float = DIAMETER

    def as_report_dict(self) -> dict[str, float]:
        """Fixed-key mapping used in serialized reports."""
        return {
            "h_n": self.h_n,
            "c1": self.c1,
            "alpha_plus": self.alpha_plus,
            "alpha_minus": self.alpha_minus,
            "gamma_plus": self.gamma_plus,
            "gamma_minus": self.gamma_minus,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "c_star": self.c_star,
        }


def compute_constants(prob: Problem, *, seed: int = 0,
                      dictionary: dict[str, np.ndarray] | None = None) -> BoundConstants:
    """Evaluate every auxiliary constant for the given problem data.

    Raises ValueError when the exponent range puts the growth-rate exponents
    out of their admissible window; that failure must surface, not pass
    silently.
    """
    n = prob.mesh.n
    p_minus = prob.exponent.p_minus
    p_plus = prob.exponent.p_plus
    k_inf = prob.modulation.k_inf
    rng = np.random.default_rng(seed)
    n_plus = gn_constant_estimate(prob.mesh, p_plus, rng=rng, dictionary=dictionary)
    n_minus = gn_constant_estimate(prob.mesh, p_minus, rng=rng, dictionary=dictionary)
    s_plus = sobolev_constant_estimate(prob.mesh, p_plus, rng=rng, dictionary=dictionary)
    s_minus = sobolev_constant_estimate(prob.mesh, p_minus, rng=rng, dictionary=dictionary)
    return BoundConstants(
        h_n=hardy_constant(n),
        c1=c1_constant(p_minus, n),
        alpha_plus=interpolation_exponent(p_plus, n),
        alpha_minus=interpolation_exponent(p_minus, n),
        gamma_plus=growth_rate_exponent(p_plus, n),
        gamma_minus=growth_rate_exponent(p_minus, n),
        n_plus=n_plus,
        n_minus=n_minus,
        c_star=c_star_constant(k_inf, p_minus, p_plus, n_minus, n_plus, n),
        s_plus=s_plus,
        s_minus=s_minus,
    )


def upper_bound_negative_energy(prob: Problem, u0: np.ndarray) -> float:
    """Upper bound on the blow-up time under negative initial modified energy.

    Returns (||u0/r||^2 + ||grad u0||^2) / (p_minus (2 - p_minus) J(u0, 0)),
    positive because the gate forces J(u0, 0) < 0 while 2 - p_minus < 0.
    """
    e0 = modified_energy(prob, u0, 0.0)
    if not e0 < 0.0:
        raise ValueError(
            f"not applicable: requires negative initial modified energy (got E = {e0:.6g})"
        )
    j0 = energy_j(prob, u0, 0.0)
    p_minus = prob.exponent.p_minus
    return 2.0 * lyapunov(prob, u0) / (p_minus * (2.0 - p_minus) * j0)


def upper_bound_positive_energy(prob: Problem, u0: np.ndarray) -> float:
    """Upper bound on the blow-up time for small nonnegative modified energy.

    Applicable when 0 <= c1 * E(u0, 0) < L(0); combines the quadratic growth
    functional with the weighted-norm constant through
    M(0) = L(0) - c1 * E(u0, 0).
    """
    e0 = modified_energy(prob, u0, 0.0)
    if e0 < 0.0:
        raise ValueError(
            f"not applicable: requires nonnegative initial modified energy "
            f"(got E = {e0:.6g}; the negative-energy bound applies instead)"
        )
    c1 = c1_constant(prob.exponent.p_minus, prob.mesh.n)
    l0 = lyapunov(prob, u0)
    if not c1 * e0 < l0:
        raise ValueError(
            f"not applicable: requires c1 * E(u0, 0) < L(0) "
            f"(got c1*E = {c1 * e0:.6g}, L(0) = {l0:.6g})"
        )
    m0 = l0 - c1 * e0
    p_plus = prob.exponent.p_plus
    return 4.0 * p_plus * c1 * l0 / ((p_plus - 2.0) ** 2 * p_plus * m0)


def inverse_power_sum_integral(lower: float, gamma_plus: float,
                               gamma_minus: float) -> float:
    """Certified value of the integral of 1/(s^g+ + s^g-) from ``lower`` to
    infinity.

    Numerical quadrature covers [lower, S_big] after the substitution
    s = lower * e^x; the remaining tail is replaced by the analytic
    under-estimate S_big^(1-gmax) / (2 (gmax - 1)), valid since
    s^g+ + s^g- <= 2 s^gmax for s >= 1.  Under-estimating keeps the derived
    lower bound on the blow-up time valid.
    """
    if lower <= 0.0:
        raise ValueError(f"integral start must be positive (got {lower})")
    if min(gamma_plus, gamma_minus) <= 1.0:
        raise ValueError("tail integral diverges unless both exponents exceed 1")
    s_big = 1e6 * max(1.0, lower)
    gmax = max(gamma_plus, gamma_minus)

    def integrand(x: float) -> float:
        s = lower * math.exp(x)
        return s / (s**gamma_plus + s**gamma_minus)

    x_max = math.log(s_big / lower)
    value, _ = quad(integrand, 0.0, x_max, limit=200, epsabs=0.0, epsrel=1e-12)
    tail = s_big ** (1.0 - gmax) / (2.0 * (gmax - 1.0))
    return value + tail


def lower_bound_time(growth_at_t0: float, t0: float,
                     constants: BoundConstants) -> float:
    """Certified lower bound on the blow-up time from the growth ODE.

    Adds to ``t0`` the tail integral of the reciprocal growth rate divided
    by the ODE constant.
    """
    integral = inverse_power_sum_integral(growth_at_t0, constants.gamma_plus,
                                          constants.gamma_minus)
    return t0 + integral / constants.c_star


@dataclass(frozen=True)
class ConcavityCheck:
    """Outcome of the discrete concavity test on a sampled function."""

    passed: bool
    bound: float
    worst_defect: float


def concavity_check(times: np.ndarray, values: np.ndarray, theta: float, *,
                    rtol: float = 0.02) -> ConcavityCheck:
    """Check psi'' psi - (1 + theta) (psi')^2 >= 0 on sampled data.

    Derivatives are three-point finite differences on the (possibly
    nonuniform) sample grid; the defect at each interior sample may dip
    below zero by at most ``rtol`` relative to the local term magnitudes,
    absorbing discretization error of genuinely saturating cases.  Returns
    the verdict together with the implied upper bound
    values[0] / (theta * psi'(0)).
    """
    t = np.asarray(times, dtype=float)
    psi = np.asarray(values, dtype=float)
    if theta <= 0.0:
        raise ValueError(f"theta must be positive (got {theta})")
    if t.shape != psi.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if t.size < 5:
        raise ValueError("need at least 5 samples for the concavity check")
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("times must be strictly increasing")
    if not psi[0] > 0.0:
        raise ValueError(f"initial value must be positive (got {psi[0]:.6g})")

    # derivative at the left end from the quadratic through the first three
    # samples (second-order one-sided difference)
    quad_coef = np.polyfit(t[:3] - t[0], psi[:3], 2)
    dpsi0 = float(quad_coef[1])
    if not dpsi0 > 0.0:
        raise ValueError(
            f"initial derivative must be positive (got {dpsi0:.6g})"
        )

    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    first = (-h1 / (h0 * (h0 + h1)) * psi[:-2]
             + (h1 - h0) / (h0 * h1) * psi[1:-1]
             + h0 / (h1 * (h0 + h1)) * psi[2:])
    second = 2.0 * (psi[:-2] / (h0 * (h0 + h1))
                    - psi[1:-1] / (h0 * h1)
                    + psi[2:] / (h1 * (h0 + h1)))
    defect = psi[1:-1] * second - (1.0 + theta) * first**2
    scale = np.abs(psi[1:-1] * second) + (1.0 + theta) * first**2 + 1e-300
    relative = defect / scale
    worst = float(np.min(relative))
    return ConcavityCheck(
        passed=worst >= -rtol,
        bound=float(psi[0] / (theta * dpsi0)),
        worst_defect=worst,
    )


@dataclass(frozen=True)
class Verdict:
    """Comparison outcome of one bound against the observed blow-up."""

    bound: str
    status: str  # "satisfied" | "violated" | "not-applicable"
    reason: str
    evidence: dict

    def as_json_dict(self) -> dict:
        return {
            "bound": self.bound,
            "status": self.status,
            "reason": self.reason,
            "evidence": self.evidence,
        }


#: Conventions baked into every report.
REPORT_NOTES = (
    "positive-energy bound uses a zero additive offset in its denominator: "
    "M(0) = L(0) - c1 * E(u0, 0)",
    "growth-rate exponents use the conjugate-pair convention "
    "gamma = (1 - alpha) q / (2 - alpha q)",
)


@dataclass(frozen=True)
class BlowupReport:
    """All bounds, constants, and verdicts for one experiment."""

    t_num: float | None
    t_num_bracket: tuple[float, float] | None
    t_upper_1: float | None
    t_upper_2: float | None
    t_lower: float
    constants: BoundConstants
    verdicts: tuple[Verdict, ...]
    notes: tuple[str, ...] = REPORT_NOTES

    @property
    def no_upper_bound_applies(self) -> bool:
        """True when both upper-bound gates failed on this initial state."""
        return self.t_upper_1 is None and self.t_upper_2 is None

    def as_json_dict(self) -> dict:
        return {
            "t_num": self.t_num,
            "t_num_bracket": (list(self.t_num_bracket)
                              if self.t_num_bracket is not None else None),
            "t_upper_1": self.t_upper_1,
            "t_upper_2": self.t_upper_2,
            "t_lower": self.t_lower,
            "constants": self.constants.as_report_dict(),
            "verdicts": [v.as_json_dict() for v in self.verdicts],
            "notes": list(self.notes),
        }


def build_report(prob: Problem, u0: np.ndarray, *,
                 times: np.ndarray | None = None,
                 growth_values: np.ndarray | None = None,
                 termination: str | None = None,
                 t0: float = 0.0,
                 seed: int = 0,
                 dictionary: dict[str, np.ndarray] | None = None) -> BlowupReport:
    """Assemble the full bound report for one experiment.

    When trajectory data (times, growth values, termination reason) is
    supplied and the run blew up, the observed blow-up bracket is compared
    against each bound; otherwise the bounds are reported without verdict
    comparisons.
    """
    constants = compute_constants(prob, seed=seed, dictionary=dictionary)
    e0 = modified_energy(prob, u0, 0.0)
    j0 = energy_j(prob, u0, 0.0)
    l0 = lyapunov(prob, u0)

    t_num: float | None = None
    bracket: tuple[float, float] | None = None
    no_blowup_reason = "no trajectory supplied"
    if times is not None and growth_values is not None and termination is not None:
        if termination in (TERMINATION_BLOWUP, TERMINATION_UNDERFLOW):
            estimate = detect_blowup_time(times, growth_values, termination)
            t_num = estimate.t_num
            bracket = estimate.bracket
        else:
            no_blowup_reason = (
                f"trajectory terminated with {termination!r}; no numerical "
                "blow-up time to compare against"
            )

    # growth value at the lower-bound anchor time
    if t0 < 0.0:
        raise ValueError(f"t0 must be nonnegative (got {t0})")
    if t0 == 0.0:
        t0_used, growth_at_t0 = 0.0, l0
    else:
        if times is None or growth_values is None:
            raise ValueError(
                "a trajectory is required to anchor the lower bound at t0 > 0"
            )
        times_arr = np.asarray(times, dtype=float)
        idx = int(np.searchsorted(times_arr, t0 - 1e-12))
        if idx >= times_arr.size:
            raise ValueError(
                f"t0 = {t0:.6g} lies beyond the last recorded time "
                f"{times_arr[-1]:.6g}"
            )
        t0_used = float(times_arr[idx])
        growth_at_t0 = float(np.asarray(growth_values, dtype=float)[idx])

    verdicts: list[Verdict] = []

    def ordering_verdict(name: str, value: float | None, gate_reason: str | None,
                         check, describe: str) -> None:
        if value is None:
            verdicts.append(Verdict(bound=name, status="not-applicable",
                                    reason=gate_reason, evidence=evidence_base))
            return
        if t_num is None:
            verdicts.append(Verdict(
                bound=name, status="not-applicable",
                reason=f"bound computed, but {no_blowup_reason}",
                evidence={**evidence_base, "value": value},
            ))
            return
        ok = check(value)
        verdicts.append(Verdict(
            bound=name, status="satisfied" if ok else "violated",
            reason=describe,
            evidence={**evidence_base, "value": value,
                      "t_num": t_num, "t_num_bracket": list(bracket)},
        ))

    evidence_base = {"E0": e0, "J0": j0, "L0": l0,
                     "c1_E0": constants.c1 * e0}

    try:
        t_upper_1: float | None = upper_bound_negative_energy(prob, u0)
        gate_1 = None
    except ValueError as exc:
        t_upper_1, gate_1 = None, str(exc)
    ordering_verdict(
        "t_upper_1", t_upper_1, gate_1,
        lambda v: bracket[0] <= v * UPPER_BOUND_SLACK,
        f"observed bracket low end must not exceed the bound times {UPPER_BOUND_SLACK}",
    )

    try:
        t_upper_2: float | None = upper_bound_positive_energy(prob, u0)
        gate_2 = None
    except ValueError as exc:
        t_upper_2, gate_2 = None, str(exc)
    ordering_verdict(
        "t_upper_2", t_upper_2, gate_2,
        lambda v: bracket[0] <= v,
        "observed bracket low end must not exceed the bound",
    )

    t_lower = lower_bound_time(growth_at_t0, t0_used, constants)
    if t_num is None:
        verdicts.append(Verdict(
            bound="t_lower", status="not-applicable",
            reason=f"bound computed, but {no_blowup_reason}",
            evidence={**evidence_base, "value": t_lower, "t0": t0_used,
                      "growth_at_t0": growth_at_t0},
        ))
    else:
        ok = t_lower <= bracket[1]
        verdicts.append(Verdict(
            bound="t_lower", status="satisfied" if ok else "violated",
            reason="lower bound must not exceed the observed bracket high end",
            evidence={**evidence_base, "value": t_lower, "t0": t0_used,
                      "growth_at_t0": growth_at_t0,
                      "t_num": t_num, "t_num_bracket": list(bracket)},
        ))

    return BlowupReport(
        t_num=t_num,
        t_num_bracket=bracket,
        t_upper_1=t_upper_1,
        t_upper_2=t_upper_2,
        t_lower=t_lower,
        constants=constants,
        verdicts=tuple(verdicts),
    )

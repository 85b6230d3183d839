"""Adaptive implicit-explicit time stepper for the singular-weight model.

The semidiscrete system on the radial mesh reads

    (W + A) du/dt + A u = k(t) F(u, t),      F_i = w_i |u_i|^{p_i(t) - 2} u_i,

where W is the tridiagonal mass operator weighted by 1/r^2 and A the
stiffness operator.  One step solves

    (W + (1 + tau) A) u_new = (W + A) u + tau * k(t + tau) * F(u, t),

a symmetric positive definite tridiagonal system: the stiff linear parts are
implicit, the power nonlinearity is frozen at the old state.  Step control
rejects and halves the step whenever the quadratic growth functional L jumps
by more than a configured factor, so the stepper tracks solutions into
finite-time blow-up until L exceeds a large multiple of its initial value.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .functionals import FunctionalSnapshot, Problem, p_term, snapshot
from .mesh import RadialMesh, dirichlet_integral, grad_l2_sq, weighted_l2_sq

logger = logging.getLogger(__name__)

TERMINATION_HORIZON = "horizon"
TERMINATION_BLOWUP = "blow-up"
TERMINATION_UNDERFLOW = "step-underflow"

TRAJECTORY_CSV_HEADER = "t,tau,J,I,E,L,K,M,P_term,energy_residual"


class StepOverflowError(ArithmeticError):
    """A step produced non-finite values; the caller must reduce the step."""


@dataclass(frozen=True)
class State:
    """Nodal solution values at a fixed time."""

    t: float
    u: np.ndarray


@dataclass(frozen=True)
class SolverConfig:
    """Step-control parameters of the adaptive run loop.

    ``blowup_factor`` is relative: the run declares numerical blow-up once
    L(t) exceeds blowup_factor * L(0).
    """

    tau0: float = 1e-3
    tau_min: float = 1e-12
    t_end: float = 5.0
    growth_cap: float = 1.5
    blowup_factor: float = 1e8
    step_growth: float = 1.2

    def __post_init__(self) -> None:
        if not 0.0 < self.tau_min <= self.tau0:
            raise ValueError(
                f"need 0 < tau_min <= tau0 (got tau_min={self.tau_min}, tau0={self.tau0})"
            )
        if self.t_end <= 0.0:
            raise ValueError(f"t_end must be positive (got {self.t_end})")
        if self.growth_cap <= 1.0:
            raise ValueError(f"growth_cap must exceed 1 (got {self.growth_cap})")
        if self.blowup_factor <= 1.0:
            raise ValueError(
                f"blowup_factor must exceed 1 (got {self.blowup_factor})"
            )
        if self.step_growth < 1.0:
            raise ValueError(f"step_growth must be >= 1 (got {self.step_growth})")


@dataclass(frozen=True)
class Operators:
    """Tridiagonal operators of the semidiscrete system.

    ``w_diag``/``w_off`` realize the 1/r^2-weighted mass form, ``a_diag``/
    ``a_off`` the gradient form (both symmetric; off-diagonals have length
    M - 1), and ``load_w`` carries the hat-function masses used to test the
    nodal nonlinearity.
    """

    w_diag: np.ndarray
    w_off: np.ndarray
    a_diag: np.ndarray
    a_off: np.ndarray
    load_w: np.ndarray


def assemble_operators(mesh: RadialMesh) -> Operators:
    """Build the weighted mass and stiffness operators for ``mesh``.

    The quadratic forms match the mesh functionals exactly:
    u^T W u = weighted_l2_sq(u) and u^T A u = grad_l2_sq(u).
    """
    omega = mesh.omega
    g = mesh.grad_coef
    a_diag = np.empty(mesh.M)
    a_diag[0] = g[0]
    a_diag[1:] = g[:-1] + g[1:]
    a_diag *= omega
    a_off = -omega * g[:-1]
    return Operators(
        w_diag=omega * mesh.sing_diag,
        w_off=omega * mesh.sing_off,
        a_diag=a_diag,
        a_off=a_off,
        load_w=omega * mesh.w,
    )


@dataclass
class TrajectoryRecord:
    """Accepted states of one run plus the functional history.

    ``taus[m]`` is the step that produced snapshot ``m`` (0 for the initial
    entry); ``states[m]`` the nodal values behind ``snapshots[m]``.
    """

    snapshots: list[FunctionalSnapshot]
    taus: list[float]
    states: list[np.ndarray]
    termination: str
    rejected_steps: int
    config: SolverConfig = field(repr=False, default=SolverConfig())

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def lyapunov_values(self) -> np.ndarray:
        return np.array([s.L for s in self.snapshots])

    def __len__(self) -> int:
        return len(self.snapshots)


def _advance(ops: Operators, prob: Problem, u: np.ndarray, t: float,
             tau: float) -> np.ndarray:
    p_vals = prob.p_values(t)
    k_next = float(prob.modulation.k(t + tau))
    u_new = _backend.imex_step(ops.w_diag, ops.w_off, ops.a_diag, ops.a_off,
                               u, p_vals, ops.load_w, k_next, tau)
    return np.asarray(u_new)


def step(state: State, tau: float, prob: Problem, ops: Operators) -> State:
    """Advance one implicit-explicit step of size ``tau``.

    Raises StepOverflowError when the update overflows to non-finite values,
    which signals that the caller must retry with a smaller step.
    """
    if tau <= 0.0:
        raise ValueError(f"step size must be positive (got {tau})")
    u_new = _advance(ops, prob, np.asarray(state.u, dtype=float), state.t, tau)
    if not np.all(np.isfinite(u_new)):
        raise StepOverflowError(
            f"step from t={state.t:.6g} with tau={tau:.3g} produced non-finite values"
        )
    return State(t=state.t + tau, u=u_new)


def _quadratic_growth(mesh: RadialMesh, u: np.ndarray) -> float:
    return 0.5 * (weighted_l2_sq(mesh, u) + grad_l2_sq(mesh, u))


def run(u0: np.ndarray, prob: Problem, config: SolverConfig) -> TrajectoryRecord:
    """Integrate from ``u0`` with adaptive steps until a terminal event.

    Terminates at the horizon t_end, at numerical blow-up (L exceeding
    blowup_factor * L(0)), or when step halving pushes the step below
    tau_min (reported as step-underflow, adjacent to blow-up).
    """
    u = np.array(u0, dtype=float)
    if u.shape != prob.mesh.r.shape:
        raise ValueError(
            f"initial datum has {u.shape[0] if u.ndim == 1 else u.shape} entries, "
            f"mesh has {prob.mesh.M} nodes"
        )
    if not np.all(np.isfinite(u)):
        raise ValueError("initial datum must be finite")
    if not np.any(u != 0.0):
        raise ValueError("initial datum must not be identically zero")

    ops = assemble_operators(prob.mesh)
    first = snapshot(prob, u, 0.0)
    threshold = config.blowup_factor * first.L
    calm_factor = math.sqrt(config.growth_cap)

    snapshots = [first]
    taus = [0.0]
    states = [u.copy()]
    rejected = 0
    t = 0.0
    tau = min(config.tau0, config.t_end)
    L_prev = first.L
    termination: str | None = None

    while termination is None:
        remaining = config.t_end - t
        if remaining <= 1e-14 * config.t_end:
            termination = TERMINATION_HORIZON
            break
        tau_try = min(tau, remaining)
        # absorb a roundoff sliver into the final step instead of taking a
        # degenerate ~1e-14 step right before the horizon
        if remaining - tau_try <= 1e-8 * tau_try:
            tau_try = remaining

        overflow = False
        try:
            u_new = _advance(ops, prob, u, t, tau_try)
        except FloatingPointError:
            overflow = True
        if not overflow:
            L_new = _quadratic_growth(prob.mesh, u_new)
            overflow = not (np.all(np.isfinite(u_new)) and np.isfinite(L_new))

        if overflow or L_new > config.growth_cap * L_prev:
            rejected += 1
            tau *= 0.5
            if tau < config.tau_min:
                termination = TERMINATION_UNDERFLOW
            continue

        t += tau_try
        u = u_new
        snapshots.append(snapshot(prob, u, t))
        taus.append(tau_try)
        states.append(u.copy())
        if L_new > threshold:
            termination = TERMINATION_BLOWUP
            break
        if L_new <= calm_factor * L_prev:
            tau = min(tau * config.step_growth, config.tau0)
        L_prev = L_new

    logger.info(
        "run finished: termination=%s steps=%d rejected=%d t_last=%.6g L_last=%.6g",
        termination, len(snapshots) - 1, rejected, snapshots[-1].t,
        snapshots[-1].L,
    )
    return TrajectoryRecord(snapshots=snapshots, taus=taus, states=states,
                            termination=termination, rejected_steps=rejected,
                            config=config)


@dataclass(frozen=True)
class BlowupEstimate:
    """Extrapolated blow-up time with its bracketing interval."""

    t_num: float
    bracket: tuple[float, float]
    gamma_hat: float


def detect_blowup_time(times: np.ndarray, growth_values: np.ndarray,
                       termination: str) -> BlowupEstimate:
    """Extrapolate the blow-up time from the tail growth of L(t).

    Fits the effective power law L' ~ L^gamma on the last decade of growth,
    then fits L^{-(gamma-1)} — which decays linearly in time for an exact
    power law — by a straight line and returns its root.  The result is
    bracketed below by the last computed time.
    """
    if termination not in (TERMINATION_BLOWUP, TERMINATION_UNDERFLOW):
        raise ValueError(
            f"record terminated with {termination!r}; no blow-up to locate"
        )
    t = np.asarray(times, dtype=float)
    L = np.asarray(growth_values, dtype=float)
    if t.shape != L.shape or t.ndim != 1:
        raise ValueError("times and growth values must be 1-d arrays of equal length")
    if t.size < 5:
        raise ValueError("too few samples to fit a blow-up rate (need >= 5)")

    below = np.nonzero(L < L[-1] / 10.0)[0]
    start = below[-1] + 1 if below.size else 0
    start = min(start, t.size - 5)
    tt = t[start:]
    LL = L[start:]

    dL = np.gradient(LL, tt)
    good = (dL > 0.0) & (LL > 0.0)
    if np.count_nonzero(good) < 3:
        raise ValueError("growth values show no usable increase on the tail")
    gamma_hat = float(np.polyfit(np.log(LL[good]), np.log(dL[good]), 1)[0])
    if gamma_hat <= 1.01:
        raise ValueError(
            f"fitted growth rate {gamma_hat:.4g} does not indicate finite-time blow-up"
        )

    y = LL ** (-(gamma_hat - 1.0))
    slope, intercept = np.polyfit(tt, y, 1)
    if slope >= 0.0:
        raise ValueError("transformed growth series does not decay; cannot extrapolate")
    t_num = max(float(-intercept / slope), float(tt[-1]))
    return BlowupEstimate(t_num=t_num, bracket=(float(tt[-1]), t_num),
                          gamma_hat=gamma_hat)


def detect_blowup_from_record(record: TrajectoryRecord) -> BlowupEstimate:
    """Convenience wrapper of detect_blowup_time for a TrajectoryRecord."""
    return detect_blowup_time(record.times, record.lyapunov_values,
                              record.termination)


def verify_energy_identity(record: TrajectoryRecord, prob: Problem, *,
                           include_p_term: bool = True) -> np.ndarray:
    """Residuals of the dissipation balance along the record.

    At each accepted time the energy J plus the accumulated dissipation
    (time-derivative norms via backward difference quotients, right-endpoint
    rectangle rule in time) must return the initial energy; the residual
    series quantifies how far the discrete trajectory drifts from that
    balance.  ``include_p_term`` exists as a verification hook: disabling it
    drops the exponent-drift contribution, which must break the balance
    whenever the exponent actually moves in time.
    """
    m_count = len(record.snapshots)
    if m_count < 2:
        return np.empty(0)
    mesh = prob.mesh
    j0 = record.snapshots[0].J
    residuals = np.empty(m_count - 1)
    acc = 0.0
    for m in range(1, m_count):
        tau = record.taus[m]
        t_m = record.snapshots[m].t
        u_m = record.states[m]
        du = (u_m - record.states[m - 1]) / tau
        diss = weighted_l2_sq(mesh, du) + grad_l2_sq(mesh, du)
        p_m = prob.p_values(t_m)
        au = np.abs(u_m)
        source = dirichlet_integral(mesh, au**p_m / p_m)
        rate = diss + float(prob.modulation.k_prime(t_m)) * source
        if include_p_term:
            rate += float(prob.modulation.k(t_m)) * p_term(prob, u_m, t_m)
        acc += tau * rate
        residuals[m - 1] = record.snapshots[m].J + acc - j0
    return residuals


def verify_growth_derivative(record: TrajectoryRecord) -> np.ndarray:
    """Residuals of dL/dt + I at interior record times.

    Uses the three-point finite-difference derivative on the (nonuniform)
    accepted-time grid; the derivative of the quadratic growth functional
    must equal minus the stationarity functional I.
    """
    if len(record.snapshots) < 3:
        raise ValueError("need at least 3 snapshots to form a centered derivative")
    t = record.times
    L = record.lyapunov_values
    I_vals = np.array([s.I for s in record.snapshots])
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    dL = (-h1 / (h0 * (h0 + h1)) * L[:-2]
          + (h1 - h0) / (h0 * h1) * L[1:-1]
          + h0 / (h1 * (h0 + h1)) * L[2:])
    return dL + I_vals[1:-1]


def _format_float(x: float) -> str:
    return repr(float(x))


def write_trajectory_csv(record: TrajectoryRecord, prob: Problem,
                         path: str) -> None:
    """Write the record as CSV with the fixed trajectory header.

    The energy_residual column holds the dissipation-balance residual series
    (0 for the initial row).
    """
    residuals = np.concatenate(
        [[0.0], verify_energy_identity(record, prob)]
    ) if len(record.snapshots) > 1 else np.zeros(len(record.snapshots))
    lines = [TRAJECTORY_CSV_HEADER]
    for snap, tau, res in zip(record.snapshots, record.taus, residuals):
        lines.append(",".join(_format_float(v) for v in (
            snap.t, tau, snap.J, snap.I, snap.E, snap.L, snap.K, snap.M,
            snap.P_term, res,
        )))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path: str) -> dict[str, np.ndarray]:
    """Read a trajectory CSV back into column arrays keyed by header name."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRAJECTORY_CSV_HEADER:
            raise ValueError(
                f"unexpected trajectory header {header!r}; expected "
                f"{TRAJECTORY_CSV_HEADER!r}"
            )
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    names = TRAJECTORY_CSV_HEADER.split(",")
    if data.size == 0:
        return {name: np.empty(0) for name in names}
    if data.shape[1] != len(names):
        raise ValueError(f"trajectory rows have {data.shape[1]} columns, expected {len(names)}")
    return {name: data[:, i].copy() for i, name in enumerate(names)}

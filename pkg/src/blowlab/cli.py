"""Command-line front end.

Subcommands: validate (model admissibility checks), simulate (one adaptive
run, trajectory CSV plus summary), bounds (blow-up bound report as JSON),
verify (property suite at two resolutions), sweep (one-parameter experiment
family), constants (auxiliary-constant report).

Exit codes: 0 success, 1 failed checks or inapplicable theory, 2 unusable
configuration or command line.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from ._backend import backend_name
from .bounds import (
    build_report,
    compute_constants,
    hardy_check,
    lower_bound_time,
    upper_bound_negative_energy,
    upper_bound_positive_energy,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    apply_override,
    build_experiment,
    load_config,
)
from .functionals import hardy_constant, lyapunov
from .models import log_holder_constant, validate_exponent, validate_modulation
from .solver import (
    TERMINATION_BLOWUP,
    TERMINATION_HORIZON,
    TERMINATION_UNDERFLOW,
    detect_blowup_from_record,
    read_trajectory_csv,
    run,
    verify_energy_identity,
    verify_growth_derivative,
    write_trajectory_csv,
)

logger = logging.getLogger(__name__)


def _effective_seed(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else cfg.seed


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _summary_path(trajectory_path: str) -> str:
    root, _ = os.path.splitext(trajectory_path)
    return root + ".summary.json"


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg)
    problem = exp.problem

    report_p = validate_exponent(problem.exponent, problem.mesh)
    report_k = validate_modulation(problem.modulation)
    messages = report_p.messages() + report_k.messages()

    if not np.any(exp.u0 != 0.0):
        messages.append("initial datum is identically zero")
    boundary = float(np.asarray(exp.initial.values(np.array([1.0]))).reshape(-1)[0])
    scale = max(1.0, float(np.max(np.abs(exp.u0))) if exp.u0.size else 1.0)
    if abs(boundary) > 1e-12 * scale:
        messages.append(f"initial datum must vanish at r = 1 (got {boundary:.6g})")

    holder = log_holder_constant(problem.exponent, problem.mesh)
    for msg in messages:
        print(f"violation: {msg}")
    print(f"log-holder-estimate: {holder!r}")
    print(f"validation: {'OK' if not messages else 'FAIL'}")

    if args.out is not None:
        _emit_json({
            "ok": not messages,
            "violations": messages,
            "log_holder_estimate": holder,
        }, args.out)
    return 0 if not messages else 1


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg)
    record = run(exp.u0, exp.problem, cfg.solver)
    write_trajectory_csv(record, exp.problem, args.out)

    summary: dict = {
        "termination": record.termination,
        "steps": len(record) - 1,
        "rejected_steps": record.rejected_steps,
        "t_last": record.snapshots[-1].t,
        "t_num": None,
        "t_num_bracket": None,
        "gamma_hat": None,
        "backend": backend_name(),
    }
    if record.termination in (TERMINATION_BLOWUP, TERMINATION_UNDERFLOW):
        try:
            estimate = detect_blowup_from_record(record)
        except ValueError as exc:
            summary["detection_error"] = str(exc)
        else:
            summary["t_num"] = estimate.t_num
            summary["t_num_bracket"] = list(estimate.bracket)
            summary["gamma_hat"] = estimate.gamma_hat
    _emit_json(summary, _summary_path(args.out))

    print(f"termination: {record.termination} after {len(record) - 1} steps "
          f"(t_last = {record.snapshots[-1].t!r})")
    if summary["t_num"] is not None:
        print(f"t_num: {summary['t_num']!r} "
              f"bracket: [{summary['t_num_bracket'][0]!r}, {summary['t_num_bracket'][1]!r}]")
    print(f"trajectory: {args.out}")
    print(f"summary: {_summary_path(args.out)}")
    return 0


def cmd_bounds(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg)
    seed = _effective_seed(cfg, args)

    times = growth = termination = None
    if args.trajectory is not None:
        columns = read_trajectory_csv(args.trajectory)
        times, growth = columns["t"], columns["L"]
        summary_file = _summary_path(args.trajectory)
        try:
            with open(summary_file, "r", encoding="utf-8") as fh:
                termination = json.load(fh)["termination"]
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise ConfigError(
                f"cannot read termination reason from {summary_file!r} "
                f"({exc}); produce the trajectory with the simulate command"
            ) from exc

    report = build_report(exp.problem, exp.u0, times=times,
                          growth_values=growth, termination=termination,
                          t0=cfg.t0, seed=seed)
    payload = report.as_json_dict()
    if args.out is None:
        _emit_json(payload, None)
    else:
        _emit_json(payload, args.out)
        for verdict in report.verdicts:
            print(f"{verdict.bound}: {verdict.status} ({verdict.reason})")
        print(f"report: {args.out}")
    if report.no_upper_bound_applies:
        print("no upper-bound theorem applies to this initial state",
              file=sys.stderr)
        return 1
    return 0


def _check_k_monotone(record) -> tuple[bool, float]:
    worst = 0.0
    ok = True
    snaps = record.snapshots
    for prev, cur in zip(snaps, snaps[1:]):
        slack = 1e-8 * (1.0 + abs(prev.K))
        drop = prev.K - cur.K
        worst = max(worst, drop)
        if drop > slack:
            ok = False
    return ok, worst


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    seed = _effective_seed(cfg, args)
    include_p_term = not args.disable_p_term
    resolutions = (512, 1024)
    criteria: list[dict] = []

    def record_criterion(name: str, passed: bool, detail: str) -> None:
        criteria.append({"name": name, "passed": passed, "detail": detail})
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")

    # weighted-norm inequality on random nodal functions
    for nodes in resolutions:
        sub = apply_override(cfg, "mesh.nodes", nodes)
        exp = build_experiment(sub)
        limit = hardy_constant(sub.dimension) * 1.01
        ratio = hardy_check(exp.problem.mesh, trials=300, seed=seed)
        record_criterion(
            f"hardy-ratio[M={nodes}]", ratio <= limit,
            f"max_ratio={ratio:.6g} limit={limit:.6g}",
        )

    # choose a smooth sub-blow-up window from a coarse probe run
    probe_cfg = apply_override(cfg, "mesh.nodes", resolutions[0])
    probe_exp = build_experiment(probe_cfg)
    probe = run(probe_exp.u0, probe_exp.problem, probe_cfg.solver)
    if probe.termination == TERMINATION_HORIZON:
        t_window = cfg.solver.t_end
    else:
        t_window = max(0.4 * probe.snapshots[-1].t, 20.0 * cfg.solver.tau0)

    for nodes in resolutions:
        residual_max: dict[float, float] = {}
        growth_residual: dict[float, float] = {}
        j0_scale = None
        for halving in (1.0, 2.0):
            tau = cfg.solver.tau0 / halving
            sub = apply_override(cfg, "mesh.nodes", nodes)
            sub = apply_override(sub, "solver.t_end", t_window)
            sub = apply_override(sub, "solver.tau0", tau)
            exp = build_experiment(sub)
            record = run(exp.u0, exp.problem, sub.solver)
            residuals = verify_energy_identity(record, exp.problem,
                                               include_p_term=include_p_term)
            residual_max[tau] = float(np.max(np.abs(residuals)))
            j0_scale = abs(record.snapshots[0].J)

            growth_res = verify_growth_derivative(record)
            i_scale = max(max(abs(s.I) for s in record.snapshots), 1e-300)
            growth_residual[tau] = float(np.max(np.abs(growth_res))) / i_scale

            ok_k, worst_drop = _check_k_monotone(record)
            record_criterion(
                f"k-monotonicity[M={nodes},tau={tau:g}]", ok_k,
                f"worst_step_drop={worst_drop:.3g}",
            )

        taus = sorted(residual_max, reverse=True)
        coarse, fine = residual_max[taus[0]], residual_max[taus[1]]
        ratio = coarse / fine if fine > 0.0 else float("inf")
        limit = 1e-3 * j0_scale
        ok_energy = 1.7 <= ratio <= 2.3 and fine <= limit
        record_criterion(
            f"energy-identity[M={nodes}]", ok_energy,
            f"refinement_ratio={ratio:.3f} residual={fine:.3g} limit={limit:.3g}",
        )

        gd_coarse, gd_fine = growth_residual[taus[0]], growth_residual[taus[1]]
        ok_growth = gd_fine <= 1e-2 and gd_fine <= gd_coarse * 1.05
        record_criterion(
            f"growth-derivative[M={nodes}]", ok_growth,
            f"relative_residual={gd_fine:.3g} coarse={gd_coarse:.3g} limit=0.01",
        )

    passed = all(c["passed"] for c in criteria)
    if args.out is not None:
        _emit_json({"passed": passed, "window": t_window,
                    "criteria": criteria}, args.out)
    print(f"verify: {'OK' if passed else 'FAIL'}")
    return 0 if passed else 1


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if cfg.sweep is None:
        raise ConfigError("config has no [sweep] section; nothing to sweep")
    seed = _effective_seed(cfg, args)

    rows = []
    failures = 0
    for value in cfg.sweep.values:
        fields = {"t_num": "", "t_upper_1": "", "t_upper_2": "", "t_lower": ""}
        try:
            sub = apply_override(cfg, cfg.sweep.parameter, value)
            exp = build_experiment(sub)
            record = run(exp.u0, exp.problem, sub.solver)
            status = record.termination
            if record.termination in (TERMINATION_BLOWUP, TERMINATION_UNDERFLOW):
                fields["t_num"] = repr(detect_blowup_from_record(record).t_num)
            for name, bound in (("t_upper_1", upper_bound_negative_energy),
                                ("t_upper_2", upper_bound_positive_energy)):
                try:
                    fields[name] = repr(bound(exp.problem, exp.u0))
                except ValueError:
                    pass
            constants = compute_constants(exp.problem, seed=seed)
            fields["t_lower"] = repr(lower_bound_time(
                lyapunov(exp.problem, exp.u0), 0.0, constants))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            status = f"error: {exc}"
            failures += 1
        rows.append((value, fields, status))
        print(f"{cfg.sweep.parameter}={value:g}: {status}")

    lines = ["parameter,value,t_num,t_upper_1,t_upper_2,t_lower,status"]
    for value, fields, status in rows:
        lines.append(",".join([
            cfg.sweep.parameter, repr(float(value)), fields["t_num"],
            fields["t_upper_1"], fields["t_upper_2"], fields["t_lower"],
            '"' + status.replace('"', "'") + '"',
        ]))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"sweep table: {args.out}")
    return 1 if failures == len(rows) else 0


def cmd_constants(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg)
    seed = _effective_seed(cfg, args)
    constants = compute_constants(exp.problem, seed=seed)
    payload = {
        "constants": constants.as_report_dict(),
        "s_plus": constants.s_plus,
        "s_minus": constants.s_minus,
        "diameter": constants.diameter,
        "p_minus": exp.problem.exponent.p_minus,
        "p_plus": exp.problem.exponent.p_plus,
        "k_inf": exp.problem.modulation.k_inf,
        "seed": seed,
    }
    _emit_json(payload, args.out)
    if args.out is not None:
        print(f"constants: {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowlab",
        description=(
            "Numerical laboratory for a nonlinear evolution model with an "
            "inverse-square weight on the unit ball: simulation, functional "
            "tracking, and blow-up time bounds."
        ),
    )
    parser.add_argument("--verbose", action="store_true",
                        help="log progress details to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, *, needs_out: bool = False):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="experiment INI file")
        sub.add_argument("--seed", type=int, default=None,
                         help="override the configured random seed")
        sub.add_argument("--out", required=needs_out, default=None,
                         help="output path" + ("" if needs_out else " (defaults to stdout for JSON)"))
        sub.set_defaults(func=func)
        return sub

    add("validate", cmd_validate, "check model admissibility conditions")
    add("simulate", cmd_simulate, "run one experiment and write the trajectory",
        needs_out=True)
    sub_bounds = add("bounds", cmd_bounds, "compute blow-up time bounds and verdicts")
    sub_bounds.add_argument("--trajectory", default=None,
                            help="trajectory CSV from a previous simulate call")
    sub_verify = add("verify", cmd_verify,
                     "run the property suite at two resolutions")
    sub_verify.add_argument("--disable-p-term", action="store_true",
                            help="verification hook: drop the exponent-drift "
                                 "term from the energy balance")
    add("sweep", cmd_sweep, "run a one-parameter experiment family",
        needs_out=True)
    add("constants", cmd_constants, "report the auxiliary constants")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Timing comparison of the compiled and pure-Python stepping kernels.

Both backends are driven in one process through ``set_backend``: first the
raw implicit-explicit step at several mesh sizes, then one full blow-up run
at the largest size.  Reported numbers are the best of ``--repeats`` timings.

    python3 benchmarks/bench_kernels.py --sizes 256,1024,4096
"""
from __future__ import annotations

import argparse
import time

from blowlab import _backend
from blowlab.functionals import Problem
from blowlab.mesh import build_mesh
from blowlab.models import constant_exponent, constant_modulation
from blowlab.solver import SolverConfig, assemble_operators, run


def best_of(fn, repeats: int) -> float:
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return min(samples)


def bench_step(nodes: int, steps: int, repeats: int) -> dict[str, float]:
    mesh = build_mesh(3, nodes, grading=2.0)
    prob = Problem(mesh, constant_exponent(3.0), constant_modulation(1.0))
    ops = assemble_operators(mesh)
    u = 22.0 * (1.0 - mesh.r**2)
    p_vals = prob.p_values(0.0)

    timings = {}
    for name in _backend.available_backends():
        _backend.set_backend(name)

        def workload():
            for _ in range(steps):
                _backend.imex_step(ops.w_diag, ops.w_off, ops.a_diag,
                                   ops.a_off, u, p_vals, ops.load_w,
                                   1.0, 1e-3)

        timings[name] = best_of(workload, repeats) / steps
    return timings


def bench_run(nodes: int, repeats: int) -> dict[str, float]:
    mesh = build_mesh(3, nodes, grading=2.0)
    prob = Problem(mesh, constant_exponent(3.0), constant_modulation(1.0))
    u0 = 30.0 * (1.0 - mesh.r**2)
    config = SolverConfig(tau0=1e-3, t_end=5.0)

    timings = {}
    for name in _backend.available_backends():
        _backend.set_backend(name)
        timings[name] = best_of(lambda: run(u0, prob, config), repeats)
    return timings


def format_row(label: str, timings: dict[str, float], unit: str) -> str:
    cells = [f"{label:>10s}"]
    for name in ("python", "compiled"):
        cells.append(f"{timings[name] * 1e3:12.3f}" if name in timings
                     else f"{'n/a':>12s}")
    if "compiled" in timings:
        cells.append(f"{timings['python'] / timings['compiled']:9.2f}x")
    return " ".join(cells) + " " + unit


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="compare the kernel backends on identical workloads")
    parser.add_argument("--sizes", default="256,512,1024,2048,4096",
                        help="comma-separated node counts")
    parser.add_argument("--steps", type=int, default=200,
                        help="kernel invocations per timing sample")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing samples per workload (best is kept)")
    args = parser.parse_args(argv)
    sizes = [int(part) for part in args.sizes.split(",") if part.strip()]

    initial = _backend.backend_name()
    print(f"available backends: {', '.join(_backend.available_backends())}")
    print(f"{'nodes':>10s} {'python':>12s} {'compiled':>12s} {'speedup':>10s}")
    try:
        for nodes in sizes:
            print(format_row(str(nodes), bench_step(nodes, args.steps,
                                                    args.repeats),
                             "ms/step"))
        largest = max(sizes)
        print(format_row(f"run@{largest}", bench_run(largest, args.repeats),
                         "ms/run"))
    finally:
        _backend.set_backend(initial)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

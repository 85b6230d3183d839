"""Kernel backend selection.

Two interchangeable implementations of the stepping kernels exist: a compiled
extension (built from _kernels.pyx) and a pure NumPy/SciPy module.  The
compiled one is preferred when importable; setting the environment variable
BLOWLAB_FORCE_PYTHON to a non-empty value other than "0" forces the pure
Python path.  set_backend switches at runtime, which the benchmark uses to
time both implementations in one process.
"""
from __future__ import annotations

import logging
import os

from . import _kernels_py

logger = logging.getLogger(__name__)

try:  # pragma: no cover - depends on the build environment
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def _initial_choice() -> str:
    forced = os.environ.get("BLOWLAB_FORCE_PYTHON", "")
    if forced not in ("", "0"):
        return "python"
    return "compiled" if _compiled is not None else "python"


_active_name = _initial_choice()
_active = _BACKENDS[_active_name]
if _compiled is None:
    logger.debug("compiled kernels unavailable; using the python backend")


def available_backends() -> tuple[str, ...]:
    """Names of the kernel implementations importable in this process."""
    return tuple(sorted(_BACKENDS))


def backend_name() -> str:
    """Name of the backend currently answering kernel calls."""
    return _active_name


def set_backend(name: str) -> None:
    """Route subsequent kernel calls to the named implementation."""
    global _active_name, _active
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        )
    _active_name = name
    _active = _BACKENDS[name]


def thomas_solve(diag, off, rhs):
    """Solve an SPD tridiagonal system with the active backend."""
    return _active.thomas_solve(diag, off, rhs)


def imex_step(w_diag, w_off, a_diag, a_off, u, p_vals, load_w, k_next, tau):
    """Advance one implicit-explicit step with the active backend."""
    return _active.imex_step(w_diag, w_off, a_diag, a_off, u, p_vals,
                             load_w, k_next, tau)

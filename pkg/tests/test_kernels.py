"""Stepping kernels: dense-solve oracles and backend agreement."""
import os
import subprocess
import sys

import numpy as np
import pytest

from blowlab import _backend
from blowlab import _kernels_py


def random_spd_tridiag(rng, m):
    """Diagonally dominant symmetric tridiagonal system (hence SPD)."""
    off = rng.standard_normal(m - 1)
    diag = np.abs(rng.standard_normal(m)) + 1.0
    diag[:-1] += np.abs(off)
    diag[1:] += np.abs(off)
    return diag, off


def dense_from_tridiag(diag, off):
    a = np.diag(diag)
    a += np.diag(off, 1) + np.diag(off, -1)
    return a


@pytest.fixture(params=sorted(_backend.available_backends()))
def kernels(request):
    return _backend._BACKENDS[request.param]


def test_thomas_solve_matches_dense(kernels):
    rng = np.random.default_rng(0)
    for m in (1, 2, 3, 17, 200):
        diag, off = random_spd_tridiag(rng, m)
        rhs = rng.standard_normal(m)
        x = kernels.thomas_solve(diag, off, rhs)
        expected = np.linalg.solve(dense_from_tridiag(diag, off), rhs)
        np.testing.assert_allclose(x, expected, rtol=1e-11, atol=1e-13)


def test_thomas_solve_identity(kernels):
    rhs = np.array([3.0, -1.0, 2.5])
    x = kernels.thomas_solve(np.ones(3), np.zeros(2), rhs)
    np.testing.assert_allclose(x, rhs, rtol=1e-15)


def test_thomas_solve_shape_validation(kernels):
    with pytest.raises(ValueError):
        kernels.thomas_solve(np.ones(4), np.zeros(4), np.ones(4))
    with pytest.raises(ValueError):
        kernels.thomas_solve(np.ones(4), np.zeros(3), np.ones(3))


def test_imex_step_matches_explicit_construction(kernels):
    rng = np.random.default_rng(1)
    m = 40
    w_diag, w_off = random_spd_tridiag(rng, m)
    a_diag, a_off = random_spd_tridiag(rng, m)
    u = rng.standard_normal(m)
    p_vals = rng.uniform(2.1, 3.5, m)
    load_w = np.abs(rng.standard_normal(m)) + 0.1
    k_next, tau = 1.7, 1e-3

    out = kernels.imex_step(w_diag, w_off, a_diag, a_off, u, p_vals, load_w,
                            k_next, tau)

    w = dense_from_tridiag(w_diag, w_off)
    a = dense_from_tridiag(a_diag, a_off)
    source = load_w * np.abs(u) ** (p_vals - 2.0) * u
    rhs = (w + a) @ u + tau * k_next * source
    expected = np.linalg.solve(w + (1.0 + tau) * a, rhs)
    np.testing.assert_allclose(out, expected, rtol=1e-10, atol=1e-13)


def test_imex_step_zero_profile_stays_zero(kernels):
    rng = np.random.default_rng(2)
    m = 16
    w_diag, w_off = random_spd_tridiag(rng, m)
    a_diag, a_off = random_spd_tridiag(rng, m)
    u = np.zeros(m)
    out = kernels.imex_step(w_diag, w_off, a_diag, a_off, u,
                            np.full(m, 2.1), np.ones(m), 1.0, 1e-2)
    # |0|^{p-2} * 0 must be treated as 0, not nan, even for p < 3
    np.testing.assert_array_equal(out, np.zeros(m))


def test_imex_step_shape_validation(kernels):
    m = 8
    ones, offs = np.ones(m), np.ones(m - 1)
    with pytest.raises(ValueError):
        kernels.imex_step(np.ones(m + 1), offs, ones, offs, ones,
                          np.full(m, 3.0), ones, 1.0, 1e-3)


@pytest.mark.skipif(
    "compiled" not in _backend.available_backends(),
    reason="compiled extension not built",
)
def test_backends_agree_bitwise_tolerance():
    compiled = _backend._BACKENDS["compiled"]
    rng = np.random.default_rng(3)
    m = 300
    w_diag, w_off = random_spd_tridiag(rng, m)
    a_diag, a_off = random_spd_tridiag(rng, m)
    u = rng.standard_normal(m) * 10.0
    p_vals = rng.uniform(2.1, 3.9, m)
    load_w = np.abs(rng.standard_normal(m)) + 0.1
    a = compiled.imex_step(w_diag, w_off, a_diag, a_off, u, p_vals, load_w,
                           2.0, 5e-4)
    b = _kernels_py.imex_step(w_diag, w_off, a_diag, a_off, u, p_vals, load_w,
                              2.0, 5e-4)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)


def test_backend_selector_roundtrip():
    original = _backend.backend_name()
    try:
        for name in _backend.available_backends():
            _backend.set_backend(name)
            assert _backend.backend_name() == name
        with pytest.raises(ValueError, match="unknown backend"):
            _backend.set_backend("fortran")
    finally:
        _backend.set_backend(original)


def test_backend_dispatch_uses_active_module():
    original = _backend.backend_name()
    try:
        _backend.set_backend("python")
        rhs = np.array([2.0, 4.0])
        out = _backend.thomas_solve(np.array([2.0, 2.0]), np.array([0.0]), rhs)
        np.testing.assert_allclose(out, [1.0, 2.0], rtol=1e-15)
    finally:
        _backend.set_backend(original)


def test_force_python_env_var():
    code = (
        "import blowlab._backend as b; "
        "print(b.backend_name())"
    )
    env = dict(os.environ, BLOWLAB_FORCE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    # the value "0" (and empty) must not force anything away from the default
    env = dict(os.environ, BLOWLAB_FORCE_PYTHON="0")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == _backend._initial_choice()

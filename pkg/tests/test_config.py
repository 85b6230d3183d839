"""Tests for configuration parsing, overrides, and experiment construction."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from blowlab.config import (
    ConfigError,
    ExperimentConfig,
    apply_override,
    build_experiment,
    load_config,
)

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

MINIMAL = """\
[domain]
dimension = 3

[mesh]
nodes = 64

[exponent]
model = constant
value = 3.0

[modulation]
model = constant
k0 = 1.0

[initial]
family = parabolic
amplitude = 30.0
"""

FULL = """\
[domain]
dimension = 4

[mesh]
nodes = 128
grading = 1.5

[exponent]
model = separable
a = 2.5
b = 0.2
c = 0.1

[modulation]
model = saturating
k0 = 1.0
k_inf = 2.0

[initial]
family = bump
amplitude = 5.0
width = 0.3

[solver]
tau0 = 2e-3
tau_min = 1e-10
t_end = 1.5
growth_cap = 1.4
blowup_factor = 1e6
step_growth = 1.1

[bounds]
t0 = 0.25
dictionary = default

[run]
seed = 7

[sweep]
parameter = initial.amplitude
values = 1.0, 2.0, 4.0
"""


def write_config(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_minimal_config_defaults(tmp_path):
    cfg = load_config(write_config(tmp_path, MINIMAL))
    assert cfg.dimension == 3
    assert cfg.nodes == 64
    assert cfg.grading == 2.0
    assert cfg.exponent_model == "constant"
    assert cfg.exponent_params == {"value": 3.0}
    assert cfg.modulation_model == "constant"
    assert cfg.modulation_params == {"k0": 1.0}
    assert cfg.initial_family == "parabolic"
    assert cfg.initial_params == {"amplitude": 30.0}
    assert cfg.solver.tau0 == 1e-3
    assert cfg.solver.tau_min == 1e-12
    assert cfg.solver.t_end == 5.0
    assert cfg.solver.growth_cap == 1.5
    assert cfg.solver.blowup_factor == 1e8
    assert cfg.solver.step_growth == 1.2
    assert cfg.t0 == 0.0
    assert cfg.seed == 0
    assert cfg.dictionary == "default"
    assert cfg.sweep is None


def test_full_config_round_trip(tmp_path):
    cfg = load_config(write_config(tmp_path, FULL))
    assert cfg.dimension == 4
    assert cfg.nodes == 128
    assert cfg.grading == 1.5
    assert cfg.exponent_model == "separable"
    assert cfg.exponent_params == {"a": 2.5, "b": 0.2, "c": 0.1}
    assert cfg.modulation_params == {"k0": 1.0, "k_inf": 2.0}
    assert cfg.initial_family == "bump"
    assert cfg.initial_params == {"amplitude": 5.0, "width": 0.3}
    assert cfg.solver.tau0 == 2e-3
    assert cfg.solver.t_end == 1.5
    assert cfg.t0 == 0.25
    assert cfg.seed == 7
    assert cfg.sweep is not None
    assert cfg.sweep.parameter == "initial.amplitude"
    assert cfg.sweep.values == (1.0, 2.0, 4.0)


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.ini")),
                         ids=lambda p: p.stem)
def test_shipped_configs_load_and_build(path):
    cfg = load_config(str(path))
    exp = build_experiment(cfg)
    assert exp.u0.shape == exp.problem.mesh.r.shape
    assert np.all(np.isfinite(exp.u0))


def test_missing_file_raises():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/exp.ini")


def test_malformed_file_raises(tmp_path):
    with pytest.raises(ConfigError, match="malformed"):
        load_config(write_config(tmp_path, "dimension = 3\n"))


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError, match=r"unknown section \[extras\]"):
        load_config(write_config(tmp_path, MINIMAL + "\n[extras]\nfoo = 1\n"))


def test_unknown_key_in_section_rejected(tmp_path):
    text = MINIMAL.replace("[mesh]\nnodes = 64",
                           "[mesh]\nnodes = 64\nspacing = 0.1")
    with pytest.raises(ConfigError, match="unknown keys.*spacing"):
        load_config(write_config(tmp_path, text))


@pytest.mark.parametrize("section", ["domain", "mesh", "exponent",
                                     "modulation", "initial"])
def test_missing_required_section_rejected(tmp_path, section):
    lines = MINIMAL.split("\n\n")
    text = "\n\n".join(part for part in lines
                       if not part.startswith(f"[{section}]"))
    with pytest.raises(ConfigError, match=f"missing required section .{section}."):
        load_config(write_config(tmp_path, text))


def test_unknown_exponent_model_rejected(tmp_path):
    text = MINIMAL.replace("model = constant\nvalue = 3.0",
                           "model = quadratic\nvalue = 3.0", 1)
    with pytest.raises(ConfigError, match="unknown exponent model 'quadratic'"):
        load_config(write_config(tmp_path, text))


def test_extra_model_key_rejected(tmp_path):
    text = MINIMAL.replace("model = constant\nvalue = 3.0",
                           "model = constant\nvalue = 3.0\na = 2.0", 1)
    with pytest.raises(ConfigError, match="unknown keys.*a"):
        load_config(write_config(tmp_path, text))


def test_missing_model_key_rejected(tmp_path):
    text = MINIMAL.replace("model = constant\nvalue = 3.0", "model = constant", 1)
    with pytest.raises(ConfigError, match="missing keys.*value"):
        load_config(write_config(tmp_path, text))


def test_non_numeric_value_rejected(tmp_path):
    text = MINIMAL.replace("amplitude = 30.0", "amplitude = big")
    with pytest.raises(ConfigError, match="must be a number"):
        load_config(write_config(tmp_path, text))


def test_invalid_solver_value_rejected(tmp_path):
    with pytest.raises(ConfigError, match=r"invalid \[solver\]"):
        load_config(write_config(tmp_path, MINIMAL + "\n[solver]\ntau0 = -1.0\n"))


def test_sweep_requires_values(tmp_path):
    text = MINIMAL + "\n[sweep]\nparameter = initial.amplitude\n"
    with pytest.raises(ConfigError, match="requires both"):
        load_config(write_config(tmp_path, text))


def test_sweep_rejects_empty_values(tmp_path):
    text = MINIMAL + "\n[sweep]\nparameter = initial.amplitude\nvalues = , ,\n"
    with pytest.raises(ConfigError, match="nonempty"):
        load_config(write_config(tmp_path, text))


def test_sweep_rejects_non_numeric_values(tmp_path):
    text = MINIMAL + "\n[sweep]\nparameter = initial.amplitude\nvalues = 1.0, two\n"
    with pytest.raises(ConfigError, match="must be numbers"):
        load_config(write_config(tmp_path, text))


def test_negative_seed_rejected(tmp_path):
    with pytest.raises(ConfigError, match="seed must be nonnegative"):
        load_config(write_config(tmp_path, MINIMAL + "\n[run]\nseed = -1\n"))


def test_unknown_dictionary_rejected(tmp_path):
    text = MINIMAL + "\n[bounds]\ndictionary = bespoke\n"
    with pytest.raises(ConfigError, match="unknown probe dictionary 'bespoke'"):
        load_config(write_config(tmp_path, text))


@pytest.fixture()
def base_cfg(tmp_path):
    return load_config(write_config(tmp_path, MINIMAL))


def test_override_initial_amplitude(base_cfg):
    out = apply_override(base_cfg, "initial.amplitude", 12.0)
    assert out.initial_params == {"amplitude": 12.0}
    assert base_cfg.initial_params == {"amplitude": 30.0}  # original untouched


def test_override_exponent_value(base_cfg):
    out = apply_override(base_cfg, "exponent.value", 2.5)
    assert out.exponent_params == {"value": 2.5}


def test_override_modulation_k0(base_cfg):
    out = apply_override(base_cfg, "modulation.k0", 3.0)
    assert out.modulation_params == {"k0": 3.0}


def test_override_mesh_and_domain(base_cfg):
    out = apply_override(base_cfg, "mesh.nodes", 128)
    assert out.nodes == 128
    out = apply_override(base_cfg, "mesh.grading", 1.0)
    assert out.grading == 1.0
    out = apply_override(base_cfg, "domain.dimension", 4)
    assert out.dimension == 4


def test_override_solver_key(base_cfg):
    out = apply_override(base_cfg, "solver.t_end", 0.5)
    assert out.solver.t_end == 0.5
    assert out.solver.tau0 == base_cfg.solver.tau0


def test_override_bounds_t0(base_cfg):
    out = apply_override(base_cfg, "bounds.t0", 0.1)
    assert out.t0 == 0.1


def test_override_bounds_dictionary(base_cfg):
    out = apply_override(base_cfg, "bounds.dictionary", "default")
    assert out.dictionary == "default"
    with pytest.raises(ConfigError, match="unknown probe dictionary"):
        apply_override(base_cfg, "bounds.dictionary", "bespoke")


def test_override_rejects_bad_paths(base_cfg):
    with pytest.raises(ConfigError, match="section.key"):
        apply_override(base_cfg, "amplitude", 1.0)
    with pytest.raises(ConfigError, match="unknown sweep section"):
        apply_override(base_cfg, "lattice.nodes", 1.0)
    with pytest.raises(ConfigError, match="unknown solver parameter"):
        apply_override(base_cfg, "solver.dt", 1.0)
    with pytest.raises(ConfigError, match="unknown mesh parameter"):
        apply_override(base_cfg, "mesh.cells", 1.0)
    with pytest.raises(ConfigError, match="unknown bounds parameter"):
        apply_override(base_cfg, "bounds.horizon", 1.0)


def test_override_rejects_key_not_in_family(base_cfg):
    # width belongs to the bump family, not the parabolic one
    with pytest.raises(ConfigError, match="not accepted by 'parabolic'"):
        apply_override(base_cfg, "initial.width", 0.5)


def test_override_invalid_solver_value(base_cfg):
    with pytest.raises(ConfigError, match="tau0"):
        apply_override(base_cfg, "solver.tau0", -1.0)


def test_build_experiment_from_minimal(base_cfg):
    exp = build_experiment(base_cfg)
    assert exp.problem.mesh.r.size == 64
    assert exp.problem.mesh.n == 3
    # parabolic family evaluates to amplitude * (1 - r^2) at the nodes
    expected = 30.0 * (1.0 - exp.problem.mesh.r**2)
    np.testing.assert_allclose(exp.u0, expected, rtol=0, atol=1e-14)


def test_build_experiment_wraps_model_errors(base_cfg):
    import dataclasses

    bad = dataclasses.replace(base_cfg, dimension=2)
    with pytest.raises(ConfigError):
        build_experiment(bad)
    bad = dataclasses.replace(base_cfg, nodes=4)
    with pytest.raises(ConfigError):
        build_experiment(bad)


def test_config_error_is_value_error():
    assert issubclass(ConfigError, ValueError)

"""Experiment configuration: INI parsing, validation, and assembly.

A configuration file is flat INI text with named sections; every physical
input is dimensionless.  All randomness used downstream (constant estimation
trials) draws from the seed configured here, so identical files reproduce
identical outputs bit for bit.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass

import numpy as np

from .functionals import Problem
from .mesh import build_mesh
from .models import InitialDatum, make_exponent, make_initial, make_modulation
from .solver import SolverConfig


class ConfigError(ValueError):
    """A configuration file could not be parsed or fails validation."""


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter family of experiments: parameter path and its values."""

    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully parsed experiment definition."""

    dimension: int
    nodes: int
    grading: float
    exponent_model: str
    exponent_params: dict
    modulation_model: str
    modulation_params: dict
    initial_family: str
    initial_params: dict
    solver: SolverConfig
    t0: float
    seed: int
    dictionary: str = "default"
    sweep: SweepSpec | None = None


# allowed keys per model: (required, optional)
_EXPONENT_KEYS = {
    "constant": ({"value"}, set()),
    "separable": ({"a"}, {"b", "c"}),
}
_MODULATION_KEYS = {
    "constant": ({"k0"}, set()),
    "saturating": ({"k0", "k_inf"}, set()),
}
_INITIAL_KEYS = {
    "parabolic": ({"amplitude"}, set()),
    "bump": ({"amplitude"}, {"width"}),
    "linear": ({"amplitude"}, set()),
}
_SOLVER_KEYS = {"tau0", "tau_min", "t_end", "growth_cap", "blowup_factor",
                "step_growth"}
_SECTION_KEYS = {
    "domain": {"dimension"},
    "mesh": {"nodes", "grading"},
    "solver": _SOLVER_KEYS,
    "bounds": {"t0", "dictionary"},
    "run": {"seed"},
    "sweep": {"parameter", "values"},
}
_REQUIRED_SECTIONS = ("domain", "mesh", "exponent", "modulation", "initial")
# ids of shipped probe dictionaries for the bound-constant search
_DICTIONARY_IDS = {"default"}


def _get_float(parser: configparser.ConfigParser, section: str, key: str,
               fallback: float | None = None) -> float:
    raw = parser.get(section, key, fallback=None)
    if raw is None:
        if fallback is None:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
        return float(fallback)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(
            f"key {key!r} in section [{section}] must be a number (got {raw!r})"
        ) from exc


def _get_int(parser: configparser.ConfigParser, section: str, key: str,
             fallback: int | None = None) -> int:
    raw = parser.get(section, key, fallback=None)
    if raw is None:
        if fallback is None:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
        return int(fallback)
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(
            f"key {key!r} in section [{section}] must be an integer (got {raw!r})"
        ) from exc


def _model_params(parser: configparser.ConfigParser, section: str,
                  selector: str, table: dict) -> tuple[str, dict]:
    if not parser.has_section(section):
        raise ConfigError(f"missing required section [{section}]")
    name = parser.get(section, selector, fallback=None)
    if name is None:
        raise ConfigError(f"missing required key {selector!r} in section [{section}]")
    if name not in table:
        raise ConfigError(
            f"unknown {section} {selector} {name!r} (known: {', '.join(sorted(table))})"
        )
    required, optional = table[name]
    present = {k for k in parser.options(section) if k != selector}
    unknown = present - required - optional
    if unknown:
        raise ConfigError(
            f"unknown keys in section [{section}] for {selector}={name}: "
            f"{', '.join(sorted(unknown))}"
        )
    missing = required - present
    if missing:
        raise ConfigError(
            f"missing keys in section [{section}] for {selector}={name}: "
            f"{', '.join(sorted(missing))}"
        )
    params = {k: _get_float(parser, section, k) for k in sorted(present)}
    return name, params


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate an experiment configuration file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc

    known = set(_SECTION_KEYS) | {"exponent", "modulation", "initial"}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]")
        if section in _SECTION_KEYS:
            unknown = set(parser.options(section)) - _SECTION_KEYS[section]
            if unknown:
                raise ConfigError(
                    f"unknown keys in section [{section}]: {', '.join(sorted(unknown))}"
                )
    for section in _REQUIRED_SECTIONS:
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}]")

    exponent_model, exponent_params = _model_params(
        parser, "exponent", "model", _EXPONENT_KEYS)
    modulation_model, modulation_params = _model_params(
        parser, "modulation", "model", _MODULATION_KEYS)
    initial_family, initial_params = _model_params(
        parser, "initial", "family", _INITIAL_KEYS)

    try:
        solver = SolverConfig(
            tau0=_get_float(parser, "solver", "tau0", 1e-3),
            tau_min=_get_float(parser, "solver", "tau_min", 1e-12),
            t_end=_get_float(parser, "solver", "t_end", 5.0),
            growth_cap=_get_float(parser, "solver", "growth_cap", 1.5),
            blowup_factor=_get_float(parser, "solver", "blowup_factor", 1e8),
            step_growth=_get_float(parser, "solver", "step_growth", 1.2),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [solver] section: {exc}") from exc

    sweep = None
    if parser.has_section("sweep"):
        parameter = parser.get("sweep", "parameter", fallback=None)
        raw_values = parser.get("sweep", "values", fallback=None)
        if parameter is None or raw_values is None:
            raise ConfigError("section [sweep] requires both 'parameter' and 'values'")
        items = [v.strip() for v in raw_values.split(",") if v.strip()]
        if not items:
            raise ConfigError("sweep values must be a nonempty comma-separated list")
        try:
            values = tuple(float(v) for v in items)
        except ValueError as exc:
            raise ConfigError(f"sweep values must be numbers (got {raw_values!r})") from exc
        sweep = SweepSpec(parameter=parameter, values=values)

    seed = _get_int(parser, "run", "seed", 0)
    if seed < 0:
        raise ConfigError(f"seed must be nonnegative (got {seed})")

    dictionary = parser.get("bounds", "dictionary", fallback="default").strip()
    if dictionary not in _DICTIONARY_IDS:
        raise ConfigError(
            f"unknown probe dictionary {dictionary!r} "
            f"(available: {', '.join(sorted(_DICTIONARY_IDS))})"
        )

    return ExperimentConfig(
        dimension=_get_int(parser, "domain", "dimension"),
        nodes=_get_int(parser, "mesh", "nodes"),
        grading=_get_float(parser, "mesh", "grading", 2.0),
        exponent_model=exponent_model,
        exponent_params=exponent_params,
        modulation_model=modulation_model,
        modulation_params=modulation_params,
        initial_family=initial_family,
        initial_params=initial_params,
        solver=solver,
        t0=_get_float(parser, "bounds", "t0", 0.0),
        seed=seed,
        dictionary=dictionary,
        sweep=sweep,
    )


@dataclass(frozen=True)
class Experiment:
    """Realized experiment: problem data plus the initial nodal state."""

    problem: Problem
    initial: InitialDatum
    u0: np.ndarray


def build_experiment(cfg: ExperimentConfig) -> Experiment:
    """Instantiate mesh, models, and the initial state from a configuration."""
    try:
        mesh = build_mesh(cfg.dimension, cfg.nodes, cfg.grading)
        exponent = make_exponent(cfg.exponent_model, cfg.exponent_params)
        modulation = make_modulation(cfg.modulation_model, cfg.modulation_params)
        initial = make_initial(cfg.initial_family, cfg.initial_params)
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    problem = Problem(mesh=mesh, exponent=exponent, modulation=modulation)
    u0 = np.asarray(initial.values(mesh.r), dtype=float)
    return Experiment(problem=problem, initial=initial, u0=u0)


def _override_params(cfg: ExperimentConfig, field_name: str, table: dict,
                     selector_value: str, key: str, value: float) -> ExperimentConfig:
    required, optional = table[selector_value]
    if key not in required | optional:
        raise ConfigError(
            f"parameter {key!r} is not accepted by {selector_value!r} "
            f"(allowed: {', '.join(sorted(required | optional))})"
        )
    params = dict(getattr(cfg, field_name))
    params[key] = float(value)
    return dataclasses.replace(cfg, **{field_name: params})


def apply_override(cfg: ExperimentConfig, parameter: str,
                   value: float) -> ExperimentConfig:
    """Return a copy of ``cfg`` with one dotted parameter replaced.

    Supported paths: initial.<key>, exponent.<key>, modulation.<key>,
    mesh.nodes, mesh.grading, domain.dimension, solver.<key>, bounds.t0,
    bounds.dictionary.
    """
    section, sep, key = parameter.partition(".")
    if not sep or not key:
        raise ConfigError(
            f"sweep parameter must look like 'section.key' (got {parameter!r})"
        )
    if section == "initial":
        return _override_params(cfg, "initial_params", _INITIAL_KEYS,
                                cfg.initial_family, key, value)
    if section == "exponent":
        return _override_params(cfg, "exponent_params", _EXPONENT_KEYS,
                                cfg.exponent_model, key, value)
    if section == "modulation":
        return _override_params(cfg, "modulation_params", _MODULATION_KEYS,
                                cfg.modulation_model, key, value)
    if section == "mesh":
        if key == "nodes":
            return dataclasses.replace(cfg, nodes=int(value))
        if key == "grading":
            return dataclasses.replace(cfg, grading=float(value))
        raise ConfigError(f"unknown mesh parameter {key!r}")
    if section == "domain":
        if key == "dimension":
            return dataclasses.replace(cfg, dimension=int(value))
        raise ConfigError(f"unknown domain parameter {key!r}")
    if section == "solver":
        if key not in _SOLVER_KEYS:
            raise ConfigError(f"unknown solver parameter {key!r}")
        try:
            solver = dataclasses.replace(cfg.solver, **{key: float(value)})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return dataclasses.replace(cfg, solver=solver)
    if section == "bounds":
        if key == "t0":
            return dataclasses.replace(cfg, t0=float(value))
        if key == "dictionary":
            if value not in _DICTIONARY_IDS:
                raise ConfigError(
                    f"unknown probe dictionary {value!r} "
                    f"(available: {', '.join(sorted(_DICTIONARY_IDS))})"
                )
            return dataclasses.replace(cfg, dictionary=value)
        raise ConfigError(f"unknown bounds parameter {key!r}")
    raise ConfigError(f"unknown sweep section {section!r}")

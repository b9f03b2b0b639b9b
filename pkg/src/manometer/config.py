"""Run configuration: JSON file, schema validation, flag overrides."""
from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .basis_ops import TruncatedBasis
from .params import DEFAULT_MAX_EPS, SystemParams, to_natural_units

OUTPUT_ENV = "MANOMETER_OUTPUT"

DEFAULTS = {
    "units": "natural",
    "system": {"lam": 1e-3, "beta": 1e-3, "box_length": 1.0, "wall_mass": 1.0, "hbar": 1.0},
    "truncation": {"n_gas": 40, "n_wall": 8},
    "mode": "leading",
    "j_g": 1,
    "max_eps": DEFAULT_MAX_EPS,
    "spectrum": {"gas_levels": 3, "wall_levels": 3},
    "thermal": {"temperatures": [0.0] + [2.5 * i for i in range(1, 20)]},
    "sweep": {"eps_grid": [10**-1.5, 1e-2, 10**-2.5], "beta_over_lambda": 1.0},
    "format": "json",
    "output": None,
}


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("manometer").joinpath("config.schema.json").read_text()
    return json.loads(text)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def validate(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        path = [str(x) for x in e.path]
        if e.validator == "additionalProperties":
            extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
            path.append(extra[0])
            raise ConfigError(f"config key {'.'.join(path)}: unknown key")
        where = ".".join(path) or "<root>"
        raise ConfigError(f"config key {where}: {e.message}")


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    basis: TruncatedBasis
    mode: str
    j_g: int
    j3d: tuple[int, int, int] | None
    max_eps: float
    gas_levels: int
    wall_levels: int
    temperatures: tuple[float, ...]
    eps_grid: tuple[float, ...]
    beta_over_lambda: float
    format: str
    output: str | None
    raw: dict


def _system_params(units: str, system: dict) -> SystemParams:
    s = dict(system)
    dims = tuple(s.pop("dims")) if "dims" in s else None
    if dims is not None:
        s["box_length"] = dims[0]
    has_expansion = "lam" in s or "beta" in s
    has_physical = "gas_mass" in s or "spring_constant" in s
    if has_expansion and has_physical:
        raise ConfigError("config key system: give either lam/beta or gas_mass/spring_constant, not both")
    if has_expansion:
        if units == "si":
            raise ConfigError("config key system: lam/beta instantiation is natural-units only")
        missing = [k for k in ("lam", "beta") if k not in s]
        if missing:
            raise ConfigError(f"config key system.{missing[0]}: required with lam/beta instantiation")
        return SystemParams.from_expansion(
            s["lam"], s["beta"], s.get("box_length", 1.0), s.get("wall_mass", 1.0), s.get("hbar", 1.0), dims
        )
    for k in ("gas_mass", "wall_mass", "box_length", "spring_constant"):
        if k not in s:
            raise ConfigError(f"config key system.{k}: required for a physical instantiation")
    if units == "si":
        p, _ = to_natural_units(s["gas_mass"], s["wall_mass"], s["box_length"], s["spring_constant"], dims)
        return p
    return SystemParams(
        s["gas_mass"], s["wall_mass"], s["box_length"], s["spring_constant"], s.get("hbar", 1.0), dims
    )


def build_config(file_data: dict | None = None, overrides: dict | None = None) -> RunConfig:
    file_data = file_data or {}
    overrides = overrides or {}
    validate(file_data)
    validate(overrides)
    merged = _merge(DEFAULTS, {k: v for k, v in file_data.items() if k != "system"})
    # a user-supplied system block replaces the default instantiation wholesale
    system = copy.deepcopy(file_data.get("system", DEFAULTS["system"]))
    osys = overrides.get("system", {})
    if {"lam", "beta"} & osys.keys():
        system.pop("gas_mass", None)
        system.pop("spring_constant", None)
    if {"gas_mass", "spring_constant"} & osys.keys():
        system.pop("lam", None)
        system.pop("beta", None)
    system.update(osys)
    merged = _merge(merged, {k: v for k, v in overrides.items() if k != "system"})
    merged["system"] = system
    validate(merged)
    try:
        params = _system_params(merged["units"], merged["system"])
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config key system: {exc}") from exc
    tr = merged["truncation"]
    output = merged["output"] if merged["output"] is not None else os.environ.get(OUTPUT_ENV)
    return RunConfig(
        params=params,
        basis=TruncatedBasis(tr["n_gas"], tr["n_wall"]),
        mode=merged["mode"],
        j_g=merged["j_g"],
        j3d=tuple(merged["j3d"]) if "j3d" in merged else None,
        max_eps=merged["max_eps"],
        gas_levels=merged["spectrum"]["gas_levels"],
        wall_levels=merged["spectrum"]["wall_levels"],
        temperatures=tuple(merged["thermal"]["temperatures"]),
        eps_grid=tuple(merged["sweep"]["eps_grid"]),
        beta_over_lambda=merged["sweep"]["beta_over_lambda"],
        format=merged["format"],
        output=output,
        raw=merged,
    )


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
    return build_config(data, overrides)

"""Strict JSON run configuration: schema validation, defaults, overrides.

Unknown keys are rejected everywhere so a typo cannot silently change the
physics.  Validation errors carry the dotted path of the offending field.
"""

from __future__ import annotations

import json
import math
import os
from pathlib import Path

from .ensemble import EnsembleSpec, ModelSpec, SweepSpec
from .lattice import GOLDEN_MEAN, PotentialSpec
from .monitor import PROTOCOLS, MonitorConfig


class ConfigError(ValueError):
    """Configuration failed schema validation; message names the field."""


_POTENTIAL_STRENGTH_KEY = {"stark": "delta", "quasiperiodic": "v", "anderson": "w"}


def _require_keys(section: dict, allowed: set[str], path: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _get_number(section: dict, key: str, path: str, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"{path}.{key}: required")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}.{key}: must be finite, got {value!r}")
    return value


def _get_int(section: dict, key: str, path: str, default=None, required=False):
    value = _get_number(section, key, path, default=default, required=required)
    if value is None:
        return None
    if isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return int(value)


def _get_bool(section: dict, key: str, path: str, default=None):
    if key not in section:
        return default
    value = section[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a boolean, got {value!r}")
    return value


def _parse_potential(section: dict, path: str) -> PotentialSpec:
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = section.get("type", "none")
    if kind not in ("none", "stark", "quasiperiodic", "anderson"):
        raise ConfigError(f"{path}.type: unknown potential type {kind!r}")
    allowed = {"type"}
    if kind == "stark":
        allowed |= {"delta"}
    elif kind == "quasiperiodic":
        allowed |= {"v", "beta", "theta"}
    elif kind == "anderson":
        allowed |= {"w"}
    _require_keys(section, allowed, path)
    try:
        if kind == "none":
            return PotentialSpec.none()
        if kind == "stark":
            return PotentialSpec.stark(_get_number(section, "delta", path, required=True))
        if kind == "quasiperiodic":
            return PotentialSpec.quasiperiodic(
                _get_number(section, "v", path, required=True),
                beta=_get_number(section, "beta", path, default=GOLDEN_MEAN),
                theta=_get_number(section, "theta", path, default=0.0),
            )
        return PotentialSpec.anderson(_get_number(section, "w", path, required=True))
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from err


def parse_config(cfg: dict) -> dict:
    """Validate a loaded JSON document; returns parsed spec components in a dict
    with keys ensemble_spec, workers, output_dir, sweep (SweepSpec or None)."""
    if not isinstance(cfg, dict):
        raise ConfigError("top level: expected a JSON object")
    _require_keys(cfg, {"model", "monitor", "ensemble", "observables", "output", "sweep"}, "top level")

    model_cfg = cfg.get("model")
    if not isinstance(model_cfg, dict):
        raise ConfigError("model: required object")
    _require_keys(model_cfg, {"L", "J", "potential"}, "model")
    L = _get_int(model_cfg, "L", "model", required=True)
    if L is None or L < 2 or L % 2 != 0:
        raise ConfigError(f"model.L: must be an even integer >= 2, got {L}")
    J = _get_number(model_cfg, "J", "model", default=1.0)
    potential = _parse_potential(model_cfg.get("potential", {"type": "none"}), "model.potential")
    try:
        model = ModelSpec(L=L, J=J, potential=potential)
    except ValueError as err:
        raise ConfigError(f"model: {err}") from err

    mon_cfg = cfg.get("monitor", {})
    if not isinstance(mon_cfg, dict):
        raise ConfigError("monitor: expected an object")
    _require_keys(
        mon_cfg,
        {"gamma", "dt", "t_max", "protocol", "obs_interval", "steady_window_fraction"},
        "monitor",
    )
    protocol = mon_cfg.get("protocol", "born_projective")
    if protocol not in PROTOCOLS:
        raise ConfigError(f"monitor.protocol: unknown protocol {protocol!r}, expected one of {PROTOCOLS}")
    try:
        monitor = MonitorConfig(
            gamma=_get_number(mon_cfg, "gamma", "monitor", required=True),
            dt=_get_number(mon_cfg, "dt", "monitor", default=0.05),
            t_max=_get_number(mon_cfg, "t_max", "monitor", default=None),
            protocol=protocol,
            obs_interval=_get_number(mon_cfg, "obs_interval", "monitor", default=1.0),
            steady_window_fraction=_get_number(
                mon_cfg, "steady_window_fraction", "monitor", default=0.25
            ),
        )
    except ValueError as err:
        raise ConfigError(f"monitor: {err}") from err

    ens_cfg = cfg.get("ensemble", {})
    if not isinstance(ens_cfg, dict):
        raise ConfigError("ensemble: expected an object")
    _require_keys(ens_cfg, {"n_traj", "master_seed", "realization_policy", "workers"}, "ensemble")
    policy = ens_cfg.get("realization_policy", "per_trajectory")
    workers = _get_int(ens_cfg, "workers", "ensemble", default=os.cpu_count() or 1)
    if workers < 1:
        raise ConfigError(f"ensemble.workers: must be >= 1, got {workers}")

    obs_cfg = cfg.get("observables", {})
    if not isinstance(obs_cfg, dict):
        raise ConfigError("observables: expected an object")
    _require_keys(obs_cfg, {"profile", "mutual_info", "correlations"}, "observables")
    profile = _get_bool(obs_cfg, "profile", "observables", default=True)
    mutual_info = _get_bool(obs_cfg, "mutual_info", "observables", default=None)
    correlations = _get_bool(obs_cfg, "correlations", "observables", default=True)

    try:
        spec = EnsembleSpec(
            model=model,
            monitor=monitor,
            n_traj=_get_int(ens_cfg, "n_traj", "ensemble", default=200),
            master_seed=_get_int(ens_cfg, "master_seed", "ensemble", default=0),
            realization_policy=policy,
            mutual_info=mutual_info,
            correlations=correlations,
        )
    except ValueError as err:
        raise ConfigError(f"ensemble: {err}") from err

    out_cfg = cfg.get("output", {})
    if not isinstance(out_cfg, dict):
        raise ConfigError("output: expected an object")
    _require_keys(out_cfg, {"dir"}, "output")
    output_dir = out_cfg.get("dir", "out")
    if not isinstance(output_dir, str):
        raise ConfigError(f"output.dir: expected a string, got {output_dir!r}")

    sweep = None
    if "sweep" in cfg:
        sweep_cfg = cfg["sweep"]
        if not isinstance(sweep_cfg, dict):
            raise ConfigError("sweep: expected an object")
        _require_keys(sweep_cfg, {"gammas", "potential_params", "sizes"}, "sweep")
        axes = {}
        for key, caster in (("gammas", float), ("potential_params", float), ("sizes", int)):
            values = sweep_cfg.get(key)
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep.{key}: required non-empty list")
            try:
                axes[key] = tuple(caster(v) for v in values)
            except (TypeError, ValueError) as err:
                raise ConfigError(f"sweep.{key}: {err}") from err
        try:
            sweep = SweepSpec(
                gammas=axes["gammas"],
                potential_params=axes["potential_params"],
                sizes=axes["sizes"],
                base=spec,
                output_dir=Path(output_dir),
            )
        except ValueError as err:
            raise ConfigError(f"sweep: {err}") from err

    return {
        "ensemble_spec": spec,
        "workers": workers,
        "output_dir": Path(output_dir),
        "profile": profile,
        "sweep": sweep,
    }


def load_config(path: str | Path) -> dict:
    """Read a JSON config file; raises ConfigError on parse or schema failure."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    try:
        return json.loads(raw)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path} is not valid JSON: {err}") from err


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    """Apply ``section.key=value`` overrides (values parsed as JSON literals,
    falling back to bare strings)."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        dotted, raw_value = item.split("=", 1)
        keys = dotted.split(".")
        if not all(keys):
            raise ConfigError(f"override path {dotted!r} is malformed")
        try:
            value = json.loads(raw_value)
        except json.JSONDecodeError:
            value = raw_value
        node = cfg
        for key in keys[:-1]:
            node = node.setdefault(key, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {dotted!r} descends into a non-object")
        node[keys[-1]] = value
    return cfg

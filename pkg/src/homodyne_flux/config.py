"""Sweep configuration files.

A config is a JSON object with optional sections ``homodyne``, ``spdm``,
``scheme``, ``paths`` and ``sweep``::

    {
      "homodyne": {"eta_det": 0.9, "dark_variance": 0.1},
      "spdm": {"dark_rate": 3e4},
      "paths": {"homodyne": [["coupler", 0.5]], "spdm": [["coupler", 0.5]]},
      "sweep": {"flux_min": 1e2, "flux_max": 1e9, "n_points": 29, "repetitions": 1}
    }

``sweep.flux_points`` may list the points explicitly instead.
"""
from __future__ import annotations

import dataclasses
import json

import numpy as np

from .estimation import OpticalPath
from .harness import SweepSpec
from .homodyne_sim import HomodyneConfig
from .sideband_scheme import SchemeConfig
from .spdm_sim import SpdmConfig

SECTIONS = {"homodyne": HomodyneConfig, "spdm": SpdmConfig, "scheme": SchemeConfig}
SWEEP_KEYS = {"flux_points", "flux_min", "flux_max", "n_points", "repetitions"}


class ConfigError(ValueError):
    pass


def _build(cls, values, section):
    names = {f.name for f in dataclasses.fields(cls)} - {"seed"}
    unknown = set(values) - names
    if unknown:
        raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
    return cls(**values)


def apply_override(cfg: dict, assignment: str) -> dict:
    """Apply ``section.key=value``; ``value`` is parsed as JSON, falling back to a string."""
    if "=" not in assignment or "." not in assignment.split("=", 1)[0]:
        raise ConfigError(f"override must look like section.key=value, got {assignment!r}")
    dotted, raw = assignment.split("=", 1)
    section, key = dotted.split(".", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    cfg.setdefault(section, {})[key] = value
    return cfg


def spec_from_config(cfg: dict, seed: int) -> SweepSpec:
    unknown = set(cfg) - set(SECTIONS) - {"paths", "sweep"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    try:
        parts = {name: _build(cls, cfg.get(name, {}), name) for name, cls in SECTIONS.items()}
        paths = cfg.get("paths", {})
        if set(paths) - {"homodyne", "spdm"}:
            raise ConfigError(f"unknown paths: {sorted(set(paths) - {'homodyne', 'spdm'})}")
        for name in ("homodyne", "spdm"):
            if name in paths:
                parts[f"{name}_path"] = OpticalPath.from_pairs(paths[name])
        sweep = dict(cfg.get("sweep", {}))
        if set(sweep) - SWEEP_KEYS:
            raise ConfigError(f"unknown keys in [sweep]: {sorted(set(sweep) - SWEEP_KEYS)}")
        if "flux_points" in sweep:
            parts["flux_points"] = tuple(sweep["flux_points"])
        elif {"flux_min", "flux_max", "n_points"} & set(sweep):
            lo, hi = float(sweep.get("flux_min", 1e2)), float(sweep.get("flux_max", 1e9))
            if not 0 < lo <= hi:
                raise ConfigError("need 0 < flux_min <= flux_max")
            n = int(sweep.get("n_points", 29))
            parts["flux_points"] = tuple(float(x) for x in np.logspace(np.log10(lo), np.log10(hi), n))
        if "repetitions" in sweep:
            parts["repetitions"] = int(sweep["repetitions"])
        return SweepSpec(seed=seed, **parts)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data

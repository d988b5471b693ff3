"""INI scenario files: one section per concern, units spelled out in key names.

Unknown sections or keys are rejected. ``to_ini`` writes every field, so an
echoed file reproduces the run exactly.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import fields, replace

from . import harness, swarm
from .errors import ConfigError

# section -> key -> (ScenarioConfig field or "hp.<field>", type)
SCHEMA = {
    "run": {
        "sampler": ("sampler", str),
        "duration_s": ("duration", float),
        "swarm_seed": ("swarm_seed", int),
    },
    "scene": {
        "seed": ("scene_seed", int),
        "preset": ("preset", str),
        "density_per_ha": ("density", float),
        "discs_per_tree": ("discs_per_tree", int),
        "bounds_m": ("bounds", "floats4"),
    },
    "target": {
        "x_m": ("target_x", float),
        "y_m": ("target_y", float),
        "heading_rad": ("target_heading", float),
        "present": ("target_present", bool),
        "motion": ("motion", str),
        "speed_mps": ("target_speed", float),
    },
    "imaging": {
        "cell_m": ("cell", float),
        "fov_deg": ("fov_deg", float),
        "px": ("px", int),
        "quantile": ("quantile", float),
        "tau": ("tau", int),
    },
    "swarm": {
        "n": ("hp.n", int),
        "c1_m": ("hp.c1", float),
        "c2_m": ("hp.c2", float),
        "c3_m": ("hp.c3", float),
        "c4_m": ("hp.c4", float),
        "c5": ("hp.c5", float),
        "s_m": ("hp.s", float),
        "T_cells": ("hp.T", float),
        "T_pct": ("T_pct", float),
        "speed_mps": ("hp.speed", float),
        "h_l_m": ("hp.h_l", float),
        "dh_m": ("hp.dh", float),
        "min_baseline_m": ("hp.min_baseline", float),
        "start_offset_m": ("start_offset", float),
        "sd_deg": ("sd_deg", float),
    },
    "blind": {
        "altitude_m": ("blind_altitude", float),
        "seq_extent_m": ("seq_extent", "floats2"),
        "seq_step_m": ("seq_step", "floats2"),
        "par_cameras": ("par_cameras", int),
        "par_spacing_m": ("par_spacing", float),
        "par_step_m": ("par_step", float),
        "par_length_m": ("par_length", float),
    },
    "classic": {
        "inertia": ("classic_inertia", float),
    },
}


def _parse(value, kind, where):
    try:
        if kind is bool:
            v = value.strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if kind in ("floats2", "floats4"):
            parts = [float(p) for p in value.replace(",", " ").split()]
            if len(parts) != int(kind[-1]):
                raise ValueError(value)
            return tuple(parts)
        if kind is str:
            return value.strip()
        if value.strip().lower() in ("none", ""):
            return None
        return kind(value)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {value!r}") from exc


def parse_ini(text):
    """ScenarioConfig from INI text; errors name the offending key."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    top, hp = {}, {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, value in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            name, kind = SCHEMA[section][key]
            v = _parse(value, kind, f"{section}.{key}")
            if v is None:
                continue
            if name.startswith("hp."):
                hp[name[3:]] = v
            else:
                top[name] = v
    n = hp.get("n", 10)
    base = dict(harness.SIZE_PRESETS.get(n, {"n": n}))
    base.update(hp)
    base["fov_deg"] = top.get("fov_deg", 50.0)
    try:
        params = swarm.Hyperparams(**base)
        params.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"swarm: {exc}") from exc
    cfg = harness.ScenarioConfig(**top, hp=params)
    if cfg.T_pct is None and math.isinf(params.T):
        default = harness.THRESHOLDS_PCT.get((cfg.preset, n))
        if default is not None:
            cfg = replace(cfg, T_pct=default)
    return cfg


def load(path):
    with open(path) as f:
        return parse_ini(f.read())


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return " ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    return str(v)


def to_ini(cfg):
    """Full INI text for a ScenarioConfig."""
    lines = []
    for section, keys in SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (name, _) in keys.items():
            v = getattr(cfg.hp, name[3:]) if name.startswith("hp.") else getattr(cfg, name)
            lines.append(f"{key} = {_fmt(v)}")
        lines.append("")
    return "\n".join(lines)


def _check_schema_covers_config():
    names = {n for keys in SCHEMA.values() for n, _ in keys.values()}
    missing = [f.name for f in fields(harness.ScenarioConfig)
               if f.name != "hp" and f.name not in names]
    missing += [f"hp.{f.name}" for f in fields(swarm.Hyperparams)
                if f"hp.{f.name}" not in names and f.name != "fov_deg"]
    return missing

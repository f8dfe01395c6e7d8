"""Scenario files: JSON in, ``Scenario`` out.

Example::

    {"plant": "example_liu2009", "w": [9, 1], "b": -1, "sigma": 0.2617993878,
     "v0": [1, 0], "m": [24, 50, 35, 10], "Theta": 10,
     "controller": "A", "alpha": 1.0, "omega": 200.0, "k": 2.0,
     "rho": {"arg": "e", "coeffs": [1, 0, 1]}, "T": 240.0, "steps_per_period": 64}

Missing keys fall back to the benchmark defaults below.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .closed_loop import Scenario, StateLayout
from .control import ControllerVariant, DitherConfig, Rho
from .errors import ConfigError, EscRegError
from .internal_model import (GeneratorSpec, build_internal_model, saturation_radius,
                             with_sat_radius)
from .oracle import SteadyState, example_steady_input, steady_state_for
from .plant import Exosystem, example_plant

SIGMA = math.pi / 12
ETA0 = (0.1589, 0.0622, 0.1057, 0.0331)

DEFAULTS = {
    "plant": "example_liu2009",
    "w": [9.0, 1.0],
    "b": -1.0,
    "sigma": SIGMA,
    "v0": [1.0, 0.0],
    "m": [24.0, 50.0, 35.0, 10.0],
    "Theta": 10.0,
    "controller": "A",
    "alpha": 1.0,
    "omega": 200.0,
    "k": 2.0,
    "rho": {"arg": "e", "coeffs": [1.0, 0.0, 1.0]},
    "periods": 10,
    "sat_safety": 1.5,
    "initial": {"z": [0.0, 0.0], "y": 0.0, "eta": list(ETA0), "pi": 0.0, "vartheta": [0.0] * 4},
}


def load_config(path) -> dict:
    try:
        with open(Path(path)) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must hold a JSON object")
    return raw


def merged(config: dict | None = None, **overrides) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))
    for src in (config or {}, overrides):
        for key, val in src.items():
            if key == "initial" and isinstance(val, dict):
                cfg["initial"].update(val)
            else:
                cfg[key] = val
    return cfg


def build_scenario(config: dict | None = None, **overrides) -> Scenario:
    """Assemble the benchmark scenario; raises ConfigError on invalid input."""
    c = merged(config, **overrides)
    if c["plant"] != "example_liu2009":
        raise ConfigError(f"unknown plant {c['plant']!r}; only 'example_liu2009' is built in")
    try:
        sigma = float(c["sigma"])
        if sigma <= 0:
            raise ConfigError("sigma must be positive")
        b = float(c["b"])
        if b == 0:
            raise ConfigError("b must be nonzero")
        plant = example_plant(c["w"], b)
        exo = Exosystem.rotation(sigma, c["v0"])
        rho_cfg = c["rho"]
        if isinstance(rho_cfg, dict):
            rho = Rho(tuple(float(x) for x in rho_cfg["coeffs"]), rho_cfg.get("arg", "e"))
        else:
            rho = Rho(tuple(float(x) for x in rho_cfg))
        dcfg = DitherConfig(float(c["alpha"]), float(c["omega"]), float(c["k"]), rho)
        variant = ControllerVariant.parse(c["controller"])
        m = np.asarray(c["m"], dtype=float)
        gen = _generator(c, m.size)
        model = build_internal_model(gen, m, float(c["Theta"]))
        if "sat_radius" in c:
            sat = float(c["sat_radius"])
        elif not np.any(exo.v):
            # zero exosystem: the steady state is the origin
            sat = saturation_radius(np.zeros((1, model.n)), model.varrho, float(c["sat_safety"]))
        else:
            ss = steady_state_for(model, sigma, plant.w, b, exo.v)
            t = np.linspace(0.0, 2 * math.pi / sigma, 1000, endpoint=False)
            sat = saturation_radius(ss.theta_ss(t), model.varrho, float(c["sat_safety"]))
        model = with_sat_radius(model, sat)
        init = c["initial"]
        layout = StateLayout(plant.nz, exo.nv, model.n)
        x0 = layout.pack(init["z"], init["y"], exo.v, init["eta"], init["pi"], init["vartheta"])
        T = float(c["T"]) if "T" in c else float(c["periods"]) * 2 * math.pi / sigma
        if "dt" in c:
            dt = float(c["dt"])
        elif "steps_per_period" in c:
            dt = 2 * math.pi / (dcfg.omega * float(c["steps_per_period"]))
        else:
            dt = None
        if dt is not None and dt > 2 * math.pi / (dcfg.omega * 40):
            raise ConfigError("dt must give at least 40 steps per dither period")
        if T <= 0:
            raise ConfigError("horizon T must be positive")
    except EscRegError:
        raise
    except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
        raise ConfigError(str(exc)) from exc
    return Scenario(plant, exo, model, dcfg, variant, x0, T, dt,
                    c.get("record_stride"), meta={"config": c})


def _generator(c: dict, n: int) -> GeneratorSpec:
    if "a" in c:
        return GeneratorSpec.from_coeffs(c["a"])
    if "frequencies" in c:
        return GeneratorSpec.from_frequencies(c["frequencies"], bool(c.get("include_zero", False)))
    ss = example_steady_input(float(c["sigma"]), c["w"], float(c["b"]), c["v0"])
    if ss.generator.n != n:
        raise ConfigError(f"steady-state input needs internal-model order {ss.generator.n}, m has {n}")
    return ss.generator


def steady_state(scenario: Scenario) -> SteadyState:
    return steady_state_for(scenario.model, scenario.exo.sigma, scenario.plant.w,
                            scenario.plant.b(scenario.exo.v, scenario.plant.w), scenario.exo.v)


def model_to_dict(scenario: Scenario) -> dict:
    model = scenario.model
    return {"n": model.n, "m": model.m.tolist(), "Theta": model.Theta,
            "sat_radius": model.sat_radius, "a": (model.m - model.varrho).tolist()}

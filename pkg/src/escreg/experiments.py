"""Frequency sweeps over the benchmark scenario."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .closed_loop import Scenario
from .sim import Trajectory, integrate, ultimate_bound

SAMPLES_PER_PERIOD = 32


def at_omega(scenario: Scenario, omega: float) -> Scenario:
    """Same scenario at another dither frequency, keeping steps per dither period."""
    dt = None
    if scenario.dt is not None:
        dt = scenario.dt * scenario.cfg.omega / omega
    return replace(scenario, cfg=scenario.cfg.with_omega(omega), dt=dt)


def state_matrix(traj: Trajectory, scenario: Scenario) -> np.ndarray:
    return np.column_stack([traj[name] for name in scenario.layout.channel_names()])


def deviation(scenario: Scenario, dithered: Trajectory | None = None, full_rate: bool = False) -> dict:
    """Sup and final distance between the dithered and analytically averaged loops.

    Both runs use the same step and record stride, so they share sample times;
    without ``full_rate`` the sup is taken over the recorded samples only.
    """
    if dithered is None:
        dithered = integrate(scenario, "dithered", full_rate=full_rate)
    averaged = integrate(scenario, "averaged", full_rate=full_rate)
    if len(averaged.times) != len(dithered.times):
        raise ValueError("dithered trajectory was recorded with a different stride")
    X, Y = state_matrix(dithered, scenario), state_matrix(averaged, scenario)
    dev = np.linalg.norm(X - Y, axis=1)
    return {"omega": scenario.cfg.omega, "sup_deviation": float(dev.max()),
            "final_deviation": float(dev[-1])}


def vartheta_error(traj: Trajectory, scenario: Scenario) -> float:
    """``|vartheta(T) - varrho| / |vartheta(0) - varrho|``."""
    vt = traj.block("vt", scenario.model.n)
    rho = scenario.model.varrho
    return float(np.linalg.norm(vt[-1] - rho) / np.linalg.norm(vt[0] - rho))


def sweep(scenario: Scenario, omegas, tail_fraction: float = 0.2,
          with_deviation: bool = True) -> list[dict]:
    """Ultimate bound of e, averaging gap and estimator error for each omega."""
    rows = []
    for omega in omegas:
        sc = at_omega(scenario, float(omega))
        # >= 32 samples per dither period keeps the sampled sup within ~0.5% of the true one
        per_period = 2 * np.pi / (sc.cfg.omega * sc.step)
        sc = replace(sc, record_stride=max(1, int(per_period // SAMPLES_PER_PERIOD)))
        traj = integrate(sc, "dithered")
        row = {
            "omega": float(omega),
            "ultimate_bound_e": ultimate_bound(traj, "e", tail_fraction),
            "sup_dev_vs_averaged": deviation(sc, traj)["sup_deviation"] if with_deviation else float("nan"),
            "vartheta_err_final": vartheta_error(traj, sc),
        }
        rows.append(row)
    return rows

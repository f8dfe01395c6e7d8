"""Fixed-step RK4 integration of the closed loop, error coordinates and metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closed_loop import ClosedLoop, Scenario
from .errors import IntegrationDiverged, NonFinite
from .oracle import SteadyState

DIVERGENCE_NORM = 1e6
MAX_ROWS = 200_000


def _field_fn(field) -> Callable:
    return field.eval if hasattr(field, "eval") else field


def rk4_step(field, x, t: float, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step; ``field`` is a VectorField or ``f(x, t)``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    f = _field_fn(field)
    x = np.asarray(x, dtype=float)
    k1 = f(x, t)
    k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = f(x + dt * k3, t + dt)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFinite(f"RK4 step produced a non-finite state at t={t:.6g}")
    return out


def steps_for(T: float, dt: float) -> int:
    return max(1, int(math.ceil(T / dt - 1e-9)))


def default_stride(nsteps: int, max_rows: int = MAX_ROWS) -> int:
    return max(1, int(math.ceil(nsteps / (max_rows - 1))))


def integrate_field(field, x0, T: float, dt: float, stride: int = 1, t0: float = 0.0,
                    diverge_at: float = DIVERGENCE_NORM) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step RK4 over ``[t0, t0 + T]``; returns sampled ``(times, states)``.

    The last step is shortened so the horizon ends exactly at ``t0 + T``.
    """
    nsteps = steps_for(T, dt)
    x = np.array(x0, dtype=float)
    times, states = [t0], [x.copy()]
    t = t0
    for i in range(1, nsteps + 1):
        h = min(dt, t0 + T - t) if i == nsteps else dt
        x = rk4_step(field, x, t, h)
        t = t0 + T if i == nsteps else t0 + i * dt
        nrm = float(np.linalg.norm(x))
        if nrm > diverge_at:
            raise IntegrationDiverged(t, nrm)
        if i % stride == 0 or i == nsteps:
            times.append(t)
            states.append(x.copy())
    return np.array(times), np.array(states)


@dataclass
class Trajectory:
    times: np.ndarray
    channels: dict[str, np.ndarray]

    def __post_init__(self):
        n = len(self.times)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, col in self.channels.items():
            if len(col) != n:
                raise ValueError(f"channel {name} has {len(col)} rows, expected {n}")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def block(self, prefix: str, count: int) -> np.ndarray:
        return np.column_stack([self.channels[f"{prefix}{i + 1}"] for i in range(count)])

    @classmethod
    def from_states(cls, scenario: Scenario, times, states, u=None) -> "Trajectory":
        L = scenario.layout
        names = L.channel_names()
        channels = {name: states[:, i] for i, name in enumerate(names)}
        q = scenario.plant.q
        w = scenario.plant.w
        channels["e"] = states[:, L.y] - np.array([q(v, w) for v in states[:, L.v]])
        if u is not None:
            channels["u"] = np.asarray(u)
        return cls(np.asarray(times), channels)


def _python_integrate(scenario: Scenario, mode: str, stride: int):
    loop = ClosedLoop(scenario)
    field = {"dithered": loop.dithered, "averaged": loop.averaged, "drift": loop.drift}[mode]
    times, states = integrate_field(field, scenario.x0, scenario.T, scenario.step, stride)
    u = np.array([field_input(loop, mode, x, t) for t, x in zip(times, states)])
    return times, states, u


def field_input(loop: ClosedLoop, mode: str, x, t: float) -> float:
    """The control input applied by ``mode`` at state ``x`` and time ``t``."""
    from .control import averaged_feedback, dither
    from .internal_model import chi_s

    sc, L = loop.sc, loop.layout
    u = chi_s(x[L.eta], x[L.vartheta], sc.model)
    e = loop.error(x)
    if mode == "dithered":
        u += dither(t, e, sc.cfg, sc.variant)
    elif mode == "averaged":
        u += averaged_feedback(e, sc.plant.b(x[L.v], sc.plant.w), sc.cfg, sc.variant)
    return u


def integrate(scenario: Scenario, mode: str = "dithered", backend: str = "auto",
              full_rate: bool = False) -> Trajectory:
    """Integrate the closed loop with fixed-step RK4.

    ``mode`` picks the dithered loop, its analytic average, or the loop with
    the dither removed.  ``backend="auto"`` uses the compiled kernel when the
    scenario's plant has one, otherwise the reference Python loop.
    """
    nsteps = steps_for(scenario.T, scenario.step)
    if full_rate:
        stride = 1
    else:
        stride = scenario.record_stride or default_stride(nsteps)
    if backend == "auto":
        from . import fast

        backend = "compiled" if fast.supports(scenario) else "python"
    if backend == "compiled":
        from . import fast

        times, states, u = fast.integrate(scenario, mode, stride)
    elif backend == "python":
        times, states, u = _python_integrate(scenario, mode, stride)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    return Trajectory.from_states(scenario, times, states, u)


@dataclass
class ErrorView:
    times: np.ndarray
    zbar: np.ndarray
    etabar: np.ndarray
    pibar: np.ndarray
    varthetabar: np.ndarray
    e: np.ndarray


def error_view(traj: Trajectory, oracle: SteadyState, b: float, varrho) -> ErrorView:
    """Subtract the steady state: zbar = z - z(mu), etabar = eta - theta(mu),
    varthetabar = vartheta - varrho, pibar = pi - varpi(mu) - e/b.

    The oracle's time origin must match the trajectory's (same v(0)).
    """
    t = traj.times
    nz = oracle.z_ss.dim
    n = oracle.theta_ss.dim
    z = traj.block("z", nz)
    eta = traj.block("eta", n)
    vt = traj.block("vt", n)
    e = traj["e"]
    return ErrorView(
        times=t,
        zbar=z - oracle.z_ss(t),
        etabar=eta - oracle.theta_ss(t),
        pibar=traj["pi"] - oracle.varpi_ss(t) - e / b,
        varthetabar=vt - np.asarray(varrho)[None, :],
        e=e,
    )


def ultimate_bound(traj: Trajectory, channel: str, tail_fraction: float = 0.2) -> float:
    """``sup |channel|`` over the last ``tail_fraction`` of the horizon."""
    if not 0.0 < tail_fraction < 1.0:
        raise ValueError("tail_fraction must lie in (0, 1)")
    t = traj.times
    start = t[-1] - tail_fraction * (t[-1] - t[0])
    mask = t >= start - 1e-12
    return float(np.max(np.abs(traj[channel][mask])))

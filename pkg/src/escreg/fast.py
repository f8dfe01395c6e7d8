"""Compiled RK4 kernel for the benchmark closed loop.

Mirrors ``ClosedLoop`` for the benchmark plant only; tests hold it to the
reference Python integrator.  Long horizons (estimator convergence needs
tens of thousands of seconds at 64 steps per dither period) are out of
reach for the Python loop.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .closed_loop import Scenario
from .control import ControllerVariant
from .errors import IntegrationDiverged, NonFinite
from .sim import DIVERGENCE_NORM, steps_for

MODES = {"dithered": 0, "averaged": 1, "drift": 2}

# x = (z1, z2, y, v1, v2, eta[0:n], pi, vartheta[0:n])
_Y, _V1, _V2, _ETA = 2, 3, 4, 5


@njit(cache=True)
def _polyval(c, s):
    acc = 0.0
    for i in range(c.size - 1, -1, -1):
        acc = acc * s + c[i]
    return acc


@njit(cache=True)
def _polyint_val(c, x):
    acc = 0.0
    for i in range(c.size - 1, -1, -1):
        acc = acc * x + c[i] / (i + 1)
    return acc * x


@njit(cache=True)
def _psi(s):
    return math.exp(-1.0 / s) if s > 1e-8 else 0.0


@njit(cache=True)
def _chi_s(x, n, m, sat):
    eta0 = _ETA
    vt0 = _ETA + n + 1
    r2 = 0.0
    for i in range(n):
        r2 += x[eta0 + i] ** 2 + x[vt0 + i] ** 2
    if r2 >= sat + 1.0:
        return 0.0
    # vartheta^T [companion(m - vartheta) + I] eta
    chi = 0.0
    for i in range(n - 1):
        chi += x[vt0 + i] * (x[eta0 + i + 1] + x[eta0 + i])
    last = x[eta0 + n - 1]
    for j in range(n):
        last -= (m[j] - x[vt0 + j]) * x[eta0 + j]
    chi += x[vt0 + n - 1] * last
    if r2 <= sat:
        return chi
    s = sat + 1.0 - r2
    p, q = _psi(s), _psi(1.0 - s)
    return chi * p / (p + q)


@njit(cache=True)
def _rhs(x, t, out, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode):
    z1, z2, y, v1, v2 = x[0], x[1], x[2], x[3], x[4]
    e = y - v1
    u = _chi_s(x, n, m, sat)
    if mode == 0:
        if variant == 0:
            u += amp * math.cos(omega * t + k * e * e) * _polyval(rho, e)
        else:
            u += amp * math.cos(omega * t + k * _polyint_val(rho, e * e))
    elif mode == 1:
        alpha = amp * amp / omega
        if variant == 0:
            r = _polyval(rho, e)
            u += -k * alpha * b * r * r * e
        else:
            u += -k * alpha * b * _polyval(rho, e * e) * e
    sn = math.sin(y - v1)
    out[0] = -z1 + sn * sn * y
    out[1] = -z2 + y
    out[2] = z2 - w1 * y - w2 * y * y * y + b * u
    out[3] = sigma * v2
    out[4] = -sigma * v1
    pi_i = _ETA + n
    vt0 = pi_i + 1
    pi = x[pi_i]
    mdot = 0.0
    for j in range(n):
        mdot -= m[j] * x[_ETA + j]
    for i in range(n - 1):
        out[_ETA + i] = x[_ETA + i + 1]
    out[_ETA + n - 1] = mdot + pi
    out[pi_i] = -pi + u
    resid = -pi
    for j in range(n):
        resid += x[_ETA + j] * x[vt0 + j]
    for i in range(n):
        out[vt0 + i] = -Theta * x[_ETA + i] * resid
    return u


@njit(cache=True)
def _integrate(x0, dt, nsteps, T, stride, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k,
               rho, variant, mode, diverge_at):
    dim = x0.size
    nrec = nsteps // stride + 2
    times = np.empty(nrec)
    states = np.empty((nrec, dim))
    inputs = np.empty(nrec)
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)
    x = x0.copy()
    times[0] = 0.0
    states[0] = x
    inputs[0] = _rhs(x, 0.0, k1, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode)
    rec = 1
    t = 0.0
    status = 0
    for i in range(1, nsteps + 1):
        h = dt
        if i == nsteps:
            h = min(dt, T - t)
        _rhs(x, t, k1, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode)
        for j in range(dim):
            tmp[j] = x[j] + 0.5 * h * k1[j]
        _rhs(tmp, t + 0.5 * h, k2, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode)
        for j in range(dim):
            tmp[j] = x[j] + 0.5 * h * k2[j]
        _rhs(tmp, t + 0.5 * h, k3, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode)
        for j in range(dim):
            tmp[j] = x[j] + h * k3[j]
        _rhs(tmp, t + h, k4, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode)
        nrm = 0.0
        for j in range(dim):
            x[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            nrm += x[j] * x[j]
        t = T if i == nsteps else i * dt
        if not math.isfinite(nrm):
            status = 1
        elif math.sqrt(nrm) > diverge_at:
            status = 2
        if status != 0 or i % stride == 0 or i == nsteps:
            times[rec] = t
            states[rec] = x
            inputs[rec] = _rhs(x, t, k1, n, w1, w2, b, sigma, m, Theta, sat, amp, omega, k, rho, variant, mode)
            rec += 1
        if status != 0:
            break
    return times[:rec], states[:rec], inputs[:rec], status


def supports(scenario: Scenario) -> bool:
    return scenario.plant.name == "example_liu2009" and scenario.exo.nv == 2


def integrate(scenario: Scenario, mode: str = "dithered", stride: int = 1):
    """Run the compiled kernel; same contract as the Python integrator."""
    if not supports(scenario):
        raise ValueError("compiled kernel only covers the benchmark plant")
    sc = scenario
    cfg, model = sc.cfg, sc.model
    dt = sc.step
    nsteps = steps_for(sc.T, dt)
    w = sc.plant.w
    b = float(sc.plant.b(np.zeros(2), w))
    times, states, inputs, status = _integrate(
        np.asarray(sc.x0, dtype=float), dt, nsteps, float(sc.T), int(stride), model.n,
        float(w[0]), float(w[1]), b, float(sc.exo.sigma), np.asarray(model.m, dtype=float),
        float(model.Theta), float(model.sat_radius), cfg.amplitude, float(cfg.omega), float(cfg.k),
        np.asarray(cfg.rho.coeffs, dtype=float), 0 if sc.variant is ControllerVariant.A else 1,
        MODES[mode], DIVERGENCE_NORM,
    )
    if status == 1:
        raise NonFinite(f"non-finite state at t={times[-1]:.6g}")
    if status == 2:
        raise IntegrationDiverged(float(times[-1]), float(np.linalg.norm(states[-1])))
    return times, states, inputs

"""Stacked closed-loop state and its vector fields.

State layout: ``x = col(z, y, v, eta, pi, vartheta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .control import (CompensatorState, ControllerVariant, DitherConfig, averaged_feedback,
                      dither, dither_envelope, dither_phase)
from .internal_model import InternalModel, chi_s
from .plant import Exosystem, PlantModel


@dataclass(frozen=True)
class StateLayout:
    nz: int
    nv: int
    n: int

    @property
    def z(self) -> slice:
        return slice(0, self.nz)

    @property
    def y(self) -> int:
        return self.nz

    @property
    def v(self) -> slice:
        return slice(self.nz + 1, self.nz + 1 + self.nv)

    @property
    def eta(self) -> slice:
        s = self.nz + 1 + self.nv
        return slice(s, s + self.n)

    @property
    def pi(self) -> int:
        return self.nz + 1 + self.nv + self.n

    @property
    def vartheta(self) -> slice:
        s = self.pi + 1
        return slice(s, s + self.n)

    @property
    def dim(self) -> int:
        return self.nz + 1 + self.nv + 2 * self.n + 1

    def pack(self, z, y, v, eta, pi, vartheta) -> np.ndarray:
        x = np.empty(self.dim)
        x[self.z] = z
        x[self.y] = y
        x[self.v] = v
        x[self.eta] = eta
        x[self.pi] = pi
        x[self.vartheta] = vartheta
        return x

    def channel_names(self) -> list[str]:
        names = [f"z{i + 1}" for i in range(self.nz)] + ["y"]
        names += [f"v{i + 1}" for i in range(self.nv)]
        names += [f"eta{i + 1}" for i in range(self.n)] + ["pi"]
        names += [f"vt{i + 1}" for i in range(self.n)]
        return names


@dataclass(frozen=True)
class Scenario:
    plant: PlantModel
    exo: Exosystem
    model: InternalModel
    cfg: DitherConfig
    variant: ControllerVariant
    x0: np.ndarray
    T: float
    dt: float | None = None
    record_stride: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def layout(self) -> StateLayout:
        return StateLayout(self.plant.nz, self.exo.nv, self.model.n)

    @property
    def step(self) -> float:
        """Integration step: the configured dt, else 64 steps per dither period."""
        return self.dt if self.dt is not None else 2 * np.pi / (self.cfg.omega * 64)


class ClosedLoop:
    """Vector fields of the closed loop for one scenario.

    ``rhs(x, t, u_extra)`` is the closed loop with ``u = chi_s + u_extra(x, t)``;
    the dithered, undithered and averaged loops only differ in ``u_extra``.
    """

    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.layout = scenario.layout

    def error(self, x) -> float:
        L = self.layout
        return self.sc.plant.error(x[L.y], x[L.v])

    def input_direction(self, x) -> np.ndarray:
        """Where ``u`` enters: ``b(v, w)`` in the y-row and 1 in the pi-row."""
        L = self.layout
        B = np.zeros(L.dim)
        B[L.y] = self.sc.plant.b(x[L.v], self.sc.plant.w)
        B[L.pi] = 1.0
        return B

    def rhs(self, x, t: float, u_extra: float) -> np.ndarray:
        L, sc = self.layout, self.sc
        plant, model, w = sc.plant, sc.model, sc.plant.w
        z, y, v = x[L.z], x[L.y], x[L.v]
        eta, pi, vt = x[L.eta], x[L.pi], x[L.vartheta]
        u = chi_s(eta, vt, model) + u_extra
        dx = np.empty(L.dim)
        dx[L.z] = plant.F(w) @ z + plant.G(y, v, w) * y + plant.D1(v, w)
        dx[L.y] = plant.H(w) @ z + plant.K(y, v, w) * y + plant.b(v, w) * u + plant.D2(v, w)
        dx[L.v] = sc.exo.S @ v
        dx[L.eta] = model.M @ eta + model.N * pi
        dx[L.pi] = -pi + u
        dx[L.vartheta] = -model.Theta * eta * (eta @ vt - pi)
        return dx

    def dithered(self, x, t: float) -> np.ndarray:
        return self.rhs(x, t, dither(t, self.error(x), self.sc.cfg, self.sc.variant))

    def drift(self, x, t: float = 0.0) -> np.ndarray:
        return self.rhs(x, t, 0.0)

    def averaged(self, x, t: float = 0.0) -> np.ndarray:
        L = self.layout
        b = self.sc.plant.b(x[L.v], self.sc.plant.w)
        return self.rhs(x, t, averaged_feedback(self.error(x), b, self.sc.cfg, self.sc.variant))

    def dither_fields(self):
        """``(g1, g2)`` with dithered = drift + g1 cos(omega t) + g2 sin(omega t)."""
        cfg, variant = self.sc.cfg, self.sc.variant

        def g1(x, t=0.0):
            e = self.error(x)
            return dither_envelope(e, cfg, variant) * np.cos(dither_phase(e, cfg, variant)) * self.input_direction(x)

        def g2(x, t=0.0):
            e = self.error(x)
            return -dither_envelope(e, cfg, variant) * np.sin(dither_phase(e, cfg, variant)) * self.input_direction(x)

        return g1, g2

    def compensator(self, x) -> CompensatorState:
        L = self.layout
        return CompensatorState(x[L.eta].copy(), float(x[L.pi]), x[L.vartheta].copy())

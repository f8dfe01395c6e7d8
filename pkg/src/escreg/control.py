"""Extremum-seeking output feedback with the nonlinear internal model.

Variant A:  u = sqrt(alpha*omega) * cos(omega t + k e^2) * rho(e) + chi_s(eta, vartheta)
Variant B:  u = sqrt(alpha*omega) * cos(omega t + k R(e^2)) + chi_s(eta, vartheta)

with ``R(x) = int_0^x rho(s) ds``.  Neither law uses the sign of the input gain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConfigError
from .internal_model import InternalModel, chi_s


class ControllerVariant(enum.Enum):
    A = "A"
    B = "B"

    @classmethod
    def parse(cls, tag) -> "ControllerVariant":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).upper())
        except ValueError:
            raise ConfigError(f"unknown controller variant {tag!r}") from None


@dataclass(frozen=True)
class Rho:
    """Gain polynomial ``rho(s) = sum c_i s^i`` (ascending coefficients).

    Nonnegative coefficients with ``c_0 >= 1`` keep ``rho >= 1`` for s >= 0.
    """

    coeffs: tuple[float, ...]
    arg: str = "e"

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.size == 0 or np.any(c < 0) or c[0] < 1.0:
            raise ConfigError(f"rho coefficients must be nonnegative with constant term >= 1, got {self.coeffs}")

    def __call__(self, s: float) -> float:
        return float(P.polyval(s, self.coeffs))

    def derivative(self, s: float) -> float:
        return float(P.polyval(s, P.polyder(self.coeffs))) if len(self.coeffs) > 1 else 0.0

    def integral(self, x: float) -> float:
        """``int_0^x rho(s) ds`` in closed form."""
        return float(P.polyval(x, P.polyint(self.coeffs)))


@dataclass(frozen=True)
class DitherConfig:
    alpha: float = 1.0
    omega: float = 200.0
    k: float = 2.0
    rho: Rho = field(default_factory=lambda: Rho((1.0, 0.0, 1.0)))

    def __post_init__(self):
        for name in ("alpha", "omega", "k"):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise ConfigError(f"{name} must be positive and finite, got {val}")

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.alpha * self.omega)

    def with_omega(self, omega: float) -> "DitherConfig":
        return DitherConfig(self.alpha, float(omega), self.k, self.rho)


@dataclass(frozen=True)
class CompensatorState:
    eta: np.ndarray
    pi: float
    vartheta: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "CompensatorState":
        return cls(np.zeros(n), 0.0, np.zeros(n))


def dither_phase(e: float, cfg: DitherConfig, variant: ControllerVariant) -> float:
    """Phase shift added to ``omega t``."""
    if variant is ControllerVariant.A:
        return cfg.k * e * e
    return cfg.k * cfg.rho.integral(e * e)


def dither_envelope(e: float, cfg: DitherConfig, variant: ControllerVariant) -> float:
    if variant is ControllerVariant.A:
        return cfg.amplitude * cfg.rho(e)
    return cfg.amplitude


def dither(t: float, e: float, cfg: DitherConfig, variant: ControllerVariant) -> float:
    return dither_envelope(e, cfg, variant) * math.cos(cfg.omega * t + dither_phase(e, cfg, variant))


def control_input(t: float, e: float, comp: CompensatorState, cfg: DitherConfig,
                  variant: ControllerVariant, model: InternalModel) -> float:
    return dither(t, e, cfg, variant) + chi_s(comp.eta, comp.vartheta, model)


def averaged_feedback(e: float, b: float, cfg: DitherConfig, variant: ControllerVariant) -> float:
    """Input that reproduces the averaged dither effect: ``-k alpha b rho^2(e) e`` (A)
    or ``-k alpha b rho(e^2) e`` (B), so the output sees ``-k alpha b^2 (...) e``.
    """
    gain = cfg.rho(e) ** 2 if variant is ControllerVariant.A else cfg.rho(e * e)
    return -cfg.k * cfg.alpha * b * gain * e


def compensator_rhs(comp: CompensatorState, u: float, model: InternalModel) -> CompensatorState:
    eta = np.asarray(comp.eta, dtype=float)
    vt = np.asarray(comp.vartheta, dtype=float)
    deta = model.M @ eta + model.N * comp.pi
    dpi = -comp.pi + u
    dvt = -model.Theta * eta * (eta @ vt - comp.pi)
    return CompensatorState(deta, float(dpi), dvt)

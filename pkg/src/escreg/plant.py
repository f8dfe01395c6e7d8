"""Plant class with an exosystem, and the benchmark plant.

The plant is

    z' = F(w) z + G(y, v, w) y + D1(v, w)
    y' = H(w) z + K(y, v, w) y + b(v, w) u + D2(v, w)
    e  = y - q(v, w)

driven by ``v' = S(sigma) v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NonFinite
from .linalg import eig_imaginary_distinct, is_hurwitz


def rotation_generator(sigma: float) -> np.ndarray:
    return np.array([[0.0, sigma], [-sigma, 0.0]])


@dataclass(frozen=True)
class Exosystem:
    sigma: float
    S: np.ndarray = field(repr=False)
    v: np.ndarray

    @classmethod
    def rotation(cls, sigma: float, v0=(1.0, 0.0)) -> "Exosystem":
        return cls(float(sigma), rotation_generator(sigma), np.asarray(v0, dtype=float))

    @property
    def nv(self) -> int:
        return self.S.shape[0]


def exosystem_rhs(v, exo: Exosystem) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[0] != exo.nv:
        raise ValueError("v does not match the exosystem dimension")
    return exo.S @ v


@dataclass(frozen=True)
class PlantModel:
    nz: int
    w: np.ndarray
    F: Callable[[np.ndarray], np.ndarray]
    G: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    D1: Callable[[np.ndarray, np.ndarray], np.ndarray]
    H: Callable[[np.ndarray], np.ndarray]
    K: Callable[[float, np.ndarray, np.ndarray], float]
    b: Callable[[np.ndarray, np.ndarray], float]
    D2: Callable[[np.ndarray, np.ndarray], float]
    q: Callable[[np.ndarray, np.ndarray], float]
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def error(self, y: float, v) -> float:
        return y - self.q(np.asarray(v, dtype=float), self.w)


@dataclass(frozen=True)
class PlantState:
    z: np.ndarray
    y: float


def plant_rhs(state: PlantState, v, u: float, model: PlantModel) -> PlantState:
    """Time derivative ``(z', y')`` of the plant; the result reuses PlantState."""
    v = np.asarray(v, dtype=float)
    z, y, w = np.asarray(state.z, dtype=float), float(state.y), model.w
    dz = model.F(w) @ z + model.G(y, v, w) * y + model.D1(v, w)
    dy = float(model.H(w) @ z + model.K(y, v, w) * y + model.b(v, w) * u + model.D2(v, w))
    if not (np.all(np.isfinite(dz)) and np.isfinite(dy)):
        raise NonFinite(f"plant derivative not finite at z={z}, y={y}, v={v}, u={u}")
    return PlantState(dz, dy)


def example_plant(w=(9.0, 1.0), b_const: float = -1.0) -> PlantModel:
    """The benchmark: ``z' = -z + (sin^2(y - v1) y, y)``, ``y' = z2 - w1 y - w2 y^3 + b u``."""
    if b_const == 0:
        raise ValueError("b must be nonzero")
    w = np.asarray(w, dtype=float)
    b_const = float(b_const)
    zeros2 = np.zeros(2)
    H = np.array([0.0, 1.0])
    return PlantModel(
        nz=2,
        w=w,
        F=lambda w: -np.eye(2),
        G=lambda y, v, w: np.array([np.sin(y - v[0]) ** 2, 1.0]),
        D1=lambda v, w: zeros2,
        H=lambda w: H,
        K=lambda y, v, w: -w[0] - w[1] * y * y,
        b=lambda v, w: b_const,
        D2=lambda v, w: 0.0,
        q=lambda v, w: v[0],
        name="example_liu2009",
        params={"w": w.tolist(), "b": b_const},
    )


def check_assumptions(plant: PlantModel, exo: Exosystem, v_grid=None, y_grid=None) -> dict[str, bool]:
    """Evaluate the standing assumptions that can be checked numerically.

    ``F_hurwitz``: F(w) is Hurwitz.  ``b_nonzero``: b(v, w)^2 > 0 on a sampled
    grid.  ``exo_neutral``: S has distinct imaginary-axis eigenvalues.
    ``vanishing_at_origin``: D1, D2 and q vanish at v = 0.
    """
    if v_grid is None:
        r = np.linspace(-2.0, 2.0, 9)
        v_grid = [np.array([a, c] + [0.0] * (exo.nv - 2)) for a in r for c in r] if exo.nv >= 2 \
            else [np.array([a]) for a in r]
    w = plant.w
    zero_v = np.zeros(exo.nv)
    return {
        "F_hurwitz": is_hurwitz(plant.F(w)),
        "b_nonzero": all(plant.b(v, w) ** 2 > 0 for v in v_grid),
        "exo_neutral": eig_imaginary_distinct(exo.S),
        "vanishing_at_origin": bool(
            np.allclose(plant.D1(zero_v, w), 0.0) and plant.D2(zero_v, w) == 0.0
            and plant.q(zero_v, w) == 0.0
        ),
    }

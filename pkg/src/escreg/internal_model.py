"""Steady-state generator, compensator matrices and the feedforward map.

The generator reproduces the steady-state input as the first state of
``xi' = Phi(a) xi``.  The compensator runs ``eta' = M eta + N pi`` with a
Hurwitz companion ``M``; the change of coordinates ``theta = T(a) xi`` turns
the generator into ``theta' = M theta + N (m - a)^T theta``, which is what
lets the unknown ``a`` be estimated through ``varrho = m - a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DuplicateFrequency, NotHurwitz
from .linalg import companion, eig_imaginary_distinct, inv, is_hurwitz

PSI_GUARD = 1e-8


def min_poly_coeffs(frequencies, include_zero: bool = False) -> np.ndarray:
    """Coefficients ``(a_1, ..., a_n)`` of ``prod(s^2 + w_i^2) * (s if include_zero)``.

    ``a_1`` is the constant coefficient (it multiplies ``u`` in the generator
    ODE) and ``a_n`` multiplies ``s^(n-1)``.
    """
    freqs = np.atleast_1d(np.array(frequencies, dtype=float))
    if freqs.size == 0 and not include_zero:
        raise ValueError("at least one frequency is needed")
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be positive")
    srt = np.sort(freqs)
    if srt.size and np.any(np.diff(srt) <= 1e-12 * max(1.0, float(srt[-1]))):
        raise DuplicateFrequency(f"repeated frequency in {freqs.tolist()}")
    poly = np.array([1.0])  # ascending powers
    for w in freqs:
        poly = P.polymul(poly, [w * w, 0.0, 1.0])
    if include_zero:
        poly = P.polymul(poly, [0.0, 1.0])
    # drop the leading 1
    return np.asarray(poly[:-1], dtype=float)


@dataclass(frozen=True)
class GeneratorSpec:
    a: np.ndarray
    Phi: np.ndarray = field(repr=False)
    Gamma: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.a.size

    @classmethod
    def from_coeffs(cls, a) -> "GeneratorSpec":
        a = np.atleast_1d(np.array(a, dtype=float))
        Phi = companion(a)
        if not eig_imaginary_distinct(Phi):
            raise ValueError("generator polynomial must have distinct imaginary-axis roots")
        Gamma = np.zeros(a.size)
        Gamma[0] = 1.0
        return cls(a=a, Phi=Phi, Gamma=Gamma)

    @classmethod
    def from_frequencies(cls, frequencies, include_zero: bool = False) -> "GeneratorSpec":
        return cls.from_coeffs(min_poly_coeffs(frequencies, include_zero))


def build_T_inv(a, m) -> np.ndarray:
    """Rows ``varrho^T (Phi + I) Phi^k`` for k = 0..n-1, with ``varrho = m - a``."""
    a = np.atleast_1d(np.array(a, dtype=float))
    m = np.atleast_1d(np.array(m, dtype=float))
    if a.shape != m.shape:
        raise ValueError("a and m must have the same length")
    n = a.size
    Phi = companion(a)
    row = (m - a) @ (Phi + np.eye(n))
    rows = []
    for _ in range(n):
        rows.append(row)
        row = row @ Phi
    return np.array(rows)


def build_T(a, m) -> np.ndarray:
    """The transform ``T(a)``; SingularMatrix signals an unobservable pair."""
    return inv(build_T_inv(a, m))


@dataclass(frozen=True)
class InternalModel:
    m: np.ndarray
    M: np.ndarray = field(repr=False)
    N: np.ndarray = field(repr=False)
    Theta: float
    T: np.ndarray = field(repr=False)
    varrho: np.ndarray
    sat_radius: float

    @property
    def n(self) -> int:
        return self.m.size


def build_internal_model(gen: GeneratorSpec, m, Theta: float, sat_radius: float = math.inf) -> InternalModel:
    m = np.atleast_1d(np.array(m, dtype=float))
    if m.size != gen.n:
        raise ValueError(f"m has length {m.size}, generator order is {gen.n}")
    if Theta <= 0:
        raise ValueError("Theta must be positive")
    M = companion(m)
    if not is_hurwitz(M):
        raise NotHurwitz(f"companion(m) is not Hurwitz for m={m.tolist()}")
    N = np.zeros(m.size)
    N[-1] = 1.0
    return InternalModel(
        m=m, M=M, N=N, Theta=float(Theta), T=build_T(gen.a, m),
        varrho=m - gen.a, sat_radius=float(sat_radius),
    )


def with_sat_radius(model: InternalModel, sat_radius: float) -> InternalModel:
    return InternalModel(model.m, model.M, model.N, model.Theta, model.T, model.varrho, float(sat_radius))


def sylvester_residual(model: InternalModel, gen: GeneratorSpec) -> float:
    """Frobenius norm of ``T Phi - M T - N varrho^T T``."""
    T = model.T
    R = T @ gen.Phi - model.M @ T - np.outer(model.N, model.varrho) @ T
    return float(np.linalg.norm(R))


def commutation_residual(model: InternalModel, gen: GeneratorSpec) -> float:
    T = model.T
    return float(np.linalg.norm(T @ gen.Phi @ inv(T) - gen.Phi))


def chi(theta_hat, vartheta, model: InternalModel) -> float:
    """``vartheta^T [Phi(m - vartheta) + I] theta_hat``.

    The companion is rebuilt from ``m - vartheta`` on each call: the true
    ``a`` is unknown to the controller.
    """
    theta_hat = np.asarray(theta_hat, dtype=float)
    vartheta = np.asarray(vartheta, dtype=float)
    A = companion(model.m - vartheta)
    A[np.diag_indices_from(A)] += 1.0
    return float(vartheta @ A @ theta_hat)


def psi(s: float) -> float:
    return math.exp(-1.0 / s) if s > PSI_GUARD else 0.0


def bump_Psi(s: float) -> float:
    """Smooth step: 0 for s <= 0, 1 for s >= 1, ``psi(s)/(psi(s)+psi(1-s))`` between."""
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    p, q = psi(s), psi(1.0 - s)
    return p / (p + q)


def chi_s(eta, vartheta, model: InternalModel) -> float:
    """Saturated feedforward ``chi(eta, vartheta) * Psi(delta + 1 - |col(eta, vartheta)|^2)``."""
    eta = np.asarray(eta, dtype=float)
    vartheta = np.asarray(vartheta, dtype=float)
    r2 = float(eta @ eta + vartheta @ vartheta)
    if r2 <= model.sat_radius:
        return chi(eta, vartheta, model)
    w = bump_Psi(model.sat_radius + 1.0 - r2)
    return 0.0 if w == 0.0 else w * chi(eta, vartheta, model)


def saturation_radius(theta_samples, varrho, safety: float = 1.5) -> float:
    """``safety * max |col(theta, varrho)|^2`` over sampled steady-state values."""
    th = np.atleast_2d(np.asarray(theta_samples, dtype=float))
    varrho = np.asarray(varrho, dtype=float)
    return float(safety * (np.max(np.sum(th * th, axis=1)) + varrho @ varrho))

"""Harmonic-balance steady states for the benchmark plant.

Used as an independent check on the controller and internal-model code;
the controller itself never calls into this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .internal_model import GeneratorSpec, InternalModel, min_poly_coeffs
from .linalg import solve_linear

FREQ_TOL = 1e-12


@dataclass(frozen=True)
class HarmonicSignal:
    """``x(t) = sum_k cos_k cos(w_k t) + sin_k sin(w_k t)``.

    ``cos`` and ``sin`` have shape (K, d); ``scalar`` signals evaluate to
    floats (d == 1).
    """

    freqs: np.ndarray
    cos: np.ndarray
    sin: np.ndarray
    scalar: bool = False

    @classmethod
    def from_terms(cls, terms, scalar: bool | None = None) -> "HarmonicSignal":
        """Build from ``(freq, cos_coeff, sin_coeff)`` tuples, merging equal frequencies."""
        freqs, cs, ss = [], [], []
        for w, c, s in terms:
            w = float(w)
            c = np.atleast_1d(np.asarray(c, dtype=float))
            s = np.atleast_1d(np.asarray(s, dtype=float))
            if w < 0:
                w, s = -w, -s
            for i, f in enumerate(freqs):
                if abs(f - w) <= FREQ_TOL * max(1.0, w):
                    cs[i] = cs[i] + c
                    ss[i] = ss[i] + s
                    break
            else:
                freqs.append(w)
                cs.append(c)
                ss.append(s)
        if scalar is None:
            scalar = all(c.size == 1 for c in cs) if cs else True
        if not freqs:
            return cls(np.zeros(0), np.zeros((0, 1)), np.zeros((0, 1)), True)
        order = np.argsort(freqs)
        F = np.array(freqs, dtype=float)[order]
        C = np.array(cs, dtype=float).reshape(len(freqs), -1)[order]
        S = np.array(ss, dtype=float).reshape(len(freqs), -1)[order]
        zero = F == 0.0
        S[zero] = 0.0
        return cls(F, C, S, scalar)

    @property
    def dim(self) -> int:
        return self.cos.shape[1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        ph = np.multiply.outer(t, self.freqs)
        out = np.cos(ph) @ self.cos + np.sin(ph) @ self.sin
        return out[..., 0] if self.scalar else out

    def derivative(self) -> "HarmonicSignal":
        w = self.freqs[:, None]
        return HarmonicSignal(self.freqs, w * self.sin, -w * self.cos, self.scalar)

    def component(self, i: int) -> "HarmonicSignal":
        return HarmonicSignal(self.freqs, self.cos[:, i:i + 1], self.sin[:, i:i + 1], True)

    def apply(self, A) -> "HarmonicSignal":
        """Pointwise linear map ``A x(t)``; a 1-D ``A`` gives a scalar signal."""
        A = np.asarray(A, dtype=float)
        if A.ndim == 1:
            return HarmonicSignal(self.freqs, self.cos @ A[:, None], self.sin @ A[:, None], True)
        return HarmonicSignal(self.freqs, self.cos @ A.T, self.sin @ A.T, False)

    def scale(self, c: float) -> "HarmonicSignal":
        return HarmonicSignal(self.freqs, c * self.cos, c * self.sin, self.scalar)

    def __add__(self, other: "HarmonicSignal") -> "HarmonicSignal":
        terms = list(self.terms()) + list(other.terms())
        return HarmonicSignal.from_terms(terms, scalar=self.scalar and other.scalar)

    def __sub__(self, other: "HarmonicSignal") -> "HarmonicSignal":
        return self + other.scale(-1.0)

    def __mul__(self, other: "HarmonicSignal") -> "HarmonicSignal":
        """Product of two scalar signals via product-to-sum identities."""
        if not (self.scalar and other.scalar):
            raise ValueError("only scalar signals can be multiplied")
        terms = []
        for w1, ca, sa in self.terms():
            for w2, cb, sb in other.terms():
                c1, s1, c2, s2 = float(ca[0]), float(sa[0]), float(cb[0]), float(sb[0])
                # cc = (cos(d) + cos(p))/2, ss = (cos(d) - cos(p))/2,
                # sc = (sin(p) + sin(d))/2, cs = (sin(p) - sin(d))/2 with d = w1 - w2, p = w1 + w2
                d, p = w1 - w2, w1 + w2
                terms.append((d, 0.5 * (c1 * c2 + s1 * s2), 0.5 * (s1 * c2 - c1 * s2)))
                terms.append((p, 0.5 * (c1 * c2 - s1 * s2), 0.5 * (s1 * c2 + c1 * s2)))
        return HarmonicSignal.from_terms(terms, scalar=True).pruned()

    def pruned(self, tol: float = 1e-15) -> "HarmonicSignal":
        keep = (np.max(np.abs(self.cos), axis=1) > tol) | (np.max(np.abs(self.sin), axis=1) > tol)
        return HarmonicSignal(self.freqs[keep], self.cos[keep], self.sin[keep], self.scalar)

    def amplitudes(self) -> np.ndarray:
        return np.sqrt(np.sum(self.cos ** 2 + self.sin ** 2, axis=1))

    def terms(self):
        for w, c, s in zip(self.freqs, self.cos, self.sin):
            yield float(w), c, s


def stack(signals) -> HarmonicSignal:
    """Stack scalar signals into one vector-valued signal over the union of frequencies."""
    freqs = []
    for sig in signals:
        for w in sig.freqs:
            if not any(abs(w - f) <= FREQ_TOL * max(1.0, w) for f in freqs):
                freqs.append(float(w))
    freqs.sort()
    C = np.zeros((len(freqs), len(signals)))
    S = np.zeros_like(C)
    for j, sig in enumerate(signals):
        for w, c, s in sig.terms():
            i = next(i for i, f in enumerate(freqs) if abs(w - f) <= FREQ_TOL * max(1.0, w))
            C[i, j] += c[0]
            S[i, j] += s[0]
    return HarmonicSignal(np.array(freqs), C, S, False)


def linear_harmonic_steady_state(F, forcing: HarmonicSignal) -> HarmonicSignal:
    """Periodic solution of ``x' = F x + forcing(t)`` for Hurwitz ``F``.

    Each frequency decouples into ``[[F, -wI], [wI, F]] [X; Y] = -[C; D]``
    for the cos/sin coefficient vectors.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    n = F.shape[0]
    if forcing.dim != n:
        raise ValueError("forcing dimension does not match F")
    I = np.eye(n)
    Xs, Ys = [], []
    for w, c, s in forcing.terms():
        if w == 0.0:
            Xs.append(solve_linear(F, -c))
            Ys.append(np.zeros(n))
            continue
        A = np.block([[F, -w * I], [w * I, F]])
        sol = solve_linear(A, -np.concatenate([c, s]))
        Xs.append(sol[:n])
        Ys.append(sol[n:])
    return HarmonicSignal(forcing.freqs.copy(), np.array(Xs).reshape(-1, n),
                          np.array(Ys).reshape(-1, n), forcing.scalar and n == 1)


def exosystem_signal(sigma: float, v0) -> HarmonicSignal:
    """``v(t)`` for ``v' = [[0, s], [-s, 0]] v``."""
    v0 = np.asarray(v0, dtype=float)
    # v1 = v01 cos + v02 sin, v2 = v02 cos - v01 sin
    return HarmonicSignal(np.array([sigma]), np.array([[v0[0], v0[1]]]),
                          np.array([[v0[1], -v0[0]]]), False)


@dataclass(frozen=True)
class SteadyState:
    z_ss: HarmonicSignal
    u_ss: HarmonicSignal
    xi_ss: HarmonicSignal
    theta_ss: HarmonicSignal
    varpi_ss: HarmonicSignal
    v_ss: HarmonicSignal
    generator: GeneratorSpec


def generator_state(u_ss: HarmonicSignal, n: int) -> HarmonicSignal:
    """``col(u, u', ..., u^(n-1))`` by repeated harmonic differentiation."""
    comps = [u_ss]
    for _ in range(n - 1):
        comps.append(comps[-1].derivative())
    return stack(comps)


def example_steady_input(sigma: float, w, b: float, v0=(1.0, 0.0),
                         m=None, Theta: float = 1.0) -> SteadyState:
    """Regulator solution of the benchmark plant.

    With ``y = v1``: ``z1 = 0``, ``z2`` solves ``z2' = -z2 + v1`` and
    ``u = b^-1 (sigma v2 - z2 + w1 v1 + w2 v1^3)``.  When ``m`` is given the
    internal-model coordinates ``theta = T xi`` and ``varpi = varrho^T theta``
    are filled in; otherwise ``T`` is taken as the identity and ``varrho`` as zero.
    """
    w = np.asarray(w, dtype=float)
    if b == 0:
        raise ValueError("b must be nonzero")
    v = exosystem_signal(sigma, v0)
    v1, v2 = v.component(0), v.component(1)
    forcing = stack([v1.scale(0.0), v1])
    z = linear_harmonic_steady_state(-np.eye(2), forcing)
    z2 = z.component(1)
    u = (v2.scale(sigma) - z2 + v1.scale(w[0]) + (v1 * v1 * v1).scale(w[1])).scale(1.0 / b)
    u = u.pruned(1e-14)
    freqs = u.freqs[u.freqs > 0]
    gen = GeneratorSpec.from_coeffs(min_poly_coeffs(freqs, include_zero=bool(np.any(u.freqs == 0))))
    xi = generator_state(u, gen.n)
    if m is not None:
        from .internal_model import build_internal_model

        model = build_internal_model(gen, m, Theta)
        theta = xi.apply(model.T)
        varpi = theta.apply(model.varrho)
    else:
        theta = xi
        varpi = xi.apply(np.zeros(gen.n))
    return SteadyState(z, u, xi, theta, varpi, v, gen)


def steady_state_for(model: InternalModel, sigma: float, w, b: float, v0=(1.0, 0.0)) -> SteadyState:
    """Steady state expressed in the coordinates of an existing internal model."""
    ss = example_steady_input(sigma, w, b, v0)
    if ss.generator.n != model.n:
        raise ValueError(f"steady-state input needs an order-{ss.generator.n} model, got {model.n}")
    theta = ss.xi_ss.apply(model.T)
    return SteadyState(ss.z_ss, ss.u_ss, ss.xi_ss, theta, theta.apply(model.varrho), ss.v_ss, ss.generator)


def assumption3_check(ss: SteadyState, tol: float = 1e-9) -> bool:
    """Every harmonic of the steady-state input has a nonzero coefficient."""
    amps = ss.u_ss.amplitudes()
    expected = ss.generator.n // 2 + ss.generator.n % 2
    return bool(amps.size >= expected and np.all(amps > tol))


def harmonic_table(ss: SteadyState) -> list[dict]:
    """Rows (signal, index, omega, cos, sin) for every steady-state signal."""
    rows = []
    for name, sig in (("z", ss.z_ss), ("u", ss.u_ss), ("xi", ss.xi_ss),
                      ("theta", ss.theta_ss), ("varpi", ss.varpi_ss)):
        for (w, c, s) in sig.terms():
            for i in range(c.size):
                rows.append({"signal": name, "index": i + 1, "omega": w, "cos": c[i], "sin": s[i]})
    return rows

"""Scalar dithered toy systems shared by the averaging and acceptance tests."""

import math

import numpy as np

from escreg.averaging import DitherPair, VectorField

ZERO = VectorField(1, lambda x, t: np.zeros(1))


def toy_pair(omega, alpha=1.0, k=1.0, b=-1.0, rho=(1.0, 0.0, 1.0), variant="A"):
    """g1 = A cos(phase) env b, g2 = -A sin(phase) env b with A = sqrt(alpha omega)."""
    amp = math.sqrt(alpha * omega)
    r = np.polynomial.Polynomial(rho)
    R = r.integ()

    def parts(x):
        s = float(x[0])
        if variant == "A":
            return k * s * s, r(s)
        return k * R(s * s), 1.0

    def g1(x, t=0.0):
        ph, env = parts(x)
        return np.array([amp * math.cos(ph) * env * b])

    def g2(x, t=0.0):
        ph, env = parts(x)
        return np.array([-amp * math.sin(ph) * env * b])

    return DitherPair(VectorField(1, g1), VectorField(1, g2))


def toy_dithered(omega, **kw):
    pair = toy_pair(omega, **kw)

    def ev(x, t):
        return pair.g1(x, t) * math.cos(omega * t) + pair.g2(x, t) * math.sin(omega * t)

    return VectorField(1, ev)


def toy_averaged(alpha=1.0, k=1.0, b=-1.0, rho=(1.0, 0.0, 1.0), variant="A"):
    r = np.polynomial.Polynomial(rho)

    def ev(x, t=0.0):
        s = float(x[0])
        gain = r(s) ** 2 if variant == "A" else r(s * s)
        return np.array([-k * alpha * b * b * gain * s])

    return VectorField(1, ev)

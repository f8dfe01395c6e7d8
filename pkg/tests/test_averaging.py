import math

import numpy as np
import pytest

from escreg.averaging import (DitherPair, VectorField, averaged_closed_loop, averaged_field, convergence_test,
                              dither_weight, lie_bracket, numeric_averaged_closed_loop)
from escreg.control import ControllerVariant
from escreg.scenario import build_scenario
from toys import ZERO, toy_averaged, toy_dithered, toy_pair


def linear(A):
    A = np.asarray(A, dtype=float)
    return VectorField(A.shape[0], lambda x, t: A @ x, lambda x, t: A)


A = np.array([[0.0, 1.0], [0.0, 0.0]])
B = np.array([[0.0, 0.0], [1.0, 0.0]])


def test_bracket_of_linear_fields_is_commutator():
    x = np.array([0.7, -1.3])
    np.testing.assert_allclose(lie_bracket(linear(A), linear(B), x), (B @ A - A @ B) @ x, atol=1e-15)
    np.testing.assert_allclose(B @ A - A @ B, [[-1, 0], [0, 1]])


def test_bracket_with_fd_jacobians():
    gi = VectorField(2, lambda x, t: A @ x)
    gj = VectorField(2, lambda x, t: B @ x)
    x = np.array([0.7, -1.3])
    np.testing.assert_allclose(lie_bracket(gi, gj, x), (B @ A - A @ B) @ x, atol=1e-8)


def nonlinear_pair():
    g1 = VectorField(2, lambda x, t: np.array([math.sin(x[1]), x[0] ** 2]))
    g2 = VectorField(2, lambda x, t: np.array([x[0] * x[1], math.cos(x[0])]))
    return g1, g2


def test_bracket_self_is_zero():
    g1, _ = nonlinear_pair()
    np.testing.assert_allclose(lie_bracket(g1, g1, [0.3, 0.4]), 0.0, atol=1e-12)


def test_bracket_antisymmetric_and_bilinear():
    g1, g2 = nonlinear_pair()
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.normal(size=2)
        ab = lie_bracket(g1, g2, x)
        np.testing.assert_allclose(lie_bracket(g2, g1, x), -ab, atol=1e-6)
        np.testing.assert_allclose(lie_bracket(g1.scaled(3.0), g2, x), 3.0 * ab, atol=1e-6)


def test_bracket_dimension_mismatch():
    with pytest.raises(ValueError):
        lie_bracket(linear(A), linear(np.eye(3)), np.zeros(2))


def test_dither_weight_cos_sin_is_half():
    assert dither_weight(math.cos, math.sin) == pytest.approx(0.5, abs=1e-6)
    assert dither_weight(math.sin, math.cos) == pytest.approx(-0.5, abs=1e-6)


@pytest.mark.parametrize("variant", ["A", "B"])
@pytest.mark.parametrize("b", [-1.0, 2.0])
def test_scalar_toy_average(variant, b):
    kw = dict(alpha=0.7, k=1.5, b=b, rho=(2.0, 0.0, 1.0), variant=variant)
    avg = averaged_field(ZERO, [toy_pair(300.0, **kw)], 300.0)
    ref = toy_averaged(**kw)
    for s in np.linspace(-1.2, 1.2, 13):
        assert avg([s])[0] == pytest.approx(ref([s])[0], rel=1e-6, abs=1e-8)


def test_zero_dither_gives_drift():
    f = VectorField(2, lambda x, t: np.array([-x[0], x[0] - x[1]]))
    zero = VectorField(2, lambda x, t: np.zeros(2))
    avg = averaged_field(f, [DitherPair(zero, zero)], 50.0)
    x = np.array([0.3, -2.0])
    np.testing.assert_array_equal(avg(x), f(x))


def test_average_is_omega_independent():
    x = np.array([0.4])
    a1 = averaged_field(ZERO, [toy_pair(200.0)], 200.0)(x)
    a2 = averaged_field(ZERO, [toy_pair(400.0)], 400.0)(x)
    np.testing.assert_allclose(a1, a2, rtol=1e-9)


def test_swapping_pair_flips_correction():
    p = toy_pair(100.0)
    x = np.array([0.5])
    a = averaged_field(ZERO, [p], 100.0)(x)
    swapped = averaged_field(ZERO, [DitherPair(p.g2, p.g1)], 100.0)(x)
    flipped = averaged_field(ZERO, [DitherPair(p.g1, p.g2, sin_sign=-1.0)], 100.0)(x)
    np.testing.assert_allclose(swapped, -a, rtol=1e-9)
    np.testing.assert_allclose(flipped, -a, rtol=1e-9)


def test_averaged_field_rejects_bad_omega():
    with pytest.raises(ValueError):
        averaged_field(ZERO, [], 0.0)


@pytest.mark.parametrize("variant", ["A", "B"])
def test_closed_loop_numeric_average_matches_analytic(variant):
    sc = build_scenario(controller=variant)
    num = numeric_averaged_closed_loop(sc)
    ana = averaged_closed_loop(sc)
    rng = np.random.default_rng(11)
    for _ in range(10):
        x = sc.x0 + rng.normal(scale=0.3, size=sc.x0.size)
        a, n = ana(x), num(x)
        assert np.linalg.norm(a - n) <= 1e-6 * np.linalg.norm(a)


def test_averaged_feedback_vanishes_at_zero_error():
    sc = build_scenario()
    from escreg.closed_loop import ClosedLoop

    loop = ClosedLoop(sc)
    x = sc.x0.copy()
    L = sc.layout
    x[L.y] = x[L.v][0]
    np.testing.assert_array_equal(loop.averaged(x), loop.drift(x))
    assert averaged_closed_loop(sc, ControllerVariant.B)(x) == pytest.approx(loop.drift(x))


def test_convergence_without_dither_is_zero():
    f = VectorField(1, lambda x, t: -x)
    rows = convergence_test(lambda w: f, f, [1.0], 1.0, [10.0, 20.0])
    assert all(r["sup_deviation"] == 0.0 for r in rows)


def test_convergence_requires_increasing_omegas():
    with pytest.raises(ValueError):
        convergence_test(lambda w: ZERO, ZERO, [0.0], 1.0, [20.0, 10.0])


def test_scalar_toy_convergence():
    rows = convergence_test(toy_dithered, toy_averaged(), [1.0], 2.0, [100.0, 400.0, 1600.0])
    devs = [r["sup_deviation"] for r in rows]
    assert devs[0] < 0.5
    assert devs[1] <= 0.7 * devs[0] and devs[2] <= 0.7 * devs[1], devs

import math
from dataclasses import replace

import numpy as np
import pytest

from escreg.errors import ConfigError, IntegrationDiverged
from escreg.scenario import build_scenario, steady_state
from escreg.sim import Trajectory, error_view, integrate, integrate_field, rk4_step, ultimate_bound


def decay(x, t):
    return -x


def test_rk4_single_step():
    assert rk4_step(decay, [1.0], 0.0, 0.1)[0] == pytest.approx(0.9048375, abs=5e-8)


def test_rk4_zero_field():
    x = np.array([1.0, -2.0])
    np.testing.assert_array_equal(rk4_step(lambda x, t: np.zeros(2), x, 0.0, 0.3), x)


def test_rk4_rejects_bad_step():
    with pytest.raises(ValueError):
        rk4_step(decay, [1.0], 0.0, 0.0)


def rk4_error(dt):
    _, xs = integrate_field(decay, [1.0], 1.0, dt)
    return abs(xs[-1, 0] - math.exp(-1.0))


@pytest.mark.parametrize("dt", [0.1, 0.05, 0.025])
def test_rk4_fourth_order(dt):
    assert rk4_error(dt) / rk4_error(dt / 2) == pytest.approx(16.0, abs=2.0)


def test_integrate_field_hits_horizon():
    t, _ = integrate_field(decay, [1.0], 1.0, 0.3)
    assert t[-1] == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diff(t) > 0)


def test_integrate_field_diverges():
    with pytest.raises(IntegrationDiverged):
        integrate_field(lambda x, t: x * x, [2.0], 5.0, 0.01)


def short(**kw):
    base = dict(T=3.0, omega=100.0)
    base.update(kw)
    return build_scenario(**base)


def test_zero_loop_stays_zero():
    sc = short(v0=[0.0, 0.0], frequencies=[math.pi / 12, math.pi / 4], initial={"z": [0, 0], "y": 0.0, "eta": [0, 0, 0, 0], "pi": 0.0,
                                       "vartheta": [0, 0, 0, 0]})
    tr = integrate(sc, "drift")
    assert len(tr.times) > 10
    for name in sc.layout.channel_names():
        assert np.max(np.abs(tr[name])) == 0.0


def test_zero_exosystem_needs_explicit_generator():
    with pytest.raises(ConfigError):
        build_scenario(v0=[0.0, 0.0])


def test_exosystem_norm_preserved():
    tr = integrate(build_scenario(omega=50.0))
    r = np.hypot(tr["v1"], tr["v2"])
    assert np.max(np.abs(r - 1.0)) <= 1e-6


@pytest.mark.parametrize("mode", ["dithered", "averaged", "drift"])
@pytest.mark.parametrize("variant", ["A", "B"])
def test_compiled_matches_python(mode, variant):
    sc = replace(short(T=0.3, controller=variant), record_stride=10)
    a = integrate(sc, mode, backend="compiled")
    b = integrate(sc, mode, backend="python")
    np.testing.assert_allclose(a.times, b.times, rtol=0, atol=1e-12)
    for name in sc.layout.channel_names() + ["e", "u"]:
        np.testing.assert_allclose(a[name], b[name], rtol=0, atol=1e-10)


def test_trajectory_channels():
    sc = short()
    tr = integrate(sc)
    np.testing.assert_allclose(tr["e"], tr["y"] - tr["v1"], atol=1e-15)
    assert tr.block("vt", 4).shape == (len(tr.times), 4)
    assert len(tr.times) <= 200_000


def test_trajectory_rejects_bad_times():
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), {"e": np.zeros(2)})


def test_error_view_zero_at_steady_state():
    sc = build_scenario()
    ss = steady_state(sc)
    t = np.linspace(0, 24, 50)
    z, v, th, vp = ss.z_ss(t), ss.v_ss(t), ss.theta_ss(t), ss.varpi_ss(t)
    ch = {"z1": z[:, 0], "z2": z[:, 1], "y": v[:, 0], "v1": v[:, 0], "v2": v[:, 1], "pi": vp, "e": 0 * t}
    for i in range(4):
        ch[f"eta{i + 1}"] = th[:, i]
        ch[f"vt{i + 1}"] = np.full(t.size, sc.model.varrho[i])
    ev = error_view(Trajectory(t, ch), ss, -1.0, sc.model.varrho)
    for arr in (ev.zbar, ev.etabar, ev.pibar, ev.varthetabar):
        assert np.max(np.abs(arr)) <= 1e-12


def test_error_view_initial_offset():
    sc = short()
    tr = integrate(sc)
    ss = steady_state(sc)
    ev = error_view(tr, ss, -1.0, sc.model.varrho)
    np.testing.assert_allclose(ev.etabar[0], sc.x0[sc.layout.eta] - ss.theta_ss(0.0), atol=1e-15)
    assert np.all(np.isfinite(ev.pibar))


def test_ultimate_bound_constant_and_decay():
    t = np.linspace(0, 10, 1001)
    assert ultimate_bound(Trajectory(t, {"c": np.full(t.size, -2.5)}), "c") == 2.5
    tr = Trajectory(t, {"d": np.exp(-t)})
    assert ultimate_bound(tr, "d", 0.2) == pytest.approx(math.exp(-8.0))
    with pytest.raises(ValueError):
        ultimate_bound(tr, "d", 1.0)


def test_step_size_gate_default_scenario():
    """Halving dt changes e by less than 1% RMS at omega = 200."""
    sc = build_scenario()
    fine = replace(sc, dt=sc.step / 2, record_stride=2 * 64)
    coarse = replace(sc, record_stride=64)
    a, b = integrate(coarse), integrate(fine)
    np.testing.assert_allclose(a.times, b.times, atol=1e-9)
    rms = math.sqrt(np.mean((a["e"] - b["e"]) ** 2) / np.mean(b["e"] ** 2))
    assert rms < 0.01, rms


def test_integrate_diverges_with_bad_gains():
    sc = short(T=50.0, alpha=1e4, k=10.0, omega=50.0)
    with pytest.raises(IntegrationDiverged):
        integrate(sc)

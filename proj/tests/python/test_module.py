import math

import numpy as np
import pytest

import pinnfp

TOY = {
    "system": "toy",
    "params": {"y0": 0.5, "T": 2.0},
    "network": {"hidden": [8, 8], "activation": "tanh"},
    "epochs": 40,
    "n_f": 16,
    "seed": 3,
}


def test_toy_analytic_closed_form():
    assert pinnfp.toy_analytic(0.5, 1.0) == pytest.approx((1 + 3 * math.exp(-2)) ** -0.5, abs=1e-14)
    t = np.linspace(0.0, 5.0, 11)
    y = pinnfp.toy_analytic(-0.2, t)
    assert y.shape == t.shape
    assert y[0] == pytest.approx(-0.2)
    assert np.all(np.diff(y) < 0)


def test_pendulum_reference_conserves_energy():
    ref = pinnfp.pendulum_reference(math.radians(100), 0.0, 7.5, 1e-3)
    e = np.array([pinnfp.pendulum_energy(a, b) for a, b in zip(ref["y"], ref["ydot"])])
    assert len(ref["t"]) == 7501
    assert np.max(np.abs(e - e[0])) <= 1e-8 * abs(e[0])


def test_allen_cahn_reference_shape():
    ref = pinnfp.allen_cahn_reference(nx=128, dt=1e-4, T=0.05, snapshot_dt=0.01)
    assert ref["u"].shape == (len(ref["t"]), len(ref["x"]))
    assert ref["u"][0, 0] == pytest.approx(-1.0)
    assert np.all(np.abs(ref["u"]) <= 1.05)


def test_input_derivatives_match_finite_differences():
    theta = pinnfp.init_params(TOY)
    d = pinnfp.input_derivatives(TOY, theta, [0.7], [(), (0,), (0, 0)])
    assert d.shape == (3, 1)
    h = 1e-5
    f = lambda t: pinnfp.input_derivatives(TOY, theta, [t], [()])[0, 0]
    assert d[1, 0] == pytest.approx((f(0.7 + h) - f(0.7 - h)) / (2 * h), rel=1e-6)
    assert d[2, 0] == pytest.approx((f(0.7 + h) - 2 * f(0.7) + f(0.7 - h)) / h**2, rel=1e-3)


def test_physics_loss_gradient():
    theta = pinnfp.init_params(TOY)
    pts = np.linspace(0.0, 2.0, 9).reshape(-1, 1)
    loss, grad = pinnfp.physics_loss(TOY, theta, pts)
    assert loss > 0
    rng = np.random.default_rng(0)
    for k in rng.choice(len(theta), 5, replace=False):
        e = np.zeros_like(theta)
        e[k] = 1e-6
        fd = (pinnfp.physics_loss(TOY, theta + e, pts)[0] - pinnfp.physics_loss(TOY, theta - e, pts)[0]) / 2e-6
        assert grad[k] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_constant_network_at_fixed_point_has_zero_residual():
    theta = np.zeros_like(pinnfp.init_params(TOY))
    theta[-1] = 1.0  # output bias
    loss, grad = pinnfp.physics_loss(TOY, theta, np.linspace(0, 2, 17).reshape(-1, 1))
    assert loss == 0.0
    assert np.linalg.norm(grad) <= 1e-12


def test_train_is_deterministic_and_evaluates():
    a = pinnfp.train(TOY)
    b = pinnfp.train(TOY)
    assert a["losses"].shape == (40, 3)
    assert np.array_equal(a["losses"], b["losses"])
    assert sorted(a["checkpoints"]) == [0, 20, 40]
    out = pinnfp.evaluate(TOY, a["final_params"], threshold=0.15)
    assert out["class"] in {"success", "unstable-fp"}
    assert out["l2"] >= 0


def test_loss_landscape_grid():
    rng = np.random.default_rng(2)
    t0 = pinnfp.init_params(TOY)
    mid, fin = (t0 + 0.1 * rng.standard_normal(t0.size) for _ in range(2))
    grid = pinnfp.loss_landscape(TOY, t0, mid, fin, T=2.0, resolution=5, n_col=32, seed=1)
    assert grid["values"].shape == (5, 5)
    assert np.all(np.isfinite(grid["values"]))
    assert grid["markers"][0] == (0.0, 0.0)
    again = pinnfp.loss_landscape(TOY, t0, mid, fin, T=2.0, resolution=5, n_col=32, seed=1, threads=3)
    assert np.array_equal(grid["values"], again["values"])
    with pytest.raises(pinnfp.DegenerateDirectionError):
        pinnfp.loss_landscape(TOY, t0, mid, t0 + 2 * (mid - t0), T=2.0, resolution=5)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        pinnfp.train({**TOY, "epochs": 0})
    with pytest.raises(pinnfp.ConfigError):
        pinnfp.train({**TOY, "bogus": 1})
    with pytest.raises(pinnfp.UndefinedError):
        pinnfp.l2_relative_error(np.ones(3), np.zeros(3))

"""Smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import graphflow as gf


def triangle():
    return gf.build_graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])


def test_graph_basics():
    g = triangle()
    assert g.n == 3
    assert g.m == 3
    assert np.allclose(g.degrees(), [2.0, 2.0, 2.0])
    assert g.connected()


def test_invalid_edges_raise():
    with pytest.raises(gf.GraphflowError):
        gf.build_graph(2, [(0, 0, 1.0)])
    with pytest.raises(gf.GraphflowError):
        gf.build_graph(2, [(0, 1, -2.0)])


def test_normalized_laplacian():
    lap = gf.normalized_laplacian(triangle())
    expected = np.eye(3) - (np.ones((3, 3)) - np.eye(3)) / 2.0
    assert np.allclose(lap, expected, atol=1e-14)


def test_gradient_and_laplacian_identity():
    g = gf.build_graph(2, [(0, 1, 1.0)])
    f = np.array([[1.0], [0.0]])
    grad = gf.gradient(g, f)
    assert grad[0, 0] == pytest.approx(-1.0)
    assert grad[1, 0] == pytest.approx(1.0)
    lap = gf.laplacian_apply(g, f)
    assert np.allclose(lap, gf.normalized_laplacian(g) @ f, atol=1e-12)


def test_heat_integration_matches_closed_form():
    g = gf.build_graph(2, [(0, 1, 1.0)])
    z0 = np.array([[1.0], [0.0]])
    z = gf.integrate(g, z0, flow="heat", method="dopri5",
                     rtol=1e-8, atol=1e-10)
    decay = math.exp(-2.0)
    assert z[0, 0] == pytest.approx(0.5 * (1 + decay), abs=1e-6)
    assert z[1, 0] == pytest.approx(0.5 * (1 - decay), abs=1e-6)
    exact = gf.linear_exact(gf.normalized_laplacian(g), z0, 1.0)
    assert np.allclose(z, exact, atol=1e-6)


def test_attention_rows_are_stochastic():
    g = triangle()
    z = np.zeros((3, 4))
    params = gf.make_attention_params(4, key_dim=8, heads=2, seed=3)
    a = gf.attention_weights(g, z, params)
    assert np.allclose(a.sum(axis=1), 1.0, atol=1e-10)
    assert np.allclose(a[a > 0], 0.5)


def test_spectral_normalize():
    m = np.diag([3.0, 1.0])
    normalized = gf.spectral_normalize(m)
    assert np.linalg.svd(normalized, compute_uv=False)[0] == pytest.approx(
        1.0, abs=1e-3)


def test_sbm_and_attacks():
    g, z, labels = gf.generate_sbm(sizes=[40, 40], p_in=0.15, p_out=0.02,
                                   feature_dim=8, seed=5)
    assert g.n == 80
    assert len(labels) == 80
    split = gf.degree_split(g, seed=5)
    assert len(split["easy"]) == 8

    flipped = gf.flip_edges(g, budget_edges=10, seed=6)
    assert flipped.n == g.n

    pg, pz = gf.inject_nodes(g, z, budget_nodes=2, budget_edges=6, seed=7)
    assert pg.n == 82
    assert np.array_equal(pz[:80], z)


def test_stability_slope():
    g, _, _ = gf.generate_sbm(sizes=[30, 30], p_in=0.2, p_out=0.05,
                              feature_dim=4, seed=9)
    report = gf.stability_slope(g, [1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
                                trials=3, seed=10)
    assert 0.8 <= report["slope"] <= 1.2
    assert report["r_squared"] >= 0.95


def test_lyapunov_check():
    g = triangle()
    params = gf.make_attention_params(2, seed=11)
    record = gf.lyapunov_check(g, np.zeros((3, 2)), params, "attention_heat")
    assert record["stable"]
    assert record["max_real_part"] == pytest.approx(0.0, abs=1e-10)


def test_run_experiment_deterministic():
    config = {
        "data": {"blocks": 2, "sizes": [30, 30], "p_in": 0.2, "p_out": 0.03,
                 "feature_dim": 6, "separation": 1.2, "noise_sigma": 0.6},
        "stack": {"widths": [6], "heads": 1, "key_dim": 4},
        "flows": [{"kind": "heat"}],
        "solver": {"method": "rk4", "step": 0.1},
        "attacks": [{"name": "noop", "kind": "edge_flip", "budget_edges": 0}],
        "seeds": [1, 2],
    }
    a = gf.run_experiment(json.dumps(config))
    b = gf.run_experiment(json.dumps(config))
    assert a == b
    report = json.loads(a)
    clean = report["aggregate"]["accuracy_mean"]["heat"]
    assert clean["noop"] == clean["clean"]

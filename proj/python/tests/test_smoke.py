import os

import numpy as np
import pytest

import lambdarep as lr


def config(name):
    return os.path.join(lr.default_config_dir(), name + ".json")


def test_solver_matches_exact_and_sr():
    rng = np.random.default_rng(0)
    P = rng.dirichlet(np.ones(5), size=5)
    decay = rng.uniform(size=5)
    out = lr.solve_lambda_r(P, 0.9, decay, tol=1e-12)
    np.testing.assert_allclose(out["phi"], lr.exact_lambda_r(P, 0.9, decay), atol=1e-9)
    assert out["iterations"] == len(out["residuals"])
    sr = np.linalg.inv(np.eye(5) - 0.9 * P)
    np.testing.assert_allclose(lr.exact_lambda_r(P, 0.9, np.ones(5)), sr, atol=1e-10)
    np.testing.assert_allclose(lr.successor_representation(P, 0.9), sr, atol=1e-10)


def test_closed_form_self_loop():
    out = lr.solve_lambda_r(np.ones((1, 1)), 0.9, np.array([0.5]), tol=1e-13)
    assert out["phi"][0, 0] == pytest.approx(lr.closed_form("self_loop", 0.9, 0.5))


def test_environment_and_monte_carlo():
    env = lr.load_environment(config("toy"))
    assert env.mdp.n_states == 3
    assert env.goal_states == [0, 2]
    P = lr.policy_matrix(env.mdp)
    exact = lr.exact_lambda_r(P, env.mdp.gamma, np.full(3, 0.5))
    mean, se, bias = lr.mc_lambda_r(env.mdp, np.full(3, 0.5), 1, 4000, seed=3)
    assert np.all(np.abs(mean - exact[1]) <= 5 * se + bias + 1e-12)


def test_learning_is_seeded():
    env = lr.load_environment(config("toy"))
    a, phi_a = lr.q_lambda_learning(env, 0.5, episodes=40, seed=2)
    b, phi_b = lr.q_lambda_learning(env, 0.5, episodes=40, seed=2)
    assert a == b
    np.testing.assert_array_equal(phi_a, phi_b)
    assert phi_a.shape == (3 * env.mdp.n_actions, 3)


def test_gpi_returns_keys():
    env = lr.load_environment(config("toy"))
    res = lr.gpi_returns(env, [0.0, 1.0], episodes=3, repetitions=1)
    assert sorted(res) == [0.0, 1.0]
    assert all(len(v) == 3 for v in res.values())


def test_decay_estimate_and_errors():
    assert lr.estimate_decay([(4.0, 2.0), (2.0, 1.0)]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        lr.load_environment("/nonexistent/env.json")
    with pytest.raises(ValueError):
        lr.exact_lambda_r(np.eye(3), 0.9, np.ones(2))


def test_acceptance_subset_and_cli(tmp_path):
    results = lr.run_acceptance(only=[1, 11])
    assert [r["id"] for r in results] == [1, 11]
    assert all(r["passed"] for r in results)
    code, out, err = lr.run_cli(["eval", "--env", config("toy"), "--lambda", "0.5", "--out", str(tmp_path)])
    assert code == 0, err
    assert (tmp_path / "values.csv").exists()
    assert lr.run_cli(["eval"])[0] == 2

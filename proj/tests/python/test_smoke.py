import json
import math

import pytest

import tailgate


def test_characteristic_function():
    assert tailgate.sas_characteristic(1.5, 1.0, 0.0) == 1.0
    assert tailgate.sas_characteristic(2.0, 1.0, 1.0) == pytest.approx(math.exp(-1.0))
    assert tailgate.sas_characteristic(1.0, 2.0, 0.5) == pytest.approx(math.exp(-1.0))


def test_sampler_is_seeded():
    a = tailgate.sample_sas(1.5, n=1000, seed=3)
    assert a == tailgate.sample_sas(1.5, n=1000, seed=3)
    assert a != tailgate.sample_sas(1.5, n=1000, seed=4)
    cauchy = sorted(tailgate.sample_sas(1.0, n=100001, seed=1))
    assert abs(cauchy[50000]) < 0.02


def test_estimator():
    assert tailgate.hill_alpha([1.0, 1.0, 1.0, 1.0], k1=2, k2=2) == 1.0
    assert tailgate.block_sums([1.0, 2.0, 3.0, 4.0], 2, 2) == [3.0, 7.0]
    assert tailgate.block_sums([[1, 0], [0, 1], [2, 2], [-1, 0]], 2, 2) == [[1, 1], [1, 2]]
    xs = tailgate.sample_sas(1.5, n=10000, seed=9)
    assert abs(tailgate.hill_alpha(xs, 100, 100) - 1.5) < 0.15
    with pytest.raises(tailgate.ZeroNormError):
        tailgate.hill_alpha([1.0, 0.0, 1.0, 1.0], 2, 2)
    with pytest.raises(tailgate.NonPositiveEstimateError):
        tailgate.hill_alpha([1.0, -0.5, 1.0, -0.5], 2, 2)
    with pytest.raises(tailgate.Error):
        tailgate.hill_alpha([1.0, 2.0], 1, 2)


def test_stability_check():
    xs = tailgate.sample_sas(2.0, n=100000, seed=2)
    stat, groups = tailgate.stability_ks_statistic(xs, 4, 2.0, seed=1)
    assert groups == 12500
    assert stat < tailgate.ks_critical_value(0.01, groups, groups)
    wrong, _ = tailgate.stability_ks_statistic(xs, 4, 1.0, seed=1)
    assert wrong > 0.1


def test_gradients():
    assert tailgate.alg1_gradient([1, 0], [[1, 0], [0, 1]], [1, 1]) == [0.0, -0.5]
    assert tailgate.sgd_gradient([-1, 0], [[1, 0]], [1]) == [0.0, 0.0]
    assert tailgate.alg1_gradient([-1, 0], [[1, 0]], [1]) == [-2.0, 0.0]
    assert tailgate.sgd_gradient([1, 0], [[2, 0]], [0]) == [4.0, 0.0]
    assert tailgate.relu(-3.0) == 0.0


def test_training_converges():
    w_star = tailgate.sample_sas(2.0, n=20, seed=5)
    w_init = tailgate.sample_sas(2.0, n=20, seed=6)
    out = tailgate.train_realizable(w_star, w_init, eta=0.02, batch=8, iters=4000,
                                    variant="alg1", seed=1)
    assert out["recovery_error_trace"][-1][1] < 1e-6
    assert out["recovery_error_trace"][0][0] == 0
    with pytest.raises(tailgate.DivergenceError):
        tailgate.train_realizable(w_star, w_init, eta=50.0, batch=2, iters=4000)


def test_ensemble_and_experiment(tmp_path):
    r = tailgate.realizable_ensemble(dim=10, eta=0.02, batch=8, k1=3, k2=3, iters=3000,
                                     tail_window=300, seed=4)
    assert r["n_used"] == 9 and len(r["per_run_norms"]) == 9
    assert r["convergence"] < 1e-5

    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"dims": 10, "batch": [2, 4], "eta": 0.02, "k1": 2, "k2": 2,
                               "iters": 3000, "tail_window": 300}))
    spec = json.loads(tailgate.parse_config(str(cfg), "realizable-sweep"))
    assert spec["axis"] == "batch" and spec["k1"] == 2
    out = tailgate.run_experiment(str(cfg), "realizable-sweep", seed=3,
                                  out=str(tmp_path / "o.csv"))
    lines = open(out).read().splitlines()
    assert len(lines) == 3 and lines[0].startswith("axis,alpha,")

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"k1": 1}))
    with pytest.raises(tailgate.ConfigError, match="k1"):
        tailgate.parse_config(str(bad), "realizable-sweep")

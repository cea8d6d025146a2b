import json

import pytest

import mixsim


def test_tv_distance_known_value():
    assert mixsim.tv_distance([0.9, 0.1], [0.2, 0.8]) == pytest.approx(0.7, abs=1e-15)


def test_alpha_exact_corners():
    product = [[0.06, 0.14], [0.24, 0.56]]
    assert mixsim.alpha_exact(product) == pytest.approx(0.0, abs=1e-12)
    diagonal = [[0.5, 0.0], [0.0, 0.5]]
    assert mixsim.alpha_exact(diagonal) == pytest.approx(0.25, abs=1e-15)


def test_alpha_markov_exact_value():
    p = [[0.9, 0.1], [0.2, 0.8]]
    pi = mixsim.stationary(p)
    assert pi == pytest.approx([2 / 3, 1 / 3], abs=1e-12)
    assert mixsim.alpha_markov_exact(pi, p, 1) == pytest.approx(7 / 45, abs=1e-12)
    assert mixsim.dobrushin_coefficient(p) == pytest.approx(0.7, abs=1e-15)


def test_doeblin_reconstruction():
    p = [[0.9, 0.1], [0.2, 0.8]]
    parts = mixsim.doeblin_decompose(p)
    assert parts["eta"] == pytest.approx(0.3, abs=1e-15)
    assert parts["eta"] == pytest.approx(mixsim.max_minorization_mass(p), abs=1e-15)
    assert parts["nu_defined"] and parts["residual_used"]
    for i in range(2):
        for j in range(2):
            rebuilt = parts["eta"] * parts["nu"][j] + (1 - parts["eta"]) * parts["residual"][i][j]
            assert rebuilt == pytest.approx(p[i][j], abs=1e-12)


def test_decay_sequence_tail_sums():
    d = mixsim.DecaySequence.geometric(0.5, 0.5, first_index=1)
    assert d.at(1) == pytest.approx(0.25, abs=1e-15)
    assert d.tail_sum_from(1) == pytest.approx(0.5, abs=1e-15)
    bare = mixsim.DecaySequence.from_values([0.3, 0.2], tail="none", first_index=0)
    assert not bare.summable()
    with pytest.raises(Exception):
        bare.tail_sum_from(0)


def test_omega_frozen_value():
    a = mixsim.DecaySequence.from_values([0.5], tail="zero", first_index=1)
    b = mixsim.DecaySequence.geometric(0.5, 0.5, first_index=1)
    got = mixsim.omega_value(3, a, b)
    assert got["value"] == pytest.approx(0.40625, abs=1e-15)
    assert got["p"] == 1


def test_thm1_deterministic_closed_form():
    alpha = mixsim.DecaySequence.zeros(first_index=0)
    got = mixsim.thm1_bound(12, 4, 2, 0.5, alpha, deterministic_eta=True)
    expect = 2 * mixsim.geometric_block_sum(8, 2, 0.5)
    assert got["raw"] == pytest.approx(expect, rel=1e-12)
    assert got["bound"] == min(got["raw"], 0.25)
    assert got["tail_remainder"] >= 0


def test_bstar_constant_failure_probability():
    b = mixsim.DecaySequence.from_values([0.4] * 40, tail="none", first_index=0)
    seq = mixsim.bstar_sequence(b, 10)
    assert seq == pytest.approx([0.4] * 10, abs=1e-14)


def test_poisson_coupling_helpers():
    assert mixsim.poisson_inv_cdf(1.0, 0.5) == 1
    assert mixsim.poisson_coupling_distance(1.0, 2.0) == pytest.approx(1.0, abs=1e-10)


def test_catalog_and_run_experiment(tmp_path):
    names = [e["name"] for e in mixsim.experiments()]
    assert "doeblin-reconstruction" in names
    assert "determinism" in names
    report = mixsim.run_experiment("doeblin-reconstruction", str(tmp_path / "out"))
    assert report["all_pass"]
    assert report["experiment"] == "doeblin-reconstruction"
    assert any(v["name"] == "reconstruction_identity" for v in report["verdicts"])
    assert (tmp_path / "out" / "report.json").exists()
    assert (tmp_path / "out" / "reconstruction.csv").exists()


def test_run_config_deterministic(tmp_path):
    config = json.dumps(
        {
            "experiment": "bounds_curve",
            "theorem": "thm1",
            "n_from": 4,
            "n_to": 10,
            "r": "schedule",
            "m": 1,
            "rho": 0.4,
            "alpha": {"type": "geometric", "coef": 0.1, "ratio": 0.3},
            "cap": 64,
        }
    )
    first = mixsim.run_config(config, str(tmp_path / "a"))
    second = mixsim.run_config(config, str(tmp_path / "b"))
    assert first["all_pass"] and second["all_pass"]
    assert first["config_hash"] == second["config_hash"]
    bytes_a = (tmp_path / "a" / "bounds.csv").read_bytes()
    bytes_b = (tmp_path / "b" / "bounds.csv").read_bytes()
    assert bytes_a == bytes_b


def test_config_errors_are_value_errors(tmp_path):
    with pytest.raises(ValueError, match="line"):
        mixsim.run_config("{not json", str(tmp_path / "bad"))
    with pytest.raises(ValueError, match="unknown experiment"):
        mixsim.run_experiment("no-such-experiment", str(tmp_path / "missing"))

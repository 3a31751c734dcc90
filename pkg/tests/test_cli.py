"""Experiment runner: determinism, config handling, exit codes."""

import copy
import json

import pytest

from paulisq.cli import (
    ExperimentConfig,
    build_parser,
    config_from_args,
    distribution_from_descriptor,
    grid_step,
    main,
    noise_from_descriptor,
    run_experiment,
)
from paulisq.oracle import BoundedChannelNoise, ClassificationNoise, NoNoise
from paulisq.pconcept import HaarSingleQubitProduct, UniformParity, UniformPauli


def strip_meta(report):
    out = copy.deepcopy(report)
    out.pop("meta")
    return out


def test_config_round_trip():
    config = ExperimentConfig(
        experiment="learn-product", n=3, epsilon=0.25, seed=11, trials=2,
        noise={"kind": "classification", "eta": 0.1},
    )
    assert ExperimentConfig.from_dict(json.loads(json.dumps(config.to_dict()))) == config


def test_unknown_fields_rejected():
    with pytest.raises(ValueError, match="unknown config fields"):
        ExperimentConfig.from_dict({"experiment": "lpn", "bogus": 1})
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n": 2})


def test_descriptor_parsing():
    assert distribution_from_descriptor({"kind": "uniform_pauli", "n": 2}) == UniformPauli(2)
    assert distribution_from_descriptor({"kind": "uniform_parity", "n": 3}) == UniformParity(3)
    assert distribution_from_descriptor({"kind": "haar_product", "n": 1}) == HaarSingleQubitProduct(1)
    d = distribution_from_descriptor({"kind": "finite", "items": [["+Z", 0.5], ["-Z", 0.5]]})
    assert sum(w for _, w in d.items) == 1.0
    assert isinstance(noise_from_descriptor(None), NoNoise)
    assert noise_from_descriptor({"kind": "classification", "eta": 0.2}) == ClassificationNoise(0.2)
    bounded = noise_from_descriptor({"kind": "bounded_channel", "eta": 0.01})
    assert isinstance(bounded, BoundedChannelNoise)
    assert bounded.eta_diamond == pytest.approx(0.02)
    with pytest.raises(ValueError):
        noise_from_descriptor({"kind": "mystery", "eta": 0.0})


def test_grid_step_properties():
    assert grid_step(0.01, 0.0) == 1.0
    for epsilon in (0.25, 0.01):
        for eta in (0.1, 0.5, 0.9):
            delta = grid_step(epsilon, eta)
            steps = round(eta / delta)
            assert steps * delta == pytest.approx(eta)  # grid lands on eta_upper
            assert delta <= (epsilon**0.5) * (1 - eta) / 2 + 1e-12


def test_learn_product_determinism_across_runs_and_jobs():
    config = ExperimentConfig(experiment="learn-product", n=2, epsilon=0.25, seed=7, trials=4)
    first = run_experiment(config)
    second = run_experiment(config)
    assert strip_meta(first) == strip_meta(second)
    parallel = run_experiment(
        ExperimentConfig(experiment="learn-product", n=2, epsilon=0.25, seed=7, trials=4, jobs=2)
    )
    first_body = strip_meta(first)
    parallel_body = strip_meta(parallel)
    first_body["config"].pop("jobs")
    parallel_body["config"].pop("jobs")
    assert first_body == parallel_body


def test_lpn_determinism():
    config = ExperimentConfig(experiment="lpn", n=10, lpn_eta=0.1, lpn_m=300, seed=3, trials=5)
    assert strip_meta(run_experiment(config)) == strip_meta(run_experiment(config))


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["noise-demo", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    capsys.readouterr()


def test_cli_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"n": 2, "trials": 3, "epsilon": 0.25, "seed": 1}))
    code = main(["learn-product", "--config", str(cfg), "--seed", "2"])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["config"]["seed"] == 2  # flag overrides file
    assert report["config"]["trials"] == 3


def test_cli_parser_reads_noise_flags():
    args = build_parser().parse_args(
        ["learn-product", "--n", "2", "--noise", "classification", "--eta", "0.25"]
    )
    config = config_from_args(args)
    assert config.noise == {"kind": "classification", "eta": 0.25}


def test_sda_command_reports_exact_rationals():
    report = run_experiment(ExperimentConfig(experiment="sda", n=1, seed=0))
    assert report["passed"]
    assert report["results"]["average_correlation"] == {"num": 1, "den": 4}
    assert report["results"]["pairwise_bound"]["sda_value"] == {"num": 6, "den": 1}


def test_verify_lemmas_small_run():
    report = run_experiment(
        ExperimentConfig(experiment="verify-lemmas", n=1, seed=5, samples=50_000)
    )
    assert report["passed"]
    assert report["results"]["stabilizer_count"] == 6


def test_lpn_near_boundary_records_spectrum_without_recovery_claim():
    report = run_experiment(
        ExperimentConfig(experiment="lpn", n=8, lpn_eta=0.49, lpn_m=600, seed=4, trials=5)
    )
    assert report["passed"]  # only the bijection is asserted near the boundary
    names = [a["name"] for a in report["assertions"]]
    assert "secret_recovery_rate" not in names
    assert all("disagreement_rate" in row for row in report["results"]["trials"])


def test_learn_product_with_known_depolarizing_rate():
    report = run_experiment(
        ExperimentConfig(
            experiment="learn-product",
            n=2,
            epsilon=0.01,
            seed=6,
            trials=3,
            noise={"kind": "depolarizing", "eta": 0.5},
        )
    )
    assert report["passed"]
    assert report["results"]["max_loss"] <= 0.01


def test_learn_product_with_bounded_channel():
    report = run_experiment(
        ExperimentConfig(
            experiment="learn-product",
            n=2,
            epsilon=0.25,
            seed=6,
            trials=3,
            noise={"kind": "bounded_channel", "eta": 0.005},
        )
    )
    assert report["passed"]


def test_noise_demo_custom_distribution():
    report = run_experiment(
        ExperimentConfig(
            experiment="noise-demo",
            seed=2,
            distribution={"kind": "uniform_parity", "n": 2},
        )
    )
    assert report["passed"]
    assert "custom_distribution_round_trip_gap" in report["results"]


def test_lpn_instance_file_round_trip(tmp_path):
    import json as _json

    from paulisq.learners import generate_lpn_instance, lpn_instance_to_json
    from paulisq.streams import substream

    instance = generate_lpn_instance(10, 50, 0.0, substream(12, "fixture"))
    path = tmp_path / "instance.json"
    path.write_text(_json.dumps(lpn_instance_to_json(instance)))
    report = run_experiment(
        ExperimentConfig(experiment="lpn", lpn_file=str(path), seed=0, trials=1)
    )
    assert report["passed"]
    assert report["results"]["recovered"] == 1

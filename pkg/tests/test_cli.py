"""CLI: config validation, run/aggregate/metrics/capacity/memsim/cluster."""

import csv
import json

import numpy as np
import pytest

from polylife.cli import (
    ExperimentConfig,
    block_scores,
    main,
    max_workers,
    summarize_log,
)
from polylife.exceptions import ConfigurationError
from polylife.reuse import RunLog

TABLE_1A = """n_policies,lifetime_average
1,71.8
2,118.8
4,156.2
9,161.5
14,155.8
27,147.9
"""


def write_config(tmp_path, **overrides):
    cfg = {
        "domain": "cartpole27",
        "learner": "uniform-random",
        "n_policies": 1,
        "selector": "unadaptive",
        "n_sequences": 1,
        "block_length": 3,
        "block_unit": "episodes",
        "blocks_per_sequence": 2,
        "seed": 11,
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


class TestConfig:
    def test_unknown_keys_rejected(self, tmp_path):
        path = write_config(tmp_path, typo_key=1)
        with pytest.raises(ConfigurationError, match="typo_key"):
            ExperimentConfig.from_json(path)

    def test_missing_keys_rejected(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"domain": "cartpole27"}))
        with pytest.raises(ConfigurationError, match="missing"):
            ExperimentConfig.from_json(path)

    def test_domain_learner_compatibility(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_json(write_config(tmp_path, learner="drqn"))
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_json(
                write_config(tmp_path, domain="pocman18", learner="dqn")
            )

    def test_policy_count_bounded_by_tasks(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_json(write_config(tmp_path, n_policies=28))

    def test_block_unit_defaults(self, tmp_path):
        cfg = ExperimentConfig.from_json(write_config(tmp_path))
        assert cfg.block_unit == "episodes"  # explicit in fixture
        cfg2 = ExperimentConfig(
            domain="pocman18", learner="uniform-random", n_policies=1,
            selector="adaptive", n_sequences=1, block_length=2,
            blocks_per_sequence=1, seed=0,
        )
        assert cfg2.block_unit == "episodes"
        assert cfg2.time_unit == "episodes"

    def test_condition_names(self, tmp_path):
        cfg = ExperimentConfig.from_json(
            write_config(tmp_path, learner="dqn", n_policies=9, selector="unadaptive")
        )
        assert cfg.condition_name() == "UnadaptiveDQN9P"


class TestRunCommand:
    def test_episode_rows_per_block_at_paper_scale(self, tmp_path):
        # 60,000-step blocks guarantee at least 300 episodes per block
        config = write_config(
            tmp_path, block_unit="steps", block_length=60_000, blocks_per_sequence=2
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        log = RunLog.from_csv(out / "seq_000.csv")
        assert len(log.rows) >= 600
        for block in (0, 1):
            assert sum(1 for r in log.rows if r.block_idx == block) >= 300

    def test_same_seed_identical_csv(self, tmp_path):
        config = write_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--config", str(config), "--out", str(out_a)]) == 0
        assert main(["run", "--config", str(config), "--out", str(out_b)]) == 0
        assert (out_a / "seq_000.csv").read_text() == (out_b / "seq_000.csv").read_text()

    def test_one_to_one_policy_ids(self, tmp_path):
        config = write_config(tmp_path, n_policies=27, blocks_per_sequence=3)
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        log = RunLog.from_csv(out / "seq_000.csv")
        assert all(r.policy_id == r.task_idx for r in log.rows)

    def test_summary_matches_recomputation_from_csv(self, tmp_path):
        config = write_config(tmp_path, blocks_per_sequence=4)
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        log = RunLog.from_csv(out / "seq_000.csv")
        recomputed = summarize_log(log, "block_mean_return")
        assert abs(summary["per_sequence"][0]["lifetime_average"]
                   - recomputed["lifetime_average"]) < 1e-9

    def test_parallel_sequences(self, tmp_path):
        config = write_config(tmp_path, n_sequences=2)
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "seq_000.csv").exists()
        assert (out / "seq_001.csv").exists()

    def test_invalid_config_exit_code(self, tmp_path):
        config = write_config(tmp_path, learner="nonsense")
        assert main(["run", "--config", str(config), "--out", str(tmp_path / "x")]) == 2

    def test_replay_variant_wiring(self, tmp_path):
        config = write_config(
            tmp_path, learner="dqn", replay_variant="gdm-reservoir",
            learner_overrides={"hidden": 8, "replay_start": 10**9},
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        assert (out / "seq_000.csv").exists()
        # variants are meaningless for the policy-gradient learner
        bad = write_config(tmp_path, learner="ppo", replay_variant="gdm-reservoir")
        assert main(["run", "--config", str(bad), "--out", str(tmp_path / "y")]) == 2

    def test_spread_csv_written_when_enabled(self, tmp_path):
        config = write_config(
            tmp_path, learner="dqn", n_policies=2, selector="adaptive",
            blocks_per_sequence=2, spread_every=1,
            learner_overrides={"hidden": 8, "replay_start": 10**9},
        )
        out = tmp_path / "out"
        assert main(["run", "--config", str(config), "--out", str(out)]) == 0
        with (out / "spread.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2
        assert all(0.0 <= float(r["spread"]) <= 1.0 for r in rows)


class TestAggregate:
    def _write_run(self, out, rows):
        out.mkdir(parents=True, exist_ok=True)
        with (out / "seq_000.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["seq_id", "block_idx", "episode_idx", "task_idx",
                             "policy_id", "return", "steps"])
            writer.writerows(rows)

    def test_hand_computed_windows(self, tmp_path):
        run = tmp_path / "run"
        rows = []
        # block 0: returns 10, 20 -> score 15; block 1: 30 -> 30; block 2: 50 -> 50
        for block, returns in enumerate(([10, 20], [30], [50])):
            for ep, ret in enumerate(returns):
                rows.append([0, block, ep, 0, 0, float(ret), 10])
        self._write_run(run, rows)
        assert main(["aggregate", "--in", str(run), "--window", "2"]) == 0
        with (run / "curve.csv").open() as fh:
            got = list(csv.DictReader(fh))
        assert float(got[0]["mean"]) == pytest.approx((15 + 30) / 2)
        assert float(got[1]["mean"]) == pytest.approx(50.0)
        assert float(got[0]["stderr"]) == 0.0  # single sequence
        assert got[0]["n"] == "1"

    def test_constant_returns_flat_curve(self, tmp_path):
        run = tmp_path / "run"
        rows = [[0, b, 0, 0, 0, 42.0, 10] for b in range(6)]
        self._write_run(run, rows)
        main(["aggregate", "--in", str(run), "--window", "3"])
        with (run / "curve.csv").open() as fh:
            means = [float(r["mean"]) for r in csv.DictReader(fh)]
        assert means == [42.0, 42.0]


class TestCapacityCommand:
    def test_published_table(self, tmp_path, capsys):
        table = tmp_path / "table.csv"
        table.write_text(TABLE_1A)
        assert main(["capacity", "--table", str(table), "--ntau", "27"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["n_pi_star"] == 4
        assert out["c_emp"] == pytest.approx(6.75)
        assert out["itc"] == pytest.approx(18.7, abs=0.2)

    def test_missing_reference_row(self, tmp_path):
        table = tmp_path / "table.csv"
        table.write_text("n_policies,lifetime_average\n1,10.0\n")
        assert main(["capacity", "--table", str(table), "--ntau", "27"]) == 2


class TestMemsimCommand:
    def test_writes_csv_and_reports_peak(self, tmp_path, capsys):
        out = tmp_path / "mem.csv"
        code = main([
            "memsim", "--ntau", "50", "--capacity", "5", "--tc", "2",
            "--accept", "0.5", "--blocks", "200", "--runs", "5",
            "--out", str(out),
        ])
        assert code == 0
        blob = json.loads(capsys.readouterr().out)
        assert blob["baseline"] == 10
        assert blob["peak_mean_total"] > 0
        assert out.exists()


class TestClusterCommand:
    def test_small_scale_run(self, tmp_path, capsys):
        out = tmp_path / "points.csv"
        code = main([
            "cluster", "--domain", "cartpole27", "--steps", "4000",
            "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        blob = json.loads(capsys.readouterr().out)
        assert blob["clusters"] >= 1
        assert blob["capacity_estimate"] == pytest.approx(27 / blob["clusters"], abs=1e-3)
        with out.open() as fh:
            assert len(list(csv.DictReader(fh))) == 27


def test_max_workers_env_cap(monkeypatch):
    monkeypatch.setenv("POLYLIFE_THREADS", "1")
    assert max_workers(8) == 1
    monkeypatch.delenv("POLYLIFE_THREADS")
    assert max_workers(1) == 1


def test_block_scores_per_step_mode():
    from polylife.reuse import EpisodeRecord

    log = RunLog(sequence_id=0)
    log.append(EpisodeRecord(0, 0, 0, 2, 0, 5.0, 100))
    log.append(EpisodeRecord(0, 0, 1, 2, 0, 7.0, 100))
    assert block_scores(log, "per_step_reward") == [pytest.approx(0.06)]
    assert block_scores(log, "block_mean_return") == [pytest.approx(6.0)]

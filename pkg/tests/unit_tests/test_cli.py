"""
Unit tests for the relkd command line.
"""

import pandas as pd
import pytest

from relkd.exceptions import TrainingAbortedError
from relkd.harness.cli import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, main


class TestCli:
    """Exit codes and outputs of each verb."""

    def test_validate(self, tiny_config, capsys):
        assert main(["validate", "--config", str(tiny_config)]) == EXIT_OK
        assert "tiny" in capsys.readouterr().out

    def test_missing_config(self, tmp_path):
        assert main(["validate", "--config", str(tmp_path / "absent.yaml")]) == EXIT_CONFIG

    def test_unknown_key(self, tiny_config):
        assert main(["validate", "--config", str(tiny_config), "--set", "rmd.gamma=1"]) == EXIT_CONFIG

    def test_bad_threads_env(self, tiny_config, monkeypatch):
        monkeypatch.setenv("RELKD_THREADS", "many")
        assert main(["validate", "--config", str(tiny_config)]) == EXIT_CONFIG

    def test_train_writes_artifacts(self, tiny_config, tmp_path):
        out = tmp_path / "cli-out"
        assert main(["train", "--config", str(tiny_config), "--out", str(out), "--seeds", "0"]) == EXIT_OK
        results = pd.read_csv(out / "tiny" / "results.csv")
        assert len(results) == 1
        for name in ("teacher.npz", "task.npz", "history.csv"):
            assert (out / "tiny" / "seed0" / name).exists()

    def test_sweep_k_dedupes(self, tiny_config, tmp_path):
        out = tmp_path / "sweep"
        code = main(["sweep-k", "--config", str(tiny_config), "--out", str(out), "--seeds", "0", "--k", "0,0.5,0.5"])
        assert code == EXIT_OK
        pivot = pd.read_csv(out / "tiny-sweep" / "k_pivot.csv")
        assert list(pivot["K"]) == [0.0, 0.5]

    def test_dump_embeddings_after_train(self, tiny_config, tmp_path):
        out = tmp_path / "emb"
        base = ["--config", str(tiny_config), "--out", str(out), "--seeds", "0"]
        assert main(["train", *base]) == EXIT_OK
        assert main(["dump-embeddings", *base, "--split", "test", "--classes", "0,2"]) == EXIT_OK
        df = pd.read_csv(out / "tiny" / "embeddings_student_test_seed0.csv")
        assert set(df["clean_label"]) <= {0, 2}
        assert df["corrupted"].sum() == 0

    def test_dump_teacher_embeddings(self, tiny_config, tmp_path):
        out = tmp_path / "emb"
        base = ["--config", str(tiny_config), "--out", str(out), "--seeds", "0"]
        assert main(["pretrain", *base]) == EXIT_OK
        assert main(["dump-embeddings", *base, "--channel", "teacher"]) == EXIT_OK
        df = pd.read_csv(out / "tiny" / "embeddings_teacher_train_seed0.csv")
        assert len(df) == 96
        assert [c for c in df.columns if c.startswith("z")] == ["z0", "z1", "z2", "z3"]

    def test_report(self, tiny_config, tmp_path):
        out = tmp_path / "rep"
        assert main(["train", "--config", str(tiny_config), "--out", str(out)]) == EXIT_OK
        assert main(["report", "--out", str(out)]) == EXIT_OK
        assert (out / "report.csv").exists()

    def test_report_without_results(self, tmp_path):
        assert main(["report", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_training_abort_exit_code(self, tiny_config, mocker):
        mocker.patch(
            "relkd.runner.RelkdRunner.run_experiment",
            side_effect=TrainingAbortedError("non-finite training loss", epoch=0, batch=0),
        )
        assert main(["train", "--config", str(tiny_config)]) == EXIT_ABORT

    def test_sweep_requires_k(self, tiny_config):
        with pytest.raises(SystemExit):
            main(["sweep-k", "--config", str(tiny_config)])

    def test_pretrain_saves_teachers(self, tiny_config, tmp_path, capsys):
        out = tmp_path / "pre"
        assert main(["pretrain", "--config", str(tiny_config), "--out", str(out)]) == EXIT_OK
        assert (out / "tiny" / "seed0" / "teacher.npz").exists()
        assert (out / "tiny" / "seed1" / "teacher.npz").exists()

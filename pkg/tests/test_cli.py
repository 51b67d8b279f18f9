import csv
import json
import math

import numpy as np
import pytest

from qadapt import protocol
from qadapt.cli import main
from qadapt.harness import CSV_COLUMNS


def run_cli(args, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("QRL_THREADS", raising=False)
    return main(args)


def usage_error_code(args, tmp_path, monkeypatch):
    with pytest.raises(SystemExit) as info:
        run_cli(args, tmp_path, monkeypatch)
    return info.value.code


SMALL_RUN = [
    "run", "--env", "haar-qubit", "--epsilon", "0.5",
    "--trials", "5", "--iterations", "50", "--seed", "7", "--out", "out.csv",
]


class TestRun:
    def test_row_count_per_epsilon(self, tmp_path, monkeypatch):
        assert run_cli(SMALL_RUN, tmp_path, monkeypatch) == 0
        with open(tmp_path / "out.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 51  # one epsilon: iterations 0..50
        assert all(row["epsilon"] == "0.5" for row in rows)
        assert list(rows[0]) == list(CSV_COLUMNS)

    def test_metadata_twin_written_for_csv(self, tmp_path, monkeypatch):
        run_cli(SMALL_RUN, tmp_path, monkeypatch)
        with open(tmp_path / "out.json") as fh:
            payload = json.load(fh)
        assert payload["config"]["master_seed"] == 7
        assert payload["config"]["delta_init"] == pytest.approx(4 * math.pi, rel=1e-11)
        assert "version" in payload

    def test_zero_n_configuration(self, tmp_path, monkeypatch):
        code = run_cli(
            ["run", "--env", "zero-n", "--dim", "11", "--n", "10", "--epsilon", "0.5",
             "--trials", "2", "--iterations", "5", "--out", "zn.csv"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        assert (tmp_path / "zn.csv").exists()

    def test_coherent_dim_mismatch_rejected(self, tmp_path, monkeypatch):
        code = usage_error_code(
            ["run", "--env", "coherent", "--dim", "12", "--trials", "2",
             "--iterations", "2", "--out", "c.csv"],
            tmp_path, monkeypatch,
        )
        assert code == 2

    def test_coherent_custom_cutoff_accepted(self, tmp_path, monkeypatch):
        code = run_cli(
            ["run", "--env", "coherent", "--dim", "12", "--cutoff", "11", "--epsilon", "0.5",
             "--trials", "2", "--iterations", "3", "--out", "c.csv"],
            tmp_path, monkeypatch,
        )
        assert code == 0

    def test_n_flag_only_for_zero_n(self, tmp_path, monkeypatch):
        code = usage_error_code(
            ["run", "--env", "haar-qubit", "--n", "3", "--trials", "2",
             "--iterations", "2", "--out", "x.csv"],
            tmp_path, monkeypatch,
        )
        assert code == 2

    def test_epsilon_out_of_range_rejected(self, tmp_path, monkeypatch):
        code = usage_error_code(
            ["run", "--env", "haar-qubit", "--epsilon", "1.5", "--trials", "2",
             "--iterations", "2", "--out", "x.csv"],
            tmp_path, monkeypatch,
        )
        assert code == 2

    def test_alpha_flags_must_pair(self, tmp_path, monkeypatch):
        code = usage_error_code(
            ["run", "--env", "coherent", "--alpha-re", "0.5", "--trials", "2",
             "--iterations", "2", "--out", "x.csv"],
            tmp_path, monkeypatch,
        )
        assert code == 2

    def test_refuses_overwrite_without_force(self, tmp_path, monkeypatch):
        assert run_cli(SMALL_RUN, tmp_path, monkeypatch) == 0
        assert run_cli(SMALL_RUN, tmp_path, monkeypatch) == 1
        assert run_cli(SMALL_RUN + ["--force"], tmp_path, monkeypatch) == 0

    def test_dump_trials(self, tmp_path, monkeypatch):
        run_cli(SMALL_RUN + ["--dump-trials", "--force"], tmp_path, monkeypatch)
        lines = (tmp_path / "out.trials.csv").read_text().splitlines()
        assert len(lines) == 1 + 5 * 50

    def test_json_format_only(self, tmp_path, monkeypatch):
        code = run_cli(
            ["run", "--env", "haar-qubit", "--epsilon", "0.5", "--trials", "2",
             "--iterations", "2", "--format", "json", "--out", "only.json"],
            tmp_path, monkeypatch,
        )
        assert code == 0
        assert (tmp_path / "only.json").exists()
        assert not (tmp_path / "only.csv").exists()

    def test_threads_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv("QRL_THREADS", "2")
        assert main(SMALL_RUN) == 0


class TestReproduce:
    def test_smoke_run_writes_both_formats(self, tmp_path, monkeypatch):
        code = run_cli(["reproduce", "fig3", "--trials", "4", "--seed", "1"], tmp_path, monkeypatch)
        assert code == 0
        assert (tmp_path / "fig3.csv").exists()
        assert (tmp_path / "fig3.json").exists()
        with open(tmp_path / "fig3.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5 * 101  # five epsilons, iterations 0..100
        assert {row["epsilon"] for row in rows} == {"0.1", "0.3", "0.5", "0.7", "0.9"}

    def test_byte_identical_reruns(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        assert main(["reproduce", "fig3", "--trials", "4", "--seed", "1", "--out", "a/fig3"]) == 0
        assert main(["reproduce", "fig3", "--trials", "4", "--seed", "1", "--out", "b/fig3"]) == 0
        assert (tmp_path / "a/fig3.csv").read_bytes() == (tmp_path / "b/fig3.csv").read_bytes()
        assert (tmp_path / "a/fig3.json").read_bytes() == (tmp_path / "b/fig3.json").read_bytes()

    def test_worker_count_invariance(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        args = ["reproduce", "fig6b", "--trials", "6", "--seed", "3"]
        assert main(args + ["--out", "t1", "--threads", "1"]) == 0
        assert main(args + ["--out", "t2", "--threads", "2"]) == 0
        assert (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()

    def test_preset_dimension(self, tmp_path, monkeypatch):
        run_cli(["reproduce", "fig4", "--trials", "2", "--seed", "1"], tmp_path, monkeypatch)
        with open(tmp_path / "fig4.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["dim"] == "11"
        assert rows[-1]["iteration"] == "400"

    def test_unknown_figure_rejected(self, tmp_path, monkeypatch):
        assert usage_error_code(["reproduce", "fig7"], tmp_path, monkeypatch) == 2


class TestVerify:
    def test_passes_on_correct_build(self, tmp_path, monkeypatch, capsys):
        assert run_cli(["verify", "--seeds", "6"], tmp_path, monkeypatch) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_custom_case_count(self, tmp_path, monkeypatch, capsys):
        assert run_cli(["verify", "--seeds", "3"], tmp_path, monkeypatch) == 0
        assert "checks passed" in capsys.readouterr().out

    def test_injected_bug_fails(self, tmp_path, monkeypatch, capsys):
        real_run_trial = protocol.run_trial

        def skewed(env, params, n_iters, seed, env_label="", copy_budget=None):
            result = real_run_trial(env, params, n_iters, seed, env_label, copy_budget)
            for rec in result.records:
                rec.fidelity_after = min(1.0, rec.fidelity_after + 1e-6)
            return result

        monkeypatch.setattr(protocol, "run_trial", skewed)
        assert run_cli(["verify", "--seeds", "4"], tmp_path, monkeypatch) == 1
        assert "FAIL" in capsys.readouterr().out


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    assert "2000" in text
    assert "(0.1, 0.3, 0.5, 0.7, 0.9)" in text
    assert "4*pi" in text

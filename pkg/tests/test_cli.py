import json

import numpy as np
import pytest

import localrank as lr
from localrank.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def swiss_csv(tmp_path):
    path = tmp_path / "swiss.csv"
    assert run("generate", "--kind", "swiss-roll", "--n", 200, "--seed", 7,
               "--output", path) == 0
    return path


class TestGenerate:
    def test_writes_matrix(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        assert run("generate", "--kind", "swiss-roll", "--n", 50, "--seed", 3,
                   "--output", out) == 0
        assert lr.read_matrix(out).shape == (50, 3)
        printed = capsys.readouterr().out
        assert "n=50" in printed and "p=3" in printed and "seed=3" in printed

    def test_deterministic_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            run("generate", "--kind", "s-curve", "--n", 40, "--seed", 5, "--output", out)
        assert a.read_bytes() == b.read_bytes()

    def test_n_too_small_is_validation_error(self, tmp_path):
        code = run("generate", "--kind", "swiss-roll", "--n", 5,
                   "--output", tmp_path / "x.csv")
        assert code == 2

    def test_sidecar_outputs(self, tmp_path):
        run("generate", "--kind", "noisy-flat", "--n", 30, "--ambient-dim", 6,
            "--latent-dim", 2, "--output", tmp_path / "x.csv",
            "--latent-output", tmp_path / "lat.csv",
            "--colors-output", tmp_path / "col.csv")
        assert lr.read_matrix(tmp_path / "lat.csv").shape == (30, 2)
        assert lr.read_matrix(tmp_path / "col.csv").shape == (30, 1)

    def test_binary_format(self, tmp_path):
        out = tmp_path / "x.bin"
        run("generate", "--kind", "swiss-roll", "--n", 40, "--output", out,
            "--format", "binary")
        assert lr.read_matrix(out).shape == (40, 3)


class TestReduce:
    def test_pca_embedding(self, swiss_csv, tmp_path):
        out = tmp_path / "emb.csv"
        assert run("reduce", "--input", swiss_csv, "--method", "pca", "--q", 2,
                   "--output", out) == 0
        assert lr.read_matrix(out).shape == (200, 2)

    def test_disconnected_graph_exit_code(self, tmp_path, capsys):
        x = tmp_path / "x.csv"
        far = np.vstack([np.random.default_rng(0).normal(0, 0.1, (10, 2)),
                         np.random.default_rng(1).normal(0, 0.1, (10, 2)) + 50.0])
        lr.write_matrix(x, far)
        code = run("reduce", "--input", x, "--method", "isomap", "--q", 1, "--k", 2,
                   "--output", tmp_path / "emb.csv")
        assert code == 4
        assert "disconnected" in capsys.readouterr().err

    def test_ltsa_prints_adjustment_note(self, swiss_csv, tmp_path, capsys):
        assert run("reduce", "--input", swiss_csv, "--method", "ltsa", "--q", 2,
                   "--k", 8, "--output", tmp_path / "emb.csv") == 0
        assert "--adjusted" in capsys.readouterr().out

    def test_missing_file_is_format_error(self, tmp_path):
        code = run("reduce", "--input", tmp_path / "nope.csv", "--method", "pca",
                   "--q", 2, "--output", tmp_path / "emb.csv")
        assert code == 3


class TestEvaluate:
    def test_identity_scores_one(self, swiss_csv, tmp_path, capsys):
        assert run("evaluate", "--input", swiss_csv, "--embedding", swiss_csv,
                   "--j", 6) == 0
        printed = capsys.readouterr().out
        assert printed.count("1.000") == 4

    def test_report_json(self, swiss_csv, tmp_path):
        report = tmp_path / "report.json"
        run("evaluate", "--input", swiss_csv, "--embedding", swiss_csv,
            "--j", 4, "--output", report, "--format", "json")
        payload = json.loads(report.read_text())
        assert payload["schema_version"] == 1
        assert payload["J"] == 4
        assert payload["scores"]["rho_I"] == 1.0

    def test_report_csv_per_case(self, swiss_csv, tmp_path):
        report = tmp_path / "report.csv"
        run("evaluate", "--input", swiss_csv, "--embedding", swiss_csv,
            "--j", 4, "--per-case", "--output", report)
        lines = report.read_text().strip().splitlines()
        assert lines[0] == "measure,J,adjusted,value"
        assert len(lines) == 1 + 4 + 1 + 200  # scores, per-case header, 200 cases

    def test_row_mismatch_exit_code(self, swiss_csv, tmp_path):
        small = tmp_path / "small.csv"
        lr.write_matrix(small, np.ones((10, 2)))
        code = run("evaluate", "--input", swiss_csv, "--embedding", small, "--j", 4)
        assert code == 2

    def test_single_measure_flag(self, swiss_csv, capsys):
        run("evaluate", "--input", swiss_csv, "--embedding", swiss_csv,
            "--j", 4, "--measure", "tau-o")
        printed = capsys.readouterr().out
        assert "tau_O" in printed and "rho_I" not in printed


class TestSweep:
    def test_j_sweep_identity(self, swiss_csv, tmp_path, capsys):
        curve_file = tmp_path / "curve.csv"
        assert run("sweep", "--kind", "j", "--input", swiss_csv,
                   "--embedding", swiss_csv, "--j-min", 2, "--j-max", 8,
                   "--output", curve_file) == 0
        assert "selected J=8" in capsys.readouterr().out
        lines = curve_file.read_text().strip().splitlines()
        assert lines[0] == "parameter,rho_I,rho_O,tau_I,tau_O"
        assert len(lines) == 8

    def test_dim_sweep_selects_true_q(self, tmp_path, capsys):
        x = tmp_path / "flat.csv"
        run("generate", "--kind", "noisy-flat", "--n", 150, "--ambient-dim", 8,
            "--latent-dim", 3, "--seed", 2, "--output", x)
        assert run("sweep", "--kind", "dim", "--input", x, "--method", "pca",
                   "--q-min", 1, "--q-max", 5) == 0
        assert "selected q=3" in capsys.readouterr().out

    def test_k_sweep_json_output(self, tmp_path):
        x = tmp_path / "x.csv"
        run("generate", "--kind", "s-curve", "--n", 120, "--seed", 4, "--output", x)
        out = tmp_path / "curve.json"
        assert run("sweep", "--kind", "k", "--input", x, "--method", "isomap",
                   "--q", 2, "--k-min", 5, "--k-max", 8, "--j", 4,
                   "--output", out, "--format", "json") == 0
        payload = json.loads(out.read_text())
        assert payload["grid"] == [5, 6, 7, 8]
        assert "selection" in payload

    def test_j_sweep_requires_embedding(self, swiss_csv):
        code = run("sweep", "--kind", "j", "--input", swiss_csv,
                   "--j-min", 2, "--j-max", 5)
        assert code == 2

    def test_threads_flag_reproducible(self, swiss_csv, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("evaluate", "--input", swiss_csv, "--embedding", swiss_csv, "--j", 5,
            "--output", a, "--format", "json", "--threads", 1)
        run("evaluate", "--input", swiss_csv, "--embedding", swiss_csv, "--j", 5,
            "--output", b, "--format", "json", "--threads", 2)
        assert a.read_bytes() == b.read_bytes()

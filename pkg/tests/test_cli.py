import json

import numpy as np
import pytest

from sparsefs import Dataset, generate_synthetic, save_csv
from sparsefs.cli import main


@pytest.fixture(scope="module")
def dataset_csv(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    dataset, _ = generate_synthetic(
        d=12, n=45, class_count=3, true_support_size=3, noise_sigma=0.1, seed=3
    )
    path = root / "synthetic.csv"
    save_csv(dataset, path)
    return str(path)


@pytest.fixture(scope="module")
def small_csv(tmp_path_factory):
    root = tmp_path_factory.mktemp("small")
    dataset, _ = generate_synthetic(
        d=6, n=30, class_count=2, true_support_size=2, noise_sigma=0.1, seed=4
    )
    path = root / "small.csv"
    save_csv(dataset, path)
    return str(path)


def read(path):
    with open(path, "rb") as handle:
        return handle.read()


class TestSynth:
    def test_writes_dataset_and_record(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "synth", "--d", "8", "--samples", "24", "--classes", "2",
            "--sparsity", "2", "--sigma", "0.1", "--seed", "7",
            "--out", str(out),
        ])
        assert code == 0
        record = json.loads((out / "record.json").read_text())
        assert record["schema_version"] == 1
        assert len(record["outputs"]["planted_support"]) == 2
        assert (out / "dataset.csv").exists()

    def test_missing_required_option(self, tmp_path, capsys):
        code = main(["synth", "--out", str(tmp_path / "x")])
        assert code == 1
        assert "missing required" in capsys.readouterr().err


class TestSolve:
    def test_path_summary_and_trace(self, dataset_csv, tmp_path):
        out = tmp_path / "solve"
        code = main([
            "solve", "--data", dataset_csv, "--algorithm", "ahiht",
            "--steps", "12", "--seed", "0", "--out", str(out),
        ])
        assert code == 0
        path_lines = (out / "path.csv").read_text().strip().split("\n")
        assert path_lines[0] == "lambda,support_size,objective,inner_iterations,final_L"
        assert len(path_lines) == 13
        trace_lines = (out / "trace.csv").read_text().strip().split("\n")
        assert trace_lines[0] == "iteration,objective"
        objectives = [float(line.split(",")[1]) for line in trace_lines[1:]]
        for a, b in zip(objectives, objectives[1:]):
            assert b <= a + 1e-10 * max(1.0, abs(a))
        record = json.loads((out / "record.json").read_text())
        assert len(record["outputs"]["points"]) == 12

    def test_l21_solve(self, small_csv, tmp_path):
        out = tmp_path / "l21"
        code = main([
            "solve", "--data", small_csv, "--algorithm", "l21",
            "--lambda", "0.3", "--out", str(out),
        ])
        assert code == 0
        record = json.loads((out / "record.json").read_text())
        assert "zero_rows" in record["outputs"]
        assert (out / "ranking.csv").exists()

    def test_l21_without_lambda_is_usage_error(self, small_csv, tmp_path):
        code = main([
            "solve", "--data", small_csv, "--algorithm", "l21",
            "--out", str(tmp_path / "x"),
        ])
        assert code == 1

    def test_unknown_flag_is_usage_error(self, small_csv, tmp_path, capsys):
        code = main([
            "solve", "--data", small_csv, "--frobnicate", "1",
            "--out", str(tmp_path / "x"),
        ])
        assert code == 1

    def test_bad_data_is_runtime_error(self, tmp_path, capsys):
        missing = str(tmp_path / "missing.csv")
        code = main(["solve", "--data", missing, "--out", str(tmp_path / "x")])
        assert code == 2

    def test_config_file_with_flag_override(self, small_csv, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"data = {small_csv}\nalgorithm = hiht\nsteps = 5\nseed = 1\n"
        )
        out = tmp_path / "cfgout"
        code = main([
            "solve", "--config", str(cfg), "--steps", "7", "--out", str(out),
        ])
        assert code == 0
        record = json.loads((out / "record.json").read_text())
        assert record["config"]["steps"] == 7  # flag wins
        assert len(record["outputs"]["points"]) == 7

    def test_unknown_config_key(self, small_csv, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("wibble = 3\n")
        code = main([
            "solve", "--config", str(cfg), "--data", small_csv,
            "--out", str(tmp_path / "x"),
        ])
        assert code == 1
        assert "valid keys" in capsys.readouterr().err


class TestPathSelect:
    def test_select_reuses_stored_path(self, dataset_csv, tmp_path):
        out = tmp_path / "path"
        assert main([
            "path", "--data", dataset_csv, "--algorithm", "hiht",
            "--steps", "14", "--out", str(out),
        ]) == 0
        assert (out / "supports.csv").exists()
        sel_out = tmp_path / "sel"
        assert main([
            "select", "--record", str(out / "record.json"),
            "--target", "3", "--out", str(sel_out),
        ]) == 0
        lines = (sel_out / "selected.csv").read_text().strip().split("\n")
        assert lines[0] == "feature"
        chosen = [int(v) for v in lines[1:]]
        assert chosen == sorted(chosen)
        record = json.loads((sel_out / "record.json").read_text())
        assert record["outputs"]["support_size"] == len(chosen)

    def test_path_rejects_l21(self, dataset_csv, tmp_path):
        code = main([
            "path", "--data", dataset_csv, "--algorithm", "l21",
            "--out", str(tmp_path / "x"),
        ])
        assert code == 1


class TestEvaluate:
    def test_curves_per_classifier(self, small_csv, tmp_path):
        out = tmp_path / "eval"
        code = main([
            "evaluate", "--data", small_csv, "--algorithm", "ahiht",
            "--features", "2,4", "--trials", "2", "--seed", "0",
            "--steps", "10", "--classifier", "both", "--out", str(out),
        ])
        assert code == 0
        for clf in ("knn", "softmax"):
            lines = (out / f"curve_{clf}.csv").read_text().strip().split("\n")
            assert lines[0] == "count,accuracy"
            assert len(lines) == 3
        record = json.loads((out / "record.json").read_text())
        assert record["outputs"]["report"]["seeds"] == [0, 1]


class TestOracleCheck:
    def test_gap_table(self, small_csv, tmp_path):
        out = tmp_path / "oracle"
        code = main([
            "oracle-check", "--data", small_csv, "--steps", "10",
            "--epsilon", "1e-12", "--out", str(out),
        ])
        assert code == 0
        lines = (out / "gaps.csv").read_text().strip().split("\n")
        assert lines[0] == "lambda,solver_objective,oracle_objective,relative_gap"
        assert len(lines) == 11
        for line in lines[1:]:
            gap = float(line.split(",")[3])
            assert gap >= -1e-9


class TestCompare:
    def test_emits_traces_curves_timings(self, small_csv, tmp_path):
        out = tmp_path / "cmp"
        code = main([
            "compare", "--data", small_csv, "--features", "2,4",
            "--trials", "2", "--steps", "8", "--classifier", "knn",
            "--lambda-grid", "0.1", "--out", str(out),
        ])
        assert code == 0
        for name in (
            "trace_hiht.csv", "trace_ahiht.csv", "timings.csv",
            "curve_hiht_knn.csv", "curve_ahiht_knn.csv",
            "curve_l21_knn.csv", "curve_baseline_knn.csv",
        ):
            assert (out / name).exists(), name
        timing_lines = (out / "timings.csv").read_text().strip().split("\n")
        assert timing_lines[0] == "method,seconds"
        assert [line.split(",")[0] for line in timing_lines[1:]] == [
            "hiht", "ahiht", "l21", "baseline",
        ]


class TestDeterminism:
    def test_solve_reruns_byte_identical(self, dataset_csv, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = [
            "solve", "--data", dataset_csv, "--algorithm", "hiht",
            "--steps", "10", "--seed", "3",
        ]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        for name in ("path.csv", "trace.csv"):
            assert read(out_a / name) == read(out_b / name)

    def test_evaluate_reruns_byte_identical(self, small_csv, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = [
            "evaluate", "--data", small_csv, "--features", "2,4",
            "--trials", "2", "--seed", "5", "--steps", "8",
            "--classifier", "knn",
        ]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert read(out_a / "curve_knn.csv") == read(out_b / "curve_knn.csv")

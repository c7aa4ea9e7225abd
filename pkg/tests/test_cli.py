"""Tests for CSV loading, configuration merging, and the CLI commands."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import helstrom.cli as cli
from helstrom.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_VERIFY,
    RunConfig,
    load_csv,
    main,
)
from helstrom.errors import (
    EmptyClassError,
    MissingLabelColumnError,
    MoreThanTwoClassesError,
    ParseError,
    TooFewSamplesError,
)
from helstrom.oracle import VerificationReport


def write_csv(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


BASIC = """a,b,label
1.0,0.0,x
0.8,0.6,x
0.0,1.0,y
0.6,0.8,y
"""


class TestLoadCsv:
    def test_basic_two_class_file(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        config = RunConfig(dataset_path=path, label_column="label")
        dataset, stats, table = load_csv(path, config)
        assert dataset.m_a == 2 and dataset.m_b == 2
        assert table.label_values == ("x", "y")  # lexicographic when unspecified
        assert table.feature_columns == ("a", "b")
        assert stats.n_attributes == 2
        assert table.row_ids.tolist() == [1, 2, 3, 4]
        assert table.encoded_row_ids.tolist() == [1, 2, 3, 4]

    def test_label_column_position_irrelevant(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "label,a,b\nx,1.0,0.0\ny,0.0,1.0\nx,0.8,0.6\ny,0.6,0.8\n")
        config = RunConfig(dataset_path=path, label_column="label")
        dataset, _, table = load_csv(path, config)
        assert dataset.m_a == 2 and dataset.m_b == 2
        assert table.feature_columns == ("a", "b")
        np.testing.assert_allclose(dataset.class0[0].amplitudes, [1.0, 0.0])

    def test_three_classes_need_a_pair(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,label\n1.0,x\n2.0,y\n3.0,z\n")
        with pytest.raises(MoreThanTwoClassesError):
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))

    def test_class_pair_selects_and_orders(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,label\n1.0,0.0,x\n0.0,1.0,y\n1.0,1.0,z\n")
        config = RunConfig(dataset_path=path, label_column="label",
                           class_pair=("y", "x"))
        dataset, _, table = load_csv(path, config)
        assert table.label_values == ("y", "x")
        assert dataset.m_a == 1 and dataset.m_b == 1
        # the z row is dropped entirely
        assert table.row_ids.tolist() == [1, 2]
        np.testing.assert_allclose(dataset.class0[0].amplitudes, [0.0, 1.0])

    def test_positive_flag_reorders_pair(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        config = RunConfig(dataset_path=path, label_column="label",
                           class_pair=("x", "y"), positive_class_value="y")
        _, _, table = load_csv(path, config)
        assert table.label_values == ("y", "x")

    def test_positive_flag_alone_picks_class0(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        config = RunConfig(dataset_path=path, label_column="label",
                           positive_class_value="y")
        _, _, table = load_csv(path, config)
        assert table.label_values == ("y", "x")

    def test_positive_value_absent_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        config = RunConfig(dataset_path=path, label_column="label",
                           positive_class_value="zzz")
        with pytest.raises(EmptyClassError):
            load_csv(path, config)

    def test_positive_outside_pair_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        config = RunConfig(dataset_path=path, label_column="label",
                           class_pair=("x", "y"), positive_class_value="zzz")
        with pytest.raises(EmptyClassError):
            load_csv(path, config)

    def test_unparseable_cell_reports_row_and_column(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,label\n1.0,0.0,x\n1.0,abc,y\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))
        assert "row 2" in str(err.value)
        assert "'b'" in str(err.value)

    def test_ragged_row_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,label\n1.0,0.0,x\n1.0,y\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))
        assert "row 2" in str(err.value)

    def test_missing_label_column(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        with pytest.raises(MissingLabelColumnError):
            load_csv(path, RunConfig(dataset_path=path, label_column="target"))
        with pytest.raises(MissingLabelColumnError):
            load_csv(path, RunConfig(dataset_path=path))

    def test_empty_label_cell_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,label\n1.0,x\n2.0,\n3.0,y\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))
        assert "row 2" in str(err.value)

    def test_zero_norm_row_rejected_with_row_number(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,label\n1.0,0.0,x\n0.0,0.0,y\n0.0,1.0,y\n")
        with pytest.raises(ParseError) as err:
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))
        assert "row 2" in str(err.value)

    def test_missing_cells_stay_raw_but_are_not_encoded(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,label\n1.0,0.0,x\n?,0.5,x\n0.0,1.0,y\n0.5,NA,y\n")
        dataset, _, table = load_csv(
            path, RunConfig(dataset_path=path, label_column="label"))
        assert table.features.shape == (4, 2)
        assert np.isnan(table.features[1, 0])
        assert np.isnan(table.features[3, 1])
        assert dataset.m_a == 1 and dataset.m_b == 1
        assert table.unencoded_row_ids == (2, 4)
        assert table.encoded_row_ids.tolist() == [1, 3]

    def test_header_only_file_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "a,label\n")
        with pytest.raises(EmptyClassError):
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))

    def test_empty_file_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "")
        with pytest.raises(ParseError):
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))

    def test_blank_lines_skipped(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,label\n1.0,0.0,x\n\n0.0,1.0,y\n")
        dataset, _, _ = load_csv(
            path, RunConfig(dataset_path=path, label_column="label"))
        assert dataset.size == 2

    def test_categorical_columns_resolved_to_indices(self, tmp_path):
        path = write_csv(tmp_path / "d.csv",
                         "a,b,c,label\n1.0,0.0,2.0,x\n0.0,1.0,3.0,y\n")
        config = RunConfig(dataset_path=path, label_column="label",
                           categorical_columns=("c",))
        _, stats, table = load_csv(path, config)
        assert table.categorical_indices == (2,)
        assert stats.categorical == frozenset({2})

    def test_unknown_categorical_column_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", BASIC)
        config = RunConfig(dataset_path=path, label_column="label",
                           categorical_columns=("nope",))
        with pytest.raises(ParseError):
            load_csv(path, config)

    def test_single_class_rejected(self, tmp_path):
        path = write_csv(tmp_path / "d.csv", "a,label\n1.0,x\n2.0,x\n")
        with pytest.raises(MoreThanTwoClassesError):
            load_csv(path, RunConfig(dataset_path=path, label_column="label"))


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert config.folds == 5
        assert config.seed == 42
        assert (config.k_min, config.k_max, config.k_step) == (0.25, 100.0, 0.25)
        assert config.output_dir == Path(".")
        assert not config.emit_svg

    def test_invalid_values_rejected(self):
        with pytest.raises(TooFewSamplesError):
            RunConfig(folds=1)
        with pytest.raises(Exception):
            RunConfig(k_min=0.0)
        with pytest.raises(ValueError):
            RunConfig(jobs=0)
        with pytest.raises(ValueError):
            RunConfig(class_pair=("same", "same"))


class TestConfigFile:
    def test_file_values_used_and_flags_win(self, tmp_path, toy_csv, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# comment line\n"
            f"data={toy_csv}\n"
            "label-col=target\n"
            "folds=5\n"
            "k-min=1.0\n"
            "k-max=2.0\n"
            "k-step=1.0\n"
            f"out={tmp_path / 'from_file'}\n",
            encoding="utf-8",
        )
        # file only
        assert main(["sweep", "--config", str(cfg)]) == EXIT_OK
        assert (tmp_path / "from_file" / "sweep.csv").exists()
        # flag overrides the file's out directory
        override = tmp_path / "from_flag"
        assert main(["sweep", "--config", str(cfg), "--out", str(override)]) == EXIT_OK
        assert (override / "sweep.csv").exists()
        file_rows = (tmp_path / "from_file" / "sweep.csv").read_text().splitlines()
        assert len(file_rows) == 3  # header + k=1.0 + k=2.0

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus=1\n", encoding="utf-8")
        assert main(["sweep", "--config", str(cfg)]) == EXIT_INPUT

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just some words\n", encoding="utf-8")
        assert main(["sweep", "--config", str(cfg)]) == EXIT_INPUT


class TestPredictCommand:
    def test_writes_scores_and_records(self, toy_csv, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["predict", "--data", str(toy_csv), "--label-col", "target",
                     "--k", "1.5", "--out", str(out)])
        assert code == EXIT_OK
        lines = (out / "scores.csv").read_text().splitlines()
        assert lines[0] == "row_id,fid_score,hqcs_score,fid_label,hqcs_label"
        assert len(lines) == 71
        ids = [int(line.split(",")[0]) for line in lines[1:]]
        assert ids == sorted(ids)
        record = json.loads((out / "record.json").read_text())
        assert record["schema_version"] == 1
        names = [r["classifier_id"] for r in record["records"]]
        assert names == ["FID", "HQCS"]
        for r in record["records"]:
            assert r["k"] == 1.5
            assert len(r["fold_f1"]) == 5
            assert r["dataset_id"] == "toy"
            # two tight clusters: everything separates perfectly
            assert r["mean_f1"] == 1.0
        stdout = capsys.readouterr().out
        assert "mean F1" in stdout

    def test_rerun_identical_except_duration(self, toy_csv, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            assert main(["predict", "--data", str(toy_csv), "--label-col",
                         "target", "--k", "2.0", "--out", str(out)]) == EXIT_OK
        assert (out_a / "scores.csv").read_bytes() == (out_b / "scores.csv").read_bytes()
        rec_a = json.loads((out_a / "record.json").read_text())
        rec_b = json.loads((out_b / "record.json").read_text())
        for r in rec_a["records"] + rec_b["records"]:
            del r["duration_seconds"]
        assert rec_a == rec_b

    def test_degenerate_duplicate_rows_warn(self, tmp_path, capsys):
        # Axis-aligned rows encode to exactly the same unit vector even at
        # different scales, so the cross-class pair they form is parallel
        # and every fold that trains on both must skip it.
        lines = ["a,b,label"]
        rng = np.random.default_rng(0)
        for i in range(10):
            v = rng.normal([2.0, 0.0], 0.1)
            lines.append(f"{v[0]:.4f},{v[1]:.4f},x")
        for i in range(10):
            v = rng.normal([0.0, 2.0], 0.1)
            lines.append(f"{v[0]:.4f},{v[1]:.4f},y")
        lines.append("2.0,0.0,x")
        lines.append("4.0,0.0,y")
        path = write_csv(tmp_path / "dup.csv", "\n".join(lines) + "\n")
        code = main(["predict", "--data", str(path), "--label-col", "label",
                     "--k", "1.0", "--out", str(tmp_path / "out")])
        assert code == EXIT_OK
        assert "degenerate" in capsys.readouterr().err

    def test_invalid_k_is_input_error(self, toy_csv, tmp_path, capsys):
        code = main(["predict", "--data", str(toy_csv), "--label-col", "target",
                     "--k", "0", "--out", str(tmp_path)])
        assert code == EXIT_INPUT
        assert "error:" in capsys.readouterr().err


class TestSweepCommand:
    def test_writes_sweep_best_and_svg(self, toy_csv, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["sweep", "--data", str(toy_csv), "--label-col", "target",
                     "--k-min", "0.5", "--k-max", "2.0", "--k-step", "0.5",
                     "--svg", "--out", str(out)])
        assert code == EXIT_OK
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0].startswith("k,f1_hqcs_mean,f1_fid_mean,f1_hqcs_fold1")
        assert len(lines) == 5
        best = json.loads((out / "best.json").read_text())
        assert {"best_hqcs", "best_fid", "skipped_pairs_total",
                "schema_version", "dataset_id"} <= set(best)
        svg = (out / "sweep.svg").read_text()
        assert svg.startswith("<?xml")
        stdout = capsys.readouterr().out
        assert "best HQCS" in stdout

    def test_rerun_byte_identical(self, toy_csv, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        for out in (out_a, out_b):
            assert main(["sweep", "--data", str(toy_csv), "--label-col",
                         "target", "--k-min", "1.0", "--k-max", "2.0",
                         "--k-step", "0.5", "--svg", "--out", str(out)]) == EXIT_OK
        for name in ("sweep.csv", "best.json", "sweep.svg"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name

    def test_missing_data_flag_is_input_error(self, capsys):
        assert main(["sweep"]) == EXIT_INPUT
        assert "error:" in capsys.readouterr().err

    def test_missing_file_is_input_error(self, tmp_path, capsys):
        code = main(["sweep", "--data", str(tmp_path / "nope.csv"),
                     "--label-col", "t"])
        assert code == EXIT_INPUT
        assert "no such file" in capsys.readouterr().err


class TestCategorizeCommand:
    def test_writes_profile_and_types(self, toy_csv, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["categorize", "--data", str(toy_csv), "--label-col",
                     "target", "--svg", "--out", str(out)])
        assert code == EXIT_OK
        profile = json.loads((out / "profile.json").read_text())
        assert profile["dataset_id"] == "toy"
        total = (profile["safe_pct"] + profile["borderline_pct"]
                 + profile["rare_pct"] + profile["outlier_pct"])
        assert total == pytest.approx(100.0)
        assert profile["safe_pct"] == 100.0  # two tight clusters
        types = (out / "types.csv").read_text().splitlines()
        assert types[0] == "row_id,point_type"
        assert len(types) == 71
        assert (out / "profile.svg").exists()
        assert "safe 100.0%" in capsys.readouterr().out

    def test_rows_with_missing_cells_are_still_profiled(self, tmp_path):
        lines = ["a,b,label"]
        rng = np.random.default_rng(1)
        for _ in range(8):
            v = rng.normal([2.0, 0.0], 0.1)
            lines.append(f"{v[0]:.4f},{v[1]:.4f},x")
        for _ in range(8):
            v = rng.normal([0.0, 2.0], 0.1)
            lines.append(f"{v[0]:.4f},{v[1]:.4f},y")
        lines.append("?,0.1,x")
        path = write_csv(tmp_path / "m.csv", "\n".join(lines) + "\n")
        out = tmp_path / "out"
        code = main(["categorize", "--data", str(path), "--label-col", "label",
                     "--out", str(out)])
        assert code == EXIT_OK
        types = (out / "types.csv").read_text().splitlines()
        assert len(types) == 18  # header + all 17 rows, missing cell included


class TestVerifyCommand:
    def test_pass_run(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["verify", "--trials", "5", "--seed", "3",
                     "--out", str(out)])
        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        assert "verification: PASS" in stdout
        payload = json.loads((out / "verify.json").read_text())
        assert payload["passed"] is True
        assert payload["trials"] == 5

    def test_failure_exits_3(self, monkeypatch, capsys):
        failing = VerificationReport(
            trials=1, pair_max_deviation=1.0, pairs_all_two_eigenvalues=False,
            hqcs_max_deviation=1.0, fid_max_deviation=1.0,
            failures=("trial 0: synthetic failure",), vacuous=False,
        )
        monkeypatch.setattr(cli, "run_verification", lambda **kwargs: failing)
        code = main(["verify", "--trials", "1"])
        assert code == EXIT_VERIFY
        assert "verification: FAIL" in capsys.readouterr().out

    def test_cap_violation_is_input_error(self, capsys):
        code = main(["verify", "--dims", "8", "--k-max", "10", "--trials", "1"])
        assert code == EXIT_INPUT
        assert "error:" in capsys.readouterr().err

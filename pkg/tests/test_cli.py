"""Command-line behavior: exit codes, formats, and diagnostics."""

import json

import numpy as np
import pytest

from sepsets import ScoreMethod, new_value_table, score_vector, table_to_dict
from sepsets.cli import main

from conftest import TOY_VALUES

TOY_CSV = "data/toy.csv"


@pytest.fixture
def toy_table_file(tmp_path, toy_table):
    path = tmp_path / "toy_table.json"
    path.write_text(json.dumps(table_to_dict(toy_table)))
    return path


@pytest.fixture
def additive_table_file(tmp_path):
    values = [0.0, 1.0, 2.0, 3.0]
    path = tmp_path / "additive.json"
    path.write_text(json.dumps({"n": 2, "values": values}))
    return path


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_scores_json_envelope(capsys, toy_table_file):
    code, out, _ = run(capsys, ["scores", str(toy_table_file)])
    assert code == 0
    payload = json.loads(out)
    assert payload["tool"] == "sepsets"
    assert payload["command"] == "scores"
    assert len(payload["input_sha256"]) == 64
    report = payload["report"]
    assert report["n"] == 3
    assert set(report["methods"]) == {"bivariate", "ablation", "shapley", "mci"}
    assert report["methods"]["mci"]["witness_contexts"] == [0, 0, 1]


def test_scores_output_is_byte_stable_json(capsys, toy_table_file):
    code, out, _ = run(capsys, ["scores", str(toy_table_file)])
    assert code == 0
    assert out == json.dumps(json.loads(out), indent=2, sort_keys=True) + "\n"


def test_cli_scores_match_library(capsys, toy_table_file, toy_table):
    _, out, _ = run(capsys, ["scores", str(toy_table_file)])
    report = json.loads(out)["report"]
    for method in ScoreMethod:
        expected = score_vector(method, toy_table).scores
        assert np.allclose(report["methods"][method.value]["scores"], expected)


def test_scores_from_csv(capsys):
    code, out, _ = run(capsys, ["scores", TOY_CSV, "--target", "y"])
    assert code == 0
    report = json.loads(out)["report"]
    assert report["features"] == ["f0", "f1", "f2"]
    assert np.allclose(report["methods"]["bivariate"]["scores"], [0.5, 0.5, 1 / 3])


def test_scores_csv_requires_target(capsys):
    code, _, err = run(capsys, ["scores", TOY_CSV])
    assert code == 1
    assert "--target" in err


def test_scores_method_selection(capsys, toy_table_file):
    code, out, _ = run(capsys, ["scores", str(toy_table_file), "--method", "mci"])
    assert code == 0
    assert list(json.loads(out)["report"]["methods"]) == ["mci"]


def test_markdown_output(capsys, toy_table_file):
    code, out, _ = run(capsys, ["scores", str(toy_table_file), "--output", "markdown"])
    assert code == 0
    assert out.startswith("# sepsets scores")
    assert "| feature |" in out


def test_malformed_json_gives_coordinates(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "values": [0, 1, 2,]}')
    code, _, err = run(capsys, ["scores", str(bad)])
    assert code == 1
    assert "line 1" in err and "column" in err


def test_unrecognized_payload(capsys, tmp_path):
    mystery = tmp_path / "mystery.json"
    mystery.write_text('{"rows": 3}')
    code, _, err = run(capsys, ["scores", str(mystery)])
    assert code == 1
    assert "unrecognized" in err


def test_wrong_kind_for_command(capsys, tmp_path):
    space = tmp_path / "space.json"
    space.write_text(
        json.dumps({"n": 1, "instances": [{"weight": 1.0, "values": [0.0, 1.0]}]})
    )
    code, _, err = run(capsys, ["scores", str(space)])
    assert code == 1
    assert "space" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, ["scores", str(tmp_path / "absent.json")])
    assert code == 1
    assert "error" in err


def test_audit_exit_codes(capsys, toy_table_file, additive_table_file):
    code, out, _ = run(capsys, ["audit", str(toy_table_file)])
    assert code == 0  # violations alone do not fail the run
    assert json.loads(out)["report"]["violations"]

    code, _, _ = run(capsys, ["audit", str(toy_table_file), "--fail-on-violation"])
    assert code == 3

    code, out, _ = run(capsys, ["audit", str(additive_table_file), "--fail-on-violation"])
    assert code == 0
    assert json.loads(out)["report"]["violations"] == []


def test_audit_report_structure(capsys, toy_table_file):
    _, out, _ = run(capsys, ["audit", str(toy_table_file)])
    report = json.loads(out)["report"]
    checks = {row["check"]: row for row in report["checks"]}
    assert "empty_set_value[table]" in checks
    assert not checks["elimination[table,ablation]"]["passed"]
    assert checks["elimination[table,ablation]"]["witness"]["rhs"] == pytest.approx(0.5)
    assert checks["symmetry[table,mci,z_pair]"]["passed"]


def test_audit_sample_space(capsys, tmp_path):
    space = tmp_path / "space.json"
    space.write_text(
        json.dumps(
            {
                "n": 2,
                "instances": [
                    {"weight": 0.5, "values": [0.0, 0.0, 1.0, 2.0]},
                    {"weight": 0.5, "values": [0.0, 1.0, 1.0, 1.0]},
                ],
            }
        )
    )
    code, out, _ = run(capsys, ["audit", str(space), "--fail-on-violation"])
    assert code == 3
    report = json.loads(out)["report"]
    assert "importance_consistency[mci]" in report["violations"]
    assert "value_consistency[global]" not in report["violations"]


def test_audit_rejects_partition_files(capsys, tmp_path):
    part = tmp_path / "part.json"
    part.write_text(json.dumps({"n": 2, "blocks": [[0], [1]]}))
    code, _, err = run(capsys, ["audit", str(part)])
    assert code == 1
    assert "partition" in err


def test_partition_command(capsys, toy_table_file, tmp_path):
    out_file = tmp_path / "partition.json"
    code, out, _ = run(
        capsys,
        [
            "partition",
            str(toy_table_file),
            "--with-oracle",
            "--partition-out",
            str(out_file),
        ],
    )
    assert code == 0
    report = json.loads(out)["report"]
    assert report["partition"]["blocks"] == [[0, 1], [2]]
    assert report["oracle"]["agrees"] is True
    saved = json.loads(out_file.read_text())
    assert saved["blocks"] == [[0, 1], [2]]
    for entry in report["block_reports"]:
        assert entry["separable"]


def test_partition_oracle_cap(capsys, tmp_path):
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"n": 13, "values": [0.0] * (1 << 13)}))
    code, _, err = run(capsys, ["partition", str(big), "--with-oracle"])
    assert code == 1
    assert "capped" in err


def test_eval_dataset_writes_table(capsys, tmp_path):
    table_out = tmp_path / "table.json"
    code, out, _ = run(
        capsys,
        ["eval-dataset", TOY_CSV, "--target", "y", "--table-out", str(table_out)],
    )
    assert code == 0
    saved = json.loads(table_out.read_text())
    assert saved["n"] == 3
    assert np.allclose(saved["values"], TOY_VALUES, atol=1e-9)
    report = json.loads(out)["report"]
    assert report["features"] == ["f0", "f1", "f2"]
    assert report["rows"] == 3
    assert report["notes"] == []


def test_eval_dataset_notes_weight_normalization(capsys, tmp_path):
    csv_path = tmp_path / "weighted.csv"
    csv_path.write_text("a,y,w\n0.0,1.0,1.0\n1.0,2.0,1.0\n2.0,1.5,2.0\n")
    table_out = tmp_path / "table.json"
    code, out, _ = run(
        capsys,
        [
            "eval-dataset",
            str(csv_path),
            "--target",
            "y",
            "--weight-col",
            "w",
            "--table-out",
            str(table_out),
        ],
    )
    assert code == 0
    report = json.loads(out)["report"]
    assert report["features"] == ["a"]
    assert len(report["notes"]) == 1
    assert "normalized" in report["notes"][0]


def test_csv_cell_diagnostics(capsys, tmp_path):
    csv_path = tmp_path / "broken.csv"
    csv_path.write_text("a,y\n1.0,2.0\noops,3.0\n")
    code, _, err = run(
        capsys,
        ["eval-dataset", str(csv_path), "--target", "y", "--table-out", str(tmp_path / "t.json")],
    )
    assert code == 1
    assert "row 3" in err and "'a'" in err and "oops" in err


def test_csv_missing_target_lists_columns(capsys, tmp_path):
    csv_path = tmp_path / "cols.csv"
    csv_path.write_text("a,b\n1.0,2.0\n")
    code, _, err = run(
        capsys,
        ["eval-dataset", str(csv_path), "--target", "z", "--table-out", str(tmp_path / "t.json")],
    )
    assert code == 1
    assert "'z'" in err and "a" in err


def test_csv_ragged_row(capsys, tmp_path):
    csv_path = tmp_path / "ragged.csv"
    csv_path.write_text("a,y\n1.0,2.0\n3.0\n")
    code, _, err = run(capsys, ["scores", str(csv_path), "--target", "y"])
    assert code == 1
    assert "row 3" in err


def test_demo_commands(capsys):
    for name in ("mci-nonlinearity", "twin-features", "collider", "toy-separable"):
        code, out, _ = run(capsys, ["demo", name])
        assert code == 0
        payload = json.loads(out)
        assert payload["command"] == f"demo {name}"
        assert payload["report"]["claims"]


def test_demo_collider_flags(capsys):
    code, out, _ = run(
        capsys, ["demo", "collider", "--p-cancer-0", "0.1", "--p-cancer-1", "0.6"]
    )
    assert code == 0
    report = json.loads(out)["report"]
    assert report["inputs"]["p_cancer"] == [0.1, 0.6]


def test_demo_markdown(capsys):
    code, out, _ = run(capsys, ["demo", "toy-separable", "--output", "markdown"])
    assert code == 0
    assert out.startswith("# sepsets demo toy-separable")


def test_out_file_matches_stdout(capsys, toy_table_file, tmp_path):
    copy = tmp_path / "report.json"
    code, out, _ = run(capsys, ["scores", str(toy_table_file), "--out", str(copy)])
    assert code == 0
    assert copy.read_text() == out


def test_usage_errors_exit_one(capsys):
    code, _, err = run(capsys, ["scores"])  # missing input path
    assert code == 1
    assert err
    code, _, err = run(capsys, ["partition", TOY_CSV])
    assert code == 1


def test_invalid_tolerance_rejected(capsys, toy_table_file):
    code, _, err = run(capsys, ["scores", str(toy_table_file), "--tol", "-1"])
    assert code == 1
    assert "tolerance" in err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "sepsets" in capsys.readouterr().out


def test_table_cap_respected(capsys, tmp_path):
    wide = tmp_path / "wide.json"
    wide.write_text(json.dumps({"n": 21, "values": [0.0] * (1 << 21)}))
    code, _, err = run(capsys, ["scores", str(wide)])
    assert code == 1
    assert "cap" in err or "ceiling" in err

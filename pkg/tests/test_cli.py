import json
from pathlib import Path

import pytest

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from verlinde.cli import main

SCHEMA = json.loads(
    (Path(__file__).resolve().parents[1] / "src/verlinde/schema/output.schema.json")
    .read_text()
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fuse_minimal_yang_lee(capsys):
    code, out, _ = run(capsys, "fuse", "--theory", "minimal", "--u", "5", "--v", "2",
                       "(2,1)", "(2,1)")
    assert code == 0
    assert out.strip() == "(1,1) + (2,1)"


def test_fuse_sl2_two_standards(capsys):
    code, out, _ = run(capsys, "fuse", "--theory", "sl2", "--u", "3", "--v", "2",
                       "E[l=0;lam=0.31;r=1,s=1]", "E[l=0;lam=0.17;r=1,s=1]")
    assert code == 0
    assert out.count("E[") == 4  # two summands, repeated in the class line


def test_fuse_vacuum_prints_partner(capsys):
    code, out, _ = run(capsys, "fuse", "--theory", "sl2", "--u", "3", "--v", "2",
                       "L[l=0;r=1]", "D+[l=0;r=1,s=1]")
    assert code == 0
    assert "D-[l=2;r=1,s=1]" in out


def test_fuse_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "fuse", "--theory", "minimal", "--u", "5", "--v", "2",
                       "(9,1)", "(2,1)")
    assert code == 2
    assert "window" in err


def test_fuse_unsupported_exit_3_with_classes(capsys):
    code, out, _ = run(capsys, "fuse", "--theory", "sl2", "--u", "3", "--v", "2",
                       "E+[l=0;r=1,s=1]", "E+[l=0;r=2,s=1]")
    assert code == 3
    assert "classes:" in out


def test_fuse_singlet(capsys):
    code, out, _ = run(capsys, "fuse", "--theory", "singlet", "--p", "2",
                       "M[r=2,s=1]", "M[r=2,s=1]")
    assert code == 0
    assert out.strip() == "M[r=3,s=1]"


def test_table_minimal_yang_lee(capsys):
    code, out, _ = run(capsys, "table", "--theory", "minimal", "--u", "5", "--v", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4  # 2x2 label classes
    assert "(2,1) x (2,1) = (1,1) + (2,1)" in lines


def test_table_minimal_ising(capsys):
    code, out, _ = run(capsys, "table", "--theory", "minimal", "--u", "4", "--v", "3",
                       "--r-range", "1:3", "--s-range", "1:2")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 9
    assert "(2,1) x (2,1) = (1,1) + (3,1)" in lines
    assert "(3,1) x (3,1) = (1,1)" in lines


def test_table_empty_window(capsys, tmp_path):
    out_path = tmp_path / "table.csv"
    code, _, _ = run(capsys, "table", "--theory", "sl2", "--u", "3", "--v", "2",
                     "--r-range", "5:4", "--format", "csv", "--no-timestamp",
                     "--output", str(out_path))
    assert code == 0
    body = out_path.read_text()
    assert body.strip().splitlines()[-1] == "x,y,term,coefficient"


def test_verify_minimal_all(capsys):
    code, out, _ = run(capsys, "verify", "--theory", "minimal", "--u", "5", "--v", "2",
                       "all")
    assert code == 0
    assert "all checks passed" in out
    assert out.count("PASS") >= 3


def test_verify_singlet_resolution_limits(capsys):
    code, out, _ = run(capsys, "verify", "--theory", "singlet", "--p", "2",
                       "resolution-limits", "--samples", "6")
    assert code == 0
    assert "resolution-limits" in out


def test_verify_unknown_suite_exit_2(capsys):
    code, _, err = run(capsys, "verify", "--theory", "minimal", "--u", "5", "--v", "2",
                       "bogus")
    assert code == 2
    assert "unknown suite" in err


def test_qdim_command(capsys):
    code, out, _ = run(capsys, "qdim", "--theory", "singlet", "--p", "2",
                       "--samples", "3", "M[r=2,s=1]")
    assert code == 0
    assert out.count("mu=") == 3


def test_resolve_command_json(capsys, tmp_path):
    out_path = tmp_path / "res.json"
    code, _, _ = run(capsys, "resolve", "--theory", "sl2", "--u", "3", "--v", "2",
                     "L[l=0;r=1]", "--format", "json", "--no-timestamp",
                     "--output", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    res = doc["result"]["resolution"]
    assert res["period_length"] == 2
    assert res["z_shift_per_period"] == 4
    assert res["depth_preview"][0] == ["E+[l=1;r=1,s=1]"]
    if jsonschema is not None:
        jsonschema.validate(doc, SCHEMA)


@pytest.mark.skipif(jsonschema is None, reason="jsonschema not installed")
def test_json_output_validates_against_schema(capsys, tmp_path):
    for argv in (
        ["fuse", "--theory", "minimal", "--u", "5", "--v", "2", "(2,1)", "(2,1)"],
        ["table", "--theory", "minimal", "--u", "4", "--v", "3"],
        ["verify", "--theory", "minimal", "--u", "5", "--v", "2", "smatrix"],
        ["qdim", "--theory", "singlet", "--p", "3", "--samples", "2", "M[r=1,s=1]"],
    ):
        out_path = tmp_path / "out.json"
        code = main(argv + ["--format", "json", "--output", str(out_path)])
        capsys.readouterr()
        assert code == 0
        jsonschema.validate(json.loads(out_path.read_text()), SCHEMA)


def test_deterministic_outputs(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    base = ["table", "--theory", "sl2", "--u", "3", "--v", "2", "--l-range", "0:1",
            "--r-range", "1:2", "--s-range", "1:1", "--format", "json",
            "--no-timestamp"]
    assert main(base + ["--output", str(a)]) == 0
    assert main(base + ["--output", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()

    base = ["verify", "--theory", "singlet", "--p", "2", "euler", "--samples", "5",
            "--format", "csv", "--no-timestamp"]
    assert main(base + ["--output", str(a)]) == 0
    assert main(base + ["--output", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_config_file_with_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("theory=minimal\nu=5\nv=2\nformat=json\nno-timestamp=true\n")
    out_path = tmp_path / "out.json"
    code = main(["fuse", "(2,1)", "(2,1)", "--config", str(cfg),
                 "--output", str(out_path)])
    capsys.readouterr()
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["meta"]["theory"] == "minimal"
    assert "timestamp" not in doc["meta"]
    # the flag wins over the file
    code = main(["fuse", "(2,1)", "(2,1)", "--config", str(cfg), "--u", "3",
                 "--output", str(out_path)])
    capsys.readouterr()
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["meta"]["params"]["u"] == 3


def test_missing_theory_is_usage_error(capsys):
    code, _, err = run(capsys, "fuse", "(2,1)", "(2,1)")
    assert code == 2
    assert "--theory" in err

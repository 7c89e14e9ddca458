import json
import os

import pytest
from click.testing import CliRunner

from tubeinv.cli import cli, latex_partition_function


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, list(args), catch_exceptions=False)

    return invoke


def test_modular_data_h4(run):
    res = run("modular-data", "--h", "4")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["labels"] == [1, 2, 3]
    assert len(data["S"]) == 3 and len(data["T"]) == 3
    assert len(data["fusion"]) == 3


def test_modular_data_h3_dims(run):
    data = json.loads(run("modular-data", "--h", "3").output)
    assert [d["re"] for d in data["d"]] == [1.0, -1.0]


def test_modular_data_rejects_h2(run):
    assert run("modular-data", "--h", "2").exit_code == 2


def test_modular_data_formats(run):
    assert "S:" in run("modular-data", "--h", "5", "--format", "pretty").output
    assert "\\begin{pmatrix}" in run("modular-data", "--h", "5", "--format", "latex").output


def test_invariant_a3(run):
    res = run("invariant", "--quiver", "A3")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["Z"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert data["checks"] == {"T": True, "S": True, "haploid": True, "dim_condition": True}
    assert data["ciz_match"] == "A3" and data["backend"] == "exact" and data["tolerance"] is None


def test_invariant_e6_float(run):
    res = run("invariant", "--quiver", "E6", "--backend", "float")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["ciz_match"] == "E6" and data["tolerance"] == 1e-6
    assert data["rank_gaps"]


def test_invariant_disconnected_file_fails_haploid(run, data_dir):
    res = run("invariant", "--quiver", os.path.join(data_dir, "a2_a2.json"))
    assert res.exit_code == 1
    data = json.loads(res.output)
    assert data["Z"][0][0] == 2 and data["checks"]["haploid"] is False


def test_invalid_quivers(run, tmp_path):
    assert run("invariant", "--quiver", "Q7").exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "vertices": ["a", "b"], "edges": [["a", "b"]], "h": 7}))
    assert run("invariant", "--quiver", str(bad)).exit_code == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run("diagonal", "--quiver", str(broken)).exit_code == 2


def test_tolerance_requires_float(run):
    assert run("invariant", "--quiver", "A3", "--tolerance", "1e-6").exit_code == 2


def test_diagonal_examples(run):
    e8 = json.loads(run("diagonal", "--quiver", "E8").output)
    assert [m for m, v in zip(e8["labels"], e8["diagonal"]) if v] == [1, 7, 11, 13, 17, 19, 23, 29]
    assert json.loads(run("diagonal", "--quiver", "D4").output)["diagonal"] == [1, 0, 2, 0, 1]
    assert json.loads(run("diagonal", "--quiver", "A5").output)["diagonal"] == [1] * 5


def test_frobenius_commands(run):
    for name in ("A3", "D4"):
        res = run("frobenius", "--quiver", name)
        assert res.exit_code == 0
        data = json.loads(res.output)
        assert data["ok"] and all(c["ok"] for c in data["checks"].values())
    res = run("frobenius", "--quiver", "E6")
    assert res.exit_code == 2
    assert "exact backend required, h ≤ 6" in res.output
    assert run("frobenius", "--quiver", "A3", "--backend", "float").exit_code == 2


def test_output_is_deterministic_and_written_to_file(run, tmp_path):
    out1, out2 = tmp_path / "1.json", tmp_path / "2.json"
    assert run("invariant", "--quiver", "D5", "--out", str(out1)).exit_code == 0
    assert run("invariant", "--quiver", "D5", "--out", str(out2)).exit_code == 0
    assert out1.read_bytes() == out2.read_bytes()
    a = run("frobenius", "--quiver", "A4").output
    b = run("frobenius", "--quiver", "A4").output
    assert a == b


def test_latex_partition_functions(run):
    e6 = run("invariant", "--quiver", "E6", "--backend", "float", "--format", "latex").output
    assert "|\\chi_{1} + \\chi_{7}|^2" in e6 and "|\\chi_{5} + \\chi_{11}|^2" in e6
    d4 = run("invariant", "--quiver", "D4", "--format", "latex").output
    assert "2|\\chi_{3}|^2" in d4
    # a matrix that is not a sum of constant blocks falls back to the raw matrix
    assert latex_partition_function([[1, 1], [1, 2]]).startswith("\\begin{pmatrix}")


def test_pretty_formats(run):
    assert "ADE match: D4" in run("invariant", "--quiver", "D4", "--format", "pretty").output
    assert "exponents" in run("diagonal", "--quiver", "E6", "--format", "pretty").output
    assert "frobenius" in run("frobenius", "--quiver", "A3", "--format", "pretty").output


def test_console_script_entry_point():
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-c", "from tubeinv.cli import main; main()", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "modular-data" in out.stdout

from pathlib import Path

import orjson
import pytest
from typer.testing import CliRunner

from chi_mapper.cli import app
from chi_mapper.tables import identity_tables

runner = CliRunner()


def data_dir() -> Path:
    import chi_mapper as pkg
    return Path(pkg.__file__).parent / "data"


def dataset() -> str:
    return str(data_dir() / "cnot_tables.json")


def write_json(path: Path, obj) -> str:
    path.write_bytes(orjson.dumps(obj))
    return str(path)


def weak_tables(tmp_path: Path) -> str:
    # F_Z = 0.4, F_X = 0.5 on one qubit
    return write_json(tmp_path / "weak.json", {
        "n_qubits": 1,
        "z_table": [[0.4, 0.6], [0.4, 0.6]],
        "x_table": [[0.5, 0.5], [0.5, 0.5]],
    })


def analyze_json(*args: str, tmp_path: Path) -> dict:
    out = tmp_path / "report.json"
    result = runner.invoke(app, ["analyze", *args, "--format", "json", "--out", str(out)])
    assert result.exit_code == 0, result.output
    return orjson.loads(out.read_bytes())


def test_analyze_dataset_json(tmp_path):
    report = analyze_json("--input", dataset(), tmp_path=tmp_path)
    assert report["bounds"]["lower"] == pytest.approx(0.72025, abs=1e-9)
    assert report["bounds"]["upper"] == pytest.approx(0.853, abs=1e-9)
    assert report["process_fidelity_estimate"] == pytest.approx(0.825, abs=5e-4)
    assert report["average_fidelity"] == pytest.approx(0.86, abs=5e-4)
    targets = {t["symbol"]: t for t in report["targets"]}
    assert targets["F_E1"]["worst_case"] == pytest.approx(0.793, abs=1e-3)
    assert targets["F_E1"]["statistical"] == pytest.approx(0.850, abs=1e-3)
    assert targets["F_E2"]["worst_case"] == pytest.approx(0.720, abs=1e-3)
    assert [m["model"] for m in report["models"]] == ["worst_case", "statistical"]
    assert report["provenance"]["flags"]["model"] == "both"


def test_analyze_dataset_markdown(tmp_path):
    out = tmp_path / "report.md"
    result = runner.invoke(app, ["analyze", "-i", dataset(), "-o", str(out)])
    assert result.exit_code == 0, result.output
    text = out.read_text(encoding="utf-8")
    for heading in ("## Error tables", "## Summary", "## Process fidelity", "## Target fidelities", "## Diagnostics"):
        assert heading in text
    assert "Z_n=00" in text and "averages" in text
    assert "F_E2: 1 - " in text
    assert "```json" in text


def test_analyze_identity_tables_has_no_diagnostics(tmp_path):
    path = write_json(tmp_path / "ideal.json", identity_tables(2).to_document())
    report = analyze_json("--input", path, tmp_path=tmp_path)
    assert report["diagnostics"] == []
    assert all(t["worst_case"] == pytest.approx(1.0) for t in report["targets"])


def test_analyze_rounded_summaries(tmp_path):
    report = analyze_json("--input", dataset(), "--rounded-summaries", tmp_path=tmp_path)
    statistical = next(m for m in report["models"] if m["model"] == "statistical")
    assert statistical["values"][0][0] == pytest.approx(0.825, abs=1e-12)
    assert report["bounds"]["lower"] == pytest.approx(0.720, abs=1e-12)
    assert "summaries rounded to 3 decimals" in report["diagnostics"]


def test_analyze_single_model_and_custom_chi(tmp_path):
    report = analyze_json(
        "--input", dataset(), "--model", "statistical", "--chi", str(data_dir() / "worst_case_chi.json"),
        tmp_path=tmp_path,
    )
    assert [m["model"] for m in report["models"]] == ["statistical", "worst_case"]
    assert report["custom_model_targets"]["bell_from_xz"] == pytest.approx(0.792, abs=1e-9)
    assert all(t["worst_case"] is None for t in report["targets"])


def test_analyze_custom_targets(tmp_path):
    targets = write_json(tmp_path / "targets.json", [{"name": "product", "paulis": ["II", "ZI", "IZ", "ZZ"]}])
    report = analyze_json("--input", dataset(), "--targets", targets, tmp_path=tmp_path)
    product = next(t for t in report["targets"] if t["name"] == "product")
    assert product["worst_case"] == pytest.approx(0.853, abs=5e-4)
    assert len(report["targets"]) == 5


def test_analyze_strict_rejects_dataset():
    result = runner.invoke(app, ["analyze", "--input", dataset(), "--strict"])
    assert result.exit_code == 1


def test_analyze_bad_inputs(tmp_path):
    assert runner.invoke(app, ["analyze", "--input", str(tmp_path / "missing.json")]).exit_code == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert runner.invoke(app, ["analyze", "--input", str(broken)]).exit_code == 1
    assert runner.invoke(app, ["analyze", "--input", dataset(), "--model", "median"]).exit_code == 1
    assert runner.invoke(app, ["analyze", "--input", dataset(), "--format", "xml"]).exit_code == 1


def test_analyze_infeasible_summary_exits_2(tmp_path):
    result = runner.invoke(app, ["analyze", "--input", weak_tables(tmp_path)])
    assert result.exit_code == 2


def test_bounds_command(tmp_path):
    result = runner.invoke(app, ["bounds", "--input", dataset()])
    assert result.exit_code == 0
    assert "0.720 ≤ F_qp ≤ 0.853" in result.output
    assert "vacuous lower bound: no" in result.output

    ideal = write_json(tmp_path / "ideal.json", identity_tables(2).to_document())
    result = runner.invoke(app, ["bounds", "--input", ideal])
    assert "1.000 ≤ F_qp ≤ 1.000" in result.output

    result = runner.invoke(app, ["bounds", "--input", weak_tables(tmp_path)])
    assert result.exit_code == 0
    assert "0.000 ≤ F_qp ≤ 0.400" in result.output
    assert "vacuous lower bound: yes" in result.output


@pytest.mark.integration
def test_simulate_then_analyze_recovers_bounds(tmp_path):
    tables = tmp_path / "tables.json"
    result = runner.invoke(app, ["simulate", "--chi", str(data_dir() / "worst_case_chi.json"), "--out", str(tables)])
    assert result.exit_code == 0, result.output
    report = analyze_json("--input", str(tables), tmp_path=tmp_path)
    assert report["bounds"]["lower"] == pytest.approx(0.720, abs=1e-9)
    assert report["bounds"]["upper"] == pytest.approx(0.853, abs=1e-9)
    worst = next(m for m in report["models"] if m["model"] == "worst_case")
    assert worst["values"][0][1] == pytest.approx(0.034, abs=1e-9)


@pytest.mark.integration
def test_simulate_sampling_is_deterministic(tmp_path):
    chi = str(data_dir() / "worst_case_chi.json")
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        args = ["simulate", "--chi", chi, "--shots", "100000", "--seed", "7", "--out", str(out)]
        assert runner.invoke(app, args).exit_code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_simulate_rejects_invalid_chi(tmp_path):
    bad = write_json(tmp_path / "bad.json", {"n_qubits": 1, "values": [[1.2, -0.2], [0.0, 0.0]]})
    assert runner.invoke(app, ["simulate", "--chi", bad]).exit_code == 1
    assert runner.invoke(app, ["simulate", "--chi", str(data_dir() / "worst_case_chi.json"), "--gate", "swap"]).exit_code == 1


def test_simulate_rejects_chi_with_mass_drift(tmp_path):
    # analyze --chi rescales a drift like this; simulate refuses it
    result = runner.invoke(app, ["simulate", "--chi", str(data_dir() / "statistical_chi.json")])
    assert result.exit_code == 1
    assert "total mass is 1.000100" in result.output


def test_simulate_rejects_non_trace_preserving_chi(tmp_path):
    entries = [[0.0] * 4 for _ in range(4)]
    entries[0][0] = entries[1][1] = 0.5
    entries[0][1] = entries[1][0] = 0.1
    bad = write_json(tmp_path / "coherent.json", {"n_qubits": 1, "entries_re": entries})
    result = runner.invoke(app, ["simulate", "--chi", bad, "--gate", "identity"])
    assert result.exit_code == 1
    assert "trace preserving" in result.output


def test_simulate_rejects_malformed_custom_gate(tmp_path):
    gate = write_json(tmp_path / "gate.json", [[1.0, 0.0], [0.0, 1.0]])
    chi = str(data_dir() / "worst_case_chi.json")
    result = runner.invoke(app, ["simulate", "--chi", chi, "--gate", f"custom:{gate}"])
    assert result.exit_code == 1
    assert "schema" in result.output


def test_row_tolerance_carries_to_summaries(tmp_path):
    # every z row sums to 1.005
    loose = write_json(tmp_path / "loose.json", {
        "n_qubits": 1,
        "z_table": [[0.905, 0.1], [0.905, 0.1]],
        "x_table": [[0.9, 0.1], [0.9, 0.1]],
    })
    report = analyze_json("--input", loose, "--row-tolerance", "0.01", tmp_path=tmp_path)
    assert report["summary"]["F_Z"] == pytest.approx(0.905)
    result = runner.invoke(app, ["bounds", "--input", loose, "--row-tolerance", "0.01"])
    assert result.exit_code == 0, result.output
    assert runner.invoke(app, ["bounds", "--input", loose]).exit_code == 1


def test_bounds_reads_stdin():
    text = (data_dir() / "cnot_tables.json").read_text(encoding="utf-8")
    result = runner.invoke(app, ["bounds", "--input", "-"], input=text)
    assert result.exit_code == 0, result.output
    assert "0.720 ≤ F_qp ≤ 0.853" in result.output

from pathlib import Path

import numpy as np
import orjson
import pytest

from chi_mapper.noise import STATISTICAL, WORST_CASE
from chi_mapper.oracle import FullProcessMatrix
from chi_mapper.pipeline import AnalysisConfig, Analyzer, SimulateConfig, Simulator
from chi_mapper.report import render_json, render_markdown
from chi_mapper.tables import ErrorTableSet, identity_tables, load_tables


def data_dir() -> Path:
    import chi_mapper as pkg
    return Path(pkg.__file__).parent / "data"


def dataset():
    return load_tables(data_dir() / "cnot_tables.json")


def test_default_analysis_runs_both_models_and_presets():
    report = Analyzer(AnalysisConfig()).analyze(dataset(), source="cnot_tables.json")
    assert [m.model_tag for m in report.models] == [WORST_CASE, STATISTICAL]
    assert [t.symbol for t in report.targets] == ["F_zx", "F_E1", "F_xz", "F_E2"]
    assert report.model(STATISTICAL).process_fidelity == pytest.approx(report.process_fidelity_estimate)
    assert report.provenance["input"] == "cnot_tables.json"
    assert report.provenance["tool"].startswith("chi-mapper ")


def test_presets_can_be_switched_off():
    report = Analyzer(AnalysisConfig(include_presets=False, model="worst-case")).analyze(dataset())
    assert report.targets == []
    assert [m.model_tag for m in report.models] == [WORST_CASE]


def test_targets_with_other_qubit_count_are_skipped(tmp_path):
    path = tmp_path / "targets.json"
    path.write_bytes(orjson.dumps([{"name": "single", "paulis": ["I", "Z"]}]))
    report = Analyzer(AnalysisConfig(targets_path=str(path))).analyze(dataset())
    assert "single" not in [t.target.name for t in report.targets]


def test_single_qubit_data_has_no_presets():
    report = Analyzer(AnalysisConfig()).analyze(identity_tables(1))
    assert report.targets == []
    assert report.average_fidelity == pytest.approx(1.0)


def test_custom_chi_inconsistency_is_diagnosed():
    cfg = AnalysisConfig(chi_path=str(data_dir() / "worst_case_chi.json"))
    report = Analyzer(cfg).analyze(identity_tables(2))
    assert any(d.startswith("custom chi inconsistent with data") for d in report.diagnostics)
    assert report.custom_values["zx_eigenstates"] == pytest.approx(0.842)


def test_markdown_and_json_render_same_report():
    report = Analyzer(AnalysisConfig()).analyze(dataset())
    doc = orjson.loads(render_json(report))
    md = render_markdown(report)
    assert f"{doc['bounds']['lower']:.3f} ≤ F_qp ≤ {doc['bounds']['upper']:.3f}" in md
    statistical = next(m for m in doc["models"] if m["model"] == STATISTICAL)
    assert f"{statistical['values'][2][2]:.4f}" in md
    assert doc["unobservable_error_share"] == pytest.approx(0.2)
    assert doc["complementary_average"] == pytest.approx((0.853 + 0.86725) / 2)


def test_simulator_exact_and_sampled():
    proc = FullProcessMatrix.ideal(2)
    exact = Simulator(SimulateConfig(gate="cnot")).simulate(proc, source="ideal")
    assert np.allclose(exact.z_table, identity_tables(2).z_table)
    assert exact.metadata == "simulated from ideal, gate=cnot"
    sampled = Simulator(SimulateConfig(gate="identity", shots=50, seed=3)).simulate(proc)
    assert np.allclose(sampled.x_table, identity_tables(2).x_table)
    assert "seed 3" in sampled.metadata


def test_loose_row_tolerance_reaches_the_summary():
    loose = ErrorTableSet(1, np.array([[0.905, 0.1], [0.905, 0.1]]), np.array([[0.9, 0.1], [0.9, 0.1]]))
    report = Analyzer(AnalysisConfig(row_tolerance=0.01)).analyze(loose)
    assert report.summary.F_Z == pytest.approx(0.905)
    assert report.bounds.lower == pytest.approx(0.805)


def test_rescaled_custom_chi_is_reported():
    cfg = AnalysisConfig(chi_path=str(data_dir() / "statistical_chi.json"))
    report = Analyzer(cfg).analyze(dataset())
    assert any(d.startswith("custom chi: rescaled to unit mass") for d in report.diagnostics)

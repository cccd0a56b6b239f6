from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from . import __version__
from .noise import (
    EPS_FID,
    DiagonalChi,
    FidelityBounds,
    average_fidelity_from_process,
    complementary_average,
    load_chi,
    process_fidelity_bounds,
    process_fidelity_estimate,
    statistical_chi,
    unobservable_error_share,
    worst_case_chi,
)
from .oracle import FullProcessMatrix, GateSpec, generate_tables, sample_tables
from .pauli import StabilizerTarget
from .tables import (
    DEFAULT_ROW_TOLERANCE,
    STRICT_ROW_TOLERANCE,
    ComplementarySummary,
    ErrorTableSet,
    summarize,
)
from .targets import TargetFidelityReport, evaluate_targets, load_targets, preset_targets, target_fidelity

log = logging.getLogger(__name__)

MODEL_CHOICES = ("worst-case", "statistical", "both")


@dataclass
class AnalysisConfig:
    row_tolerance: float = DEFAULT_ROW_TOLERANCE
    strict: bool = False
    # Evaluate models on 3-decimal summaries, as the published model tables were
    rounded_summaries: bool = False
    model: str = "both"  # worst-case|statistical|both
    targets_path: Optional[str] = None
    # None: presets only for two-qubit data
    include_presets: Optional[bool] = None
    # Optional DiagonalChi file evaluated as an extra "custom" model
    chi_path: Optional[str] = None
    eps_fid: float = EPS_FID

    @property
    def effective_row_tolerance(self) -> float:
        return STRICT_ROW_TOLERANCE if self.strict else self.row_tolerance

    def flags(self) -> Dict[str, Any]:
        return {
            "row_tolerance": self.effective_row_tolerance,
            "strict": self.strict,
            "rounded_summaries": self.rounded_summaries,
            "model": self.model,
            "targets": self.targets_path,
            "chi": self.chi_path,
        }


@dataclass
class AnalysisReport:
    summary: ComplementarySummary
    bounds: FidelityBounds
    models: List[DiagonalChi]
    targets: List[TargetFidelityReport]
    process_fidelity_estimate: float
    average_fidelity: float
    provenance: Dict[str, Any]
    custom_values: Dict[str, float] = field(default_factory=dict)
    diagnostics: List[str] = field(default_factory=list)
    tables: Optional[ErrorTableSet] = None

    def model(self, tag: str) -> Optional[DiagonalChi]:
        return next((m for m in self.models if m.model_tag == tag), None)

    def to_dict(self) -> Dict[str, Any]:
        d = self.summary.dim
        return {
            "provenance": self.provenance,
            "summary": self.summary.to_dict(),
            "bounds": self.bounds.to_dict(),
            "process_fidelity_estimate": self.process_fidelity_estimate,
            "average_fidelity": self.average_fidelity,
            "complementary_average": complementary_average(self.summary),
            "unobservable_error_share": unobservable_error_share(d),
            "models": [m.to_document() for m in self.models],
            "targets": [t.to_dict() for t in self.targets],
            "custom_model_targets": dict(self.custom_values),
            "diagnostics": list(self.diagnostics),
            "tables": self.tables.to_document() if self.tables is not None else None,
        }


class Analyzer:
    def __init__(self, cfg: AnalysisConfig):
        self.cfg = cfg
        self.custom_targets: List[StabilizerTarget] = load_targets(cfg.targets_path) if cfg.targets_path else []
        self.custom_chi: Optional[DiagonalChi] = load_chi(cfg.chi_path) if cfg.chi_path else None

    def _targets(self, n_qubits: int) -> List[StabilizerTarget]:
        presets = self.cfg.include_presets
        if presets is None:
            presets = n_qubits == 2
        out = preset_targets() if presets else []
        for t in self.custom_targets:
            if t.n_qubits != n_qubits:
                log.warning("skipping target %r: %d qubits, data has %d", t.name, t.n_qubits, n_qubits)
                continue
            out.append(t)
        return out

    def analyze(self, tables: ErrorTableSet, source: str = "") -> AnalysisReport:
        summary = summarize(tables, self.cfg.effective_row_tolerance)
        # bounds, models and targets all read the same (optionally rounded) summary
        model_input = summary.rounded(3) if self.cfg.rounded_summaries else summary
        bounds = process_fidelity_bounds(model_input)

        diagnostics: List[str] = []
        if bounds.vacuous_lower:
            diagnostics.append(
                f"lower bound is vacuous: F_Z + F_X - 1 = {model_input.F_Z + model_input.F_X - 1:.4f} < 0"
            )

        wc = statistical = None
        if self.cfg.model in ("worst-case", "both"):
            wc = worst_case_chi(model_input)
        if self.cfg.model in ("statistical", "both"):
            statistical = statistical_chi(model_input, self.cfg.eps_fid)
        models = [m for m in (wc, statistical) if m is not None]
        for m in models:
            diagnostics.extend(f"{m.model_tag}: {note}" for note in m.diagnostics)

        targets = self._targets(tables.n_qubits)
        reports = evaluate_targets(targets, worst_case=wc, statistical=statistical)

        custom_values: Dict[str, float] = {}
        if self.custom_chi is not None:
            if self.custom_chi.n_qubits != tables.n_qubits:
                diagnostics.append(
                    f"custom chi has {self.custom_chi.n_qubits} qubits, data has {tables.n_qubits}; ignored"
                )
            else:
                models.append(self.custom_chi)
                diagnostics.extend(f"custom chi: {note}" for note in self.custom_chi.diagnostics)
                problems = self.custom_chi.problems(summary, tolerance=self.cfg.effective_row_tolerance)
                diagnostics.extend(f"custom chi inconsistent with data: {p}" for p in problems)
                custom_values = {t.name: target_fidelity(self.custom_chi, t) for t in targets}

        f_qp = process_fidelity_estimate(model_input)
        return AnalysisReport(
            summary=summary,
            bounds=bounds,
            models=models,
            targets=reports,
            process_fidelity_estimate=f_qp,
            average_fidelity=average_fidelity_from_process(min(max(f_qp, 0.0), 1.0), summary.dim),
            provenance={
                "input": source,
                "tool": f"chi-mapper {__version__}",
                "flags": self.cfg.flags(),
                "metadata": tables.metadata,
            },
            custom_values=custom_values,
            diagnostics=diagnostics + model_input.notes,
            tables=tables,
        )


@dataclass
class SimulateConfig:
    gate: str = "cnot"  # identity|cnot|custom:<file>
    # None: exact probabilities
    shots: Optional[int] = None
    seed: int = 0


class Simulator:
    def __init__(self, cfg: SimulateConfig):
        self.cfg = cfg

    def simulate(self, proc: FullProcessMatrix, source: str = "") -> ErrorTableSet:
        g = GateSpec.parse(self.cfg.gate, proc.n_qubits)
        origin = f"simulated from {source}" if source else "simulated"
        tables = generate_tables(proc, g, metadata=f"{origin}, gate={self.cfg.gate}")
        if self.cfg.shots is not None:
            tables = sample_tables(tables, self.cfg.shots, self.cfg.seed)
        log.debug("generated %dx%d tables with gate %s", tables.dim, tables.dim, g.kind)
        return tables

"""Markdown and JSON rendering of an AnalysisReport.

Both renderings read the same in-memory report. Tables follow the published
layout: rows f_z, columns f_x, with a marginal "Sum" row and column.
"""
from __future__ import annotations

from typing import Callable, List

import numpy as np
import pandas as pd

from .io_utils import dumps_json
from .noise import DiagonalChi, FidelityBounds
from .pipeline import AnalysisReport
from .tables import ComplementarySummary, bit_label

SUMMARY_DECIMALS = 3
CHI_DECIMALS = 4


def _fmt(decimals: int) -> Callable[[float], str]:
    return lambda v: f"{v:.{decimals}f}"


def markdown_table(df: pd.DataFrame, fmt: Callable[[float], str]) -> str:
    header = [str(df.index.name or "")] + [str(c) for c in df.columns]
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] * len(header)) + "|"]
    for label, row in df.iterrows():
        cells = [fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row.tolist()]
        lines.append("| " + " | ".join([str(label)] + cells) + " |")
    return "\n".join(lines)


def error_table_frame(table: np.ndarray, n_qubits: int, basis: str) -> pd.DataFrame:
    prefix = "Z_n" if basis == "Z" else "X_k"
    f = "f_z" if basis == "Z" else "f_x"
    dim = table.shape[0]
    df = pd.DataFrame(
        table,
        index=[f"{prefix}={bit_label(r, n_qubits)}" for r in range(dim)],
        columns=[f"{f}={c}" for c in range(dim)],
    )
    df.loc["averages"] = df.mean(axis=0)
    df.index.name = f"p({f}|{prefix[0]}_{prefix[-1]})"
    return df


def chi_frame(chi: DiagonalChi) -> pd.DataFrame:
    dim = chi.dim
    df = pd.DataFrame(chi.values, index=[f"f_z={r}" for r in range(dim)], columns=[f"f_x={c}" for c in range(dim)])
    df["Sum"] = df.sum(axis=1)
    df.loc["Sum"] = df.sum(axis=0)
    df.index.name = f"chi [{chi.model_tag}]"
    return df


def format_bounds(bounds: FidelityBounds) -> str:
    vacuous = "yes (F_Z + F_X - 1 < 0, clamped to 0)" if bounds.vacuous_lower else "no"
    return f"{bounds.lower:.3f} ≤ F_qp ≤ {bounds.upper:.3f}\nvacuous lower bound: {vacuous}"


def _summary_lines(s: ComplementarySummary) -> List[str]:
    eta_z = ", ".join(f"eta_Z({f})={s.eta_z(f):.3f}" for f in range(1, s.dim))
    eta_x = ", ".join(f"eta_X({f})={s.eta_x(f):.3f}" for f in range(1, s.dim))
    return [f"- F_Z = {s.F_Z:.3f}; {eta_z}", f"- F_X = {s.F_X:.3f}; {eta_x}"]


def render_markdown(report: AnalysisReport, with_json: bool = True) -> str:
    s = report.summary
    n = s.n_qubits
    prov = report.provenance
    out: List[str] = ["# Complementary-operation analysis", ""]
    out.append(f"- input: `{prov.get('input') or '-'}`")
    out.append(f"- tool: {prov.get('tool')}")
    if prov.get("metadata"):
        out.append(f"- metadata: {prov['metadata']}")
    out.append(f"- flags: {', '.join(f'{k}={v}' for k, v in prov.get('flags', {}).items())}")
    out.append("")

    out += ["## Error tables", ""]
    if report.tables is not None:
        for basis, table in (("Z", report.tables.z_table), ("X", report.tables.x_table)):
            out += [markdown_table(error_table_frame(table, n, basis), _fmt(SUMMARY_DECIMALS)), ""]
    out += ["## Summary", ""] + _summary_lines(s) + [""]

    b = report.bounds
    out += ["## Process fidelity", ""]
    out.append(f"- bounds: {b.lower:.3f} ≤ F_qp ≤ {b.upper:.3f} (width {b.width:.3f})")
    if b.vacuous_lower:
        out.append("- lower bound is vacuous (F_Z + F_X - 1 < 0)")
    out.append(f"- estimate (uniform errors): F_qp ≈ {report.process_fidelity_estimate:.3f}")
    out.append(f"- average fidelity: F_av = (F_qp·d + 1)/(d + 1) = {report.average_fidelity:.3f}")
    out.append(f"- complementary average: (F_Z + F_X)/2 = {(s.F_Z + s.F_X) / 2:.3f}")
    out.append(f"- share of errors invisible to a random input: 1/(d + 1) = {1 / (s.dim + 1):.3f}")
    out.append("")

    for chi in report.models:
        out += [f"## Process matrix diagonal: {chi.model_tag}", ""]
        out += [markdown_table(chi_frame(chi), _fmt(CHI_DECIMALS)), ""]

    if report.targets:
        out += ["## Target fidelities", ""]
        rows = []
        for t in report.targets:
            rows.append({
                "target": t.target.name,
                "symbol": t.symbol,
                "stabilizers": " ".join(t.target.paulis()),
                "worst case (≥)": t.worst_case_value if t.worst_case_value is not None else "-",
                "statistical (≈)": t.statistical_value if t.statistical_value is not None else "-",
                "spread": t.spread if t.spread is not None else "-",
                "custom": report.custom_values.get(t.target.name, "-"),
            })
        df = pd.DataFrame(rows).set_index("target")
        if not report.custom_values:
            df = df.drop(columns=["custom"])
        out += [markdown_table(df, _fmt(SUMMARY_DECIMALS)), ""]
        out.append("Worst-case values equal one minus the single-basis errors each target is sensitive to:")
        for t in report.targets:
            out.append(f"- {t.symbol}: 1 - " + (" - ".join(t.excluded) if t.excluded else "0"))
        out.append("")

    out += ["## Diagnostics", ""]
    out += [f"- {d}" for d in report.diagnostics] or ["none"]
    out.append("")
    if with_json:
        out += ["## Data", "", "```json", render_json(report), "```", ""]
    return "\n".join(out)


def render_json(report: AnalysisReport) -> str:
    return dumps_json(report.to_dict())

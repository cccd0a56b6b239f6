"""Fidelities of operations that were never measured directly.

An operation whose ideal outputs are stabilizer states has a fidelity equal to
the diagonal chi mass on the d error indices that stabilize those outputs.
Stabilizer signs play no role: only the unsigned indices enter the sum.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from .errors import DimensionMismatchError, InvalidTargetError
from .io_utils import load_json
from .noise import EPS_FID, DiagonalChi, statistical_chi, worst_case_chi
from .pauli import IDENTITY, ErrorIndex, StabilizerTarget, pauli_of_index, validate_target
from .tables import ComplementarySummary

log = logging.getLogger(__name__)

# (name, symbol, members as (f_z, f_x))
PRESETS = (
    ("zx_eigenstates", "F_zx", ((0, 0), (1, 0), (0, 2), (1, 2))),
    ("bell_from_xz", "F_E1", ((0, 0), (3, 0), (0, 3), (3, 3))),
    ("xz_from_bell", "F_xz", ((0, 0), (2, 0), (0, 1), (2, 1))),
    ("entangle_from_yy", "F_E2", ((0, 0), (1, 3), (3, 2), (2, 1))),
)
PRESET_SYMBOLS = {name: symbol for name, symbol, _ in PRESETS}


def preset_targets() -> List[StabilizerTarget]:
    return [StabilizerTarget.from_indices(name, 2, members) for name, _, members in PRESETS]


def _require_valid(t: StabilizerTarget) -> None:
    violations = validate_target(t)
    if violations:
        raise InvalidTargetError(
            f"target {t.name!r} is not a stabilizer group: " + "; ".join(v.detail for v in violations),
            violations,
        )


def target_fidelity(chi: DiagonalChi, t: StabilizerTarget) -> float:
    if chi.n_qubits != t.n_qubits:
        raise DimensionMismatchError(f"target {t.name!r} has {t.n_qubits} qubits, chi has {chi.n_qubits}")
    _require_valid(t)
    return float(sum(chi.value(i) for i in t.members))


def worst_case_lower_bound(s: ComplementarySummary, t: StabilizerTarget) -> float:
    """Worst-case target fidelity straight from the summary.

    (F_Z + F_X - 1) plus the pure-Z and pure-X error probabilities whose
    indices stabilize the target outputs.
    """
    value = s.F_Z + s.F_X - 1.0
    for i in t.members:
        if i == IDENTITY:
            continue
        if i.f_x == 0:
            value += s.eta_z(i.f_z)
        elif i.f_z == 0:
            value += s.eta_x(i.f_x)
    return value


def excluded_errors(t: StabilizerTarget) -> List[str]:
    """Single-basis errors the target is sensitive to: one minus these is the worst-case value."""
    dim = 1 << t.n_qubits
    out = [f"eta_Z({f})" for f in range(1, dim) if ErrorIndex(f, 0) not in t.members]
    out += [f"eta_X({f})" for f in range(1, dim) if ErrorIndex(0, f) not in t.members]
    return out


@dataclass
class TargetContribution:
    index: ErrorIndex
    pauli: str
    worst_case: Optional[float] = None
    statistical: Optional[float] = None


@dataclass
class TargetFidelityReport:
    target: StabilizerTarget
    worst_case_value: Optional[float]
    statistical_value: Optional[float]
    contributions: List[TargetContribution] = field(default_factory=list)
    excluded: List[str] = field(default_factory=list)

    @property
    def symbol(self) -> str:
        return PRESET_SYMBOLS.get(self.target.name, self.target.name)

    @property
    def spread(self) -> Optional[float]:
        """Gap between the likely and the guaranteed value; small means a precise estimate."""
        if self.worst_case_value is None or self.statistical_value is None:
            return None
        return self.statistical_value - self.worst_case_value

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.target.name,
            "symbol": self.symbol,
            "paulis": self.target.paulis(),
            "worst_case": self.worst_case_value,
            "statistical": self.statistical_value,
            "spread": self.spread,
            "excluded_errors": self.excluded,
            "contributions": [
                {
                    "index": list(c.index.as_tuple()),
                    "pauli": c.pauli,
                    "worst_case": c.worst_case,
                    "statistical": c.statistical,
                }
                for c in self.contributions
            ],
        }


def evaluate_targets(
    targets: Sequence[StabilizerTarget],
    worst_case: Optional[DiagonalChi] = None,
    statistical: Optional[DiagonalChi] = None,
) -> List[TargetFidelityReport]:
    reports = []
    for t in targets:
        _require_valid(t)
        contributions = []
        for i in t.sorted_members():
            contributions.append(TargetContribution(
                index=i,
                pauli=str(pauli_of_index(i, t.n_qubits)),
                worst_case=worst_case.value(i) if worst_case is not None else None,
                statistical=statistical.value(i) if statistical is not None else None,
            ))
        reports.append(TargetFidelityReport(
            target=t,
            worst_case_value=target_fidelity(worst_case, t) if worst_case is not None else None,
            statistical_value=target_fidelity(statistical, t) if statistical is not None else None,
            contributions=contributions,
            excluded=excluded_errors(t),
        ))
    return reports


def evaluate_all(
    s: ComplementarySummary,
    targets: Sequence[StabilizerTarget],
    eps_fid: float = EPS_FID,
) -> List[TargetFidelityReport]:
    return evaluate_targets(targets, worst_case_chi(s), statistical_chi(s, eps_fid))


class TargetDocument(BaseModel):
    name: str
    paulis: List[str]


def targets_from_document(document: Any) -> List[StabilizerTarget]:
    if isinstance(document, dict) and "targets" in document:
        document = document["targets"]
    items = document if isinstance(document, list) else [document]
    out = []
    for item in items:
        try:
            doc = TargetDocument.model_validate(item)
        except ValidationError as e:
            raise InvalidTargetError(f"target document does not match the schema: {e}") from e
        t = StabilizerTarget.from_paulis(doc.name, doc.paulis)
        _require_valid(t)
        out.append(t)
    log.debug("loaded %d custom targets", len(out))
    return out


def load_targets(path) -> List[StabilizerTarget]:
    return targets_from_document(load_json(path))

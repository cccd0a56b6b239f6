"""Diagonal process-matrix models built from a complementary summary.

A DiagonalChi is a d x d table indexed [f_z][f_x]; entry (f_z, f_x) is the
joint probability of flip pattern f_z in the Z basis and f_x in the X basis.
Its row sums are the Z-basis summary, its column sums the X-basis summary.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from .errors import ChiMapperError, DimensionMismatchError, InfeasibleSummaryError, InvalidProcessError
from .io_utils import load_json
from .pauli import MAX_QUBITS, IndexLike, as_index
from .tables import ComplementarySummary

log = logging.getLogger(__name__)

WORST_CASE = "worst_case"
STATISTICAL = "statistical"
CUSTOM = "custom"
CLAMPED_STATISTICAL = "clamped-statistical"
MODEL_TAGS = (WORST_CASE, STATISTICAL, CUSTOM, CLAMPED_STATISTICAL)

CHI_TOLERANCE = 1e-9
EPS_FID = 1e-12
# printed model tables carry 4-decimal rounding
DOCUMENT_MASS_TOLERANCE = 1e-3


@dataclass(frozen=True)
class FidelityBounds:
    lower: float
    upper: float
    vacuous_lower: bool = False

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower, "upper": self.upper, "vacuous_lower": self.vacuous_lower, "width": self.width}


@dataclass
class DiagonalChi:
    n_qubits: int
    values: np.ndarray
    model_tag: str = CUSTOM
    diagnostics: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        dim = self.dim
        if self.values.shape != (dim, dim):
            raise DimensionMismatchError(f"chi values must be {dim}x{dim}, got {self.values.shape}")
        if self.model_tag not in MODEL_TAGS:
            raise ChiMapperError(f"unknown model tag {self.model_tag!r}; expected one of {MODEL_TAGS}")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def total(self) -> float:
        return float(self.values.sum())

    @property
    def process_fidelity(self) -> float:
        return float(self.values[0, 0])

    def value(self, idx: IndexLike) -> float:
        idx = as_index(idx)
        return float(self.values[idx.f_z, idx.f_x])

    def marginals(self) -> ComplementarySummary:
        """Summary implied by this model: row sums over f_x, column sums over f_z."""
        return ComplementarySummary(self.n_qubits, self.values.sum(axis=1), self.values.sum(axis=0))

    def problems(self, summary: Optional[ComplementarySummary] = None, tolerance: float = CHI_TOLERANCE) -> List[str]:
        out: List[str] = []
        if np.any(self.values < -tolerance):
            out.append(f"negative entry {self.values.min():.3e}")
        if abs(self.total - 1.0) > tolerance:
            out.append(f"total mass {self.total:.12f} differs from 1")
        if summary is not None:
            rows = np.abs(self.values.sum(axis=1) - summary.p_z)
            cols = np.abs(self.values.sum(axis=0) - summary.p_x)
            for f in np.flatnonzero(rows > tolerance):
                out.append(f"row f_z={f} sums to {self.values[f].sum():.6f}, summary has {summary.p_z[f]:.6f}")
            for f in np.flatnonzero(cols > tolerance):
                out.append(f"column f_x={f} sums to {self.values[:, f].sum():.6f}, summary has {summary.p_x[f]:.6f}")
        return out

    def to_document(self) -> Dict[str, Any]:
        return {
            "n_qubits": self.n_qubits,
            "model": self.model_tag,
            "values": self.values.tolist(),
            "diagnostics": list(self.diagnostics),
        }


class ChiDocument(BaseModel):
    n_qubits: int = Field(ge=1, le=MAX_QUBITS)
    model: str = CUSTOM
    values: List[List[float]]
    diagnostics: List[str] = Field(default_factory=list)


def chi_from_document(
    document: Union[Mapping[str, Any], str, bytes],
    mass_tolerance: float = DOCUMENT_MASS_TOLERANCE,
) -> DiagonalChi:
    """Read a DiagonalChi document.

    Drift in the total up to `mass_tolerance` is rescaled away and noted in the
    diagnostics; anything larger is rejected.
    """
    try:
        if isinstance(document, (str, bytes)):
            doc = ChiDocument.model_validate_json(document)
        else:
            doc = ChiDocument.model_validate(document)
    except ValidationError as e:
        raise InvalidProcessError(f"chi document does not match the schema: {e}") from e
    tag = doc.model if doc.model in MODEL_TAGS else CUSTOM
    chi = DiagonalChi(doc.n_qubits, np.array(doc.values, dtype=float), tag, list(doc.diagnostics))
    if np.any(chi.values < 0):
        raise InvalidProcessError(f"chi document has negative entry {chi.values.min()}")
    drift = chi.total - 1.0
    if abs(drift) > mass_tolerance:
        raise InvalidProcessError(f"chi document total mass is {chi.total:.6f}, expected 1")
    if abs(drift) > CHI_TOLERANCE:
        chi.values = chi.values / chi.total
        chi.diagnostics.append(f"rescaled to unit mass (document total {1.0 + drift:.6f})")
        log.warning("chi document total %.6f rescaled to unit mass", 1.0 + drift)
    return chi


def load_chi(path) -> DiagonalChi:
    return chi_from_document(load_json(path))


def process_fidelity_bounds(s: ComplementarySummary) -> FidelityBounds:
    raw_lower = s.F_Z + s.F_X - 1.0
    upper = min(s.F_Z, s.F_X)
    vacuous = raw_lower < 0
    if vacuous:
        log.warning("F_Z + F_X - 1 = %.4f < 0: lower process-fidelity bound is vacuous", raw_lower)
    return FidelityBounds(max(0.0, raw_lower), upper, vacuous)


def _mass_note(s: ComplementarySummary) -> List[str]:
    if s.mass_deviation > CHI_TOLERANCE:
        return [f"summary mass deviates from 1 by {s.mass_deviation:.1e}; marginals reproduced to that precision"]
    return []


def worst_case_chi(s: ComplementarySummary) -> DiagonalChi:
    """All error mass on pure-Z indices (f_z, 0) and pure-X indices (0, f_x)."""
    lower = s.F_Z + s.F_X - 1.0
    if lower < -EPS_FID:
        raise InfeasibleSummaryError(
            f"worst-case model needs F_Z + F_X >= 1, got F_Z={s.F_Z:.4f} F_X={s.F_X:.4f}"
        )
    values = np.zeros((s.dim, s.dim))
    values[1:, 0] = s.p_z[1:]
    values[0, 1:] = s.p_x[1:]
    values[0, 0] = max(0.0, lower)
    return DiagonalChi(s.n_qubits, values, WORST_CASE, _mass_note(s))


def _reciprocal(one_minus_f: float, eps_fid: float) -> float:
    return 0.0 if one_minus_f < eps_fid else 1.0 / one_minus_f


def cross_term_coefficient(s: ComplementarySummary, eps_fid: float = EPS_FID, printed_coefficient: bool = False) -> float:
    """Scale c of the uncorrelated-error cross terms c·η_Z(f_z)·η_X(f_x).

    The marginal-consistent prefactor is (d-1)/(2d). printed_coefficient=True
    uses (d-1)/d instead, which doubles every cross term and breaks the
    row and column sums.
    """
    d = s.dim
    prefactor = (d - 1) / d if printed_coefficient else (d - 1) / (2 * d)
    return prefactor * (_reciprocal(1.0 - s.F_Z, eps_fid) + _reciprocal(1.0 - s.F_X, eps_fid))


def process_fidelity_estimate(s: ComplementarySummary) -> float:
    d = s.dim
    return (1.0 + 1.0 / d) * (s.F_Z + s.F_X) / 2.0 - 1.0 / d


def _clamp(values: np.ndarray, s: ComplementarySummary) -> List[str]:
    notes = []
    for f_z, f_x in zip(*np.nonzero(values < 0)):
        notes.append(f"clamped chi({f_z},{f_x}) = {values[f_z, f_x]:.4e} to 0")
    values[values < 0] = 0.0
    if values.sum() <= 0:
        raise InfeasibleSummaryError("statistical model has no positive mass left after clamping")
    values /= values.sum()
    rows = values.sum(axis=1) - s.p_z
    cols = values.sum(axis=0) - s.p_x
    for f in np.flatnonzero(np.abs(rows) > CHI_TOLERANCE):
        notes.append(f"Z marginal f_z={f} violated by {rows[f]:+.4e}")
    for f in np.flatnonzero(np.abs(cols) > CHI_TOLERANCE):
        notes.append(f"X marginal f_x={f} violated by {cols[f]:+.4e}")
    return notes


def statistical_chi(s: ComplementarySummary, eps_fid: float = EPS_FID, printed_coefficient: bool = False) -> DiagonalChi:
    """Uncorrelated Z and X errors: cross terms proportional to η_Z(f_z)·η_X(f_x).

    Negative entries (possible when F_Z and F_X are very different) are set to
    zero and the matrix is rescaled to unit mass; the result is tagged
    clamped-statistical and the violated marginals are listed in diagnostics.
    """
    d = s.dim
    F_Z, F_X = s.F_Z, s.F_X
    c = cross_term_coefficient(s, eps_fid)
    # printed prefactor applies to the cross terms only
    c_cross = cross_term_coefficient(s, eps_fid, printed_coefficient)
    values = np.zeros((d, d))
    values[1:, 1:] = c_cross * np.outer(s.p_z[1:], s.p_x[1:])
    values[1:, 0] = s.p_z[1:] * (1.0 - c * (1.0 - F_X))
    values[0, 1:] = s.p_x[1:] * (1.0 - c * (1.0 - F_Z))
    values[0, 0] = F_Z + F_X - 1.0 + c * (1.0 - F_Z) * (1.0 - F_X)

    diagnostics = _mass_note(s)
    closed_form = process_fidelity_estimate(s)
    if abs(values[0, 0] - closed_form) > CHI_TOLERANCE:
        diagnostics.append(
            f"a complementary fidelity is within {eps_fid:g} of 1: chi(0,0) = {values[0, 0]:.6f} "
            f"keeps the marginals instead of the uniform-error estimate {closed_form:.6f}"
        )
    tag = STATISTICAL
    if printed_coefficient:
        tag = CUSTOM
        diagnostics.append("cross terms use the (d-1)/d prefactor")
        diagnostics.extend(DiagonalChi(s.n_qubits, values.copy(), CUSTOM).problems(s))
    elif np.any(values < 0):
        tag = CLAMPED_STATISTICAL
        diagnostics.extend(_clamp(values, s))
        log.warning("statistical model has negative entries for F_Z=%.4f F_X=%.4f; clamped", F_Z, F_X)
    return DiagonalChi(s.n_qubits, values, tag, diagnostics)


def unobservable_error_share(d: int) -> float:
    """Probability that a uniformly random state is insensitive to a given error."""
    return 1.0 / (d + 1)


def average_fidelity_from_process(F_qp: float, d: int) -> float:
    if d < 2:
        raise ChiMapperError(f"dimension must be at least 2, got {d}")
    if not -EPS_FID <= F_qp <= 1.0 + EPS_FID:
        raise ChiMapperError(f"process fidelity must lie in [0, 1], got {F_qp}")
    # the error goes unnoticed on a random state with probability 1/(d+1)
    return F_qp + (1.0 - F_qp) * unobservable_error_share(d)


def complementary_average(s: ComplementarySummary) -> float:
    return (s.F_Z + s.F_X) / 2.0

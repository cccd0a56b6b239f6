"""Complementary error tables and their averaged summaries.

Row n of the Z table holds p(f_z | Z_n): the outcome distribution, indexed by
flip pattern f_z, of the run whose ideal output is |Z_n>. The X table is laid
out the same way for the X-basis runs. Row and column labels are binary,
qubit 1 leftmost.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from .errors import TableValidationError
from .io_utils import load_json
from .pauli import MAX_QUBITS

log = logging.getLogger(__name__)

DEFAULT_ROW_TOLERANCE = 2e-3
STRICT_ROW_TOLERANCE = 1e-9
SUMMARY_TOLERANCE = 2e-3
RENORMALIZED_FLAG = "rows renormalized"


class TableDocument(BaseModel):
    n_qubits: int = Field(ge=1, le=MAX_QUBITS)
    z_table: List[List[float]]
    x_table: List[List[float]]
    metadata: Optional[str] = None


def bit_label(value: int, n_qubits: int) -> str:
    return format(value, f"0{n_qubits}b")


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass
class ErrorTableSet:
    n_qubits: int
    z_table: np.ndarray
    x_table: np.ndarray
    metadata: str = ""

    def __post_init__(self):
        self.z_table = np.asarray(self.z_table, dtype=float)
        self.x_table = np.asarray(self.x_table, dtype=float)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def to_document(self) -> Dict[str, Any]:
        return {
            "n_qubits": self.n_qubits,
            "z_table": self.z_table.tolist(),
            "x_table": self.x_table.tolist(),
            "metadata": self.metadata,
        }


@dataclass
class ComplementarySummary:
    n_qubits: int
    p_z: np.ndarray
    p_x: np.ndarray
    notes: List[str] = field(default_factory=list)
    tolerance: float = SUMMARY_TOLERANCE

    def __post_init__(self):
        self.p_z = np.asarray(self.p_z, dtype=float)
        self.p_x = np.asarray(self.p_x, dtype=float)
        dim = self.dim
        if self.p_z.shape != (dim,) or self.p_x.shape != (dim,):
            raise TableValidationError(
                f"summary vectors must have length {dim}, got {self.p_z.shape} and {self.p_x.shape}"
            )
        for name, vec in (("p_z", self.p_z), ("p_x", self.p_x)):
            if np.any(vec < -1e-12):
                raise TableValidationError(f"summary {name} has negative entries: {vec.tolist()}")
            dev = abs(float(vec.sum()) - 1.0)
            if dev > self.tolerance:
                raise TableValidationError(f"summary {name} sums to {vec.sum():.6f} (deviation {dev:.1e})")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def F_Z(self) -> float:
        return float(self.p_z[0])

    @property
    def F_X(self) -> float:
        return float(self.p_x[0])

    def eta_z(self, f_z: int) -> float:
        return float(self.p_z[f_z])

    def eta_x(self, f_x: int) -> float:
        return float(self.p_x[f_x])

    @property
    def mass_deviation(self) -> float:
        return max(abs(float(self.p_z.sum()) - 1.0), abs(float(self.p_x.sum()) - 1.0))

    def rounded(self, decimals: int = 3) -> "ComplementarySummary":
        return replace(
            self,
            p_z=np.round(self.p_z, decimals),
            p_x=np.round(self.p_x, decimals),
            notes=self.notes + [f"summaries rounded to {decimals} decimals"],
            # each entry moves by at most half a unit in the last kept decimal
            tolerance=self.tolerance + self.dim * 0.5 * 10.0 ** -decimals,
        )

    @classmethod
    def from_fidelities(
        cls,
        n_qubits: int,
        F_Z: float,
        F_X: float,
        eta_z: Optional[List[float]] = None,
        eta_x: Optional[List[float]] = None,
    ) -> "ComplementarySummary":
        """Build a summary from fidelities; missing error vectors spread the rest evenly."""
        dim = 1 << n_qubits

        def vec(fid, etas):
            if etas is None:
                etas = [(1.0 - fid) / (dim - 1)] * (dim - 1)
            return np.array([fid, *etas], dtype=float)

        return cls(n_qubits, vec(F_Z, eta_z), vec(F_X, eta_x))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_qubits": self.n_qubits,
            "F_Z": self.F_Z,
            "F_X": self.F_X,
            "p_z": self.p_z.tolist(),
            "p_x": self.p_x.tolist(),
        }


def _check_table(name: str, prefix: str, table: np.ndarray, n_qubits: int, row_tolerance: float) -> None:
    dim = 1 << n_qubits
    if table.ndim != 2 or not _is_power_of_two(table.shape[0]):
        raise TableValidationError(f"{name}: dimension {table.shape[0] if table.ndim else 0} is not a power of two")
    if table.shape != (dim, dim):
        raise TableValidationError(f"{name}: expected a {dim}x{dim} table for {n_qubits} qubits, got {table.shape}")
    if not np.all(np.isfinite(table)):
        raise TableValidationError(f"{name}: non-finite entries")
    for row in range(dim):
        label = f"{prefix}={bit_label(row, n_qubits)}"
        if np.any(table[row] < 0):
            col = int(np.argmin(table[row]))
            raise TableValidationError(f"{name} row {label}: negative entry {table[row, col]} at f={col}")
        if np.any(table[row] > 1):
            col = int(np.argmax(table[row]))
            raise TableValidationError(f"{name} row {label}: entry {table[row, col]} at f={col} exceeds 1")
        dev = float(table[row].sum()) - 1.0
        if abs(dev) > row_tolerance:
            raise TableValidationError(
                f"{name} row {label}: row sum deviates from 1 by {dev:+.3e} (tolerance {row_tolerance:.0e})"
            )
        if abs(dev) > 1e-12:
            log.debug("%s row %s accepted with row-sum deviation %+.3e", name, label, dev)


def validate_tables(t: ErrorTableSet, row_tolerance: float = DEFAULT_ROW_TOLERANCE) -> ErrorTableSet:
    if not 1 <= t.n_qubits <= MAX_QUBITS:
        raise TableValidationError(f"n_qubits must be in 1..{MAX_QUBITS}, got {t.n_qubits}")
    _check_table("z_table", "Z_n", t.z_table, t.n_qubits, row_tolerance)
    _check_table("x_table", "X_k", t.x_table, t.n_qubits, row_tolerance)
    return t


def parse_tables(
    document: Union[str, bytes, Mapping[str, Any]],
    row_tolerance: float = DEFAULT_ROW_TOLERANCE,
) -> ErrorTableSet:
    try:
        if isinstance(document, (str, bytes)):
            doc = TableDocument.model_validate_json(document)
        else:
            doc = TableDocument.model_validate(document)
    except ValidationError as e:
        raise TableValidationError(f"error table document does not match the schema: {e}") from e
    for name, rows in (("z_table", doc.z_table), ("x_table", doc.x_table)):
        if not _is_power_of_two(len(rows)):
            raise TableValidationError(f"{name}: dimension {len(rows)} is not a power of two")
        if any(len(r) != len(rows) for r in rows):
            raise TableValidationError(f"{name}: table is not square")
    t = ErrorTableSet(doc.n_qubits, np.array(doc.z_table), np.array(doc.x_table), doc.metadata or "")
    return validate_tables(t, row_tolerance)


def load_tables(path, row_tolerance: float = DEFAULT_ROW_TOLERANCE) -> ErrorTableSet:
    try:
        raw = load_json(path)
    except ValueError as e:
        raise TableValidationError(f"{path}: not valid JSON ({e})") from e
    return parse_tables(raw, row_tolerance)


def identity_tables(n_qubits: int, metadata: str = "ideal operation") -> ErrorTableSet:
    dim = 1 << n_qubits
    table = np.zeros((dim, dim))
    table[:, 0] = 1.0
    return ErrorTableSet(n_qubits, table, table.copy(), metadata)


def summarize(t: ErrorTableSet, row_tolerance: float = 0.0) -> ComplementarySummary:
    """Column means of both tables.

    A column mean sums to the mean row sum, so the summary accepts the same
    mass deviation the rows were validated with.
    """
    tolerance = max(SUMMARY_TOLERANCE, row_tolerance)
    return ComplementarySummary(
        t.n_qubits, t.z_table.mean(axis=0), t.x_table.mean(axis=0), tolerance=tolerance
    )


def renormalize_rows(t: ErrorTableSet) -> ErrorTableSet:
    tables = []
    for name, table in (("z_table", t.z_table), ("x_table", t.x_table)):
        sums = table.sum(axis=1)
        zero = np.flatnonzero(sums <= 0)
        if zero.size:
            raise TableValidationError(
                f"{name} row {bit_label(int(zero[0]), t.n_qubits)} sums to zero and cannot be renormalized"
            )
        tables.append(table / sums[:, None])
    meta = t.metadata
    if RENORMALIZED_FLAG not in meta:
        meta = f"{meta}; {RENORMALIZED_FLAG}" if meta else RENORMALIZED_FLAG
    log.info("renormalized table rows")
    return ErrorTableSet(t.n_qubits, tables[0], tables[1], meta)

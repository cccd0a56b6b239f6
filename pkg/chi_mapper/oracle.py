"""Dense simulation of the process-matrix channel.

    rho_out = sum_ij chi_ij  L_i U rho U^dag L_j

L_i runs over the N-qubit Pauli matrices ordered by the linear error index
i = f_z·d + f_x. Everything here is exact linear algebra on d x d matrices
(d = 2^N, N <= 5), used to generate synthetic error tables and to check every
closed-form relation of the analysis modules against brute force.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError
from tqdm import tqdm

from .errors import DimensionMismatchError, InvalidProcessError, OracleSizeError
from .io_utils import load_json
from .noise import DiagonalChi, chi_from_document
from .pauli import PauliLabel, StabilizerTarget, pauli_of_index, parity
from .tables import ErrorTableSet

log = logging.getLogger(__name__)

MAX_ORACLE_QUBITS = 5
ORACLE_TOLERANCE = 1e-10

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_size(n_qubits: int) -> None:
    if n_qubits > MAX_ORACLE_QUBITS:
        raise OracleSizeError(f"oracle supports at most {MAX_ORACLE_QUBITS} qubits, got {n_qubits}")


def pauli_matrix(p: PauliLabel) -> np.ndarray:
    _check_size(p.n_qubits)
    return reduce(np.kron, (PAULI_1Q[c] for c in p.components()))


@lru_cache(maxsize=None)
def _basis(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    ops = np.empty((dim * dim, dim, dim), dtype=complex)
    for i in range(dim * dim):
        ops[i] = pauli_matrix(pauli_of_index((i // dim, i % dim), n_qubits))
    ops.setflags(write=False)
    return ops


def pauli_basis(n_qubits: int) -> np.ndarray:
    """All d² Pauli matrices stacked in linear error-index order."""
    _check_size(n_qubits)
    return _basis(n_qubits)


@lru_cache(maxsize=None)
def _x_basis(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    signs = np.array([[(-1) ** parity(k & m) for k in range(dim)] for m in range(dim)], dtype=complex)
    out = signs / np.sqrt(dim)
    out.setflags(write=False)
    return out


def x_basis(n_qubits: int) -> np.ndarray:
    """Columns are |X_k> = 2^(-N/2) sum_m (-1)^parity(k&m) |m>."""
    _check_size(n_qubits)
    return _x_basis(n_qubits)


@dataclass
class FullProcessMatrix:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        _check_size(self.n_qubits)
        self.entries = np.asarray(self.entries, dtype=complex)
        size = 1 << (2 * self.n_qubits)
        if self.entries.shape != (size, size):
            raise DimensionMismatchError(f"process matrix must be {size}x{size}, got {self.entries.shape}")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def is_diagonal(self) -> bool:
        return not np.any(self.entries - np.diag(np.diag(self.entries)))

    def diagonal(self) -> np.ndarray:
        """Diagonal reshaped to the d x d [f_z][f_x] layout of a DiagonalChi."""
        return np.real(np.diag(self.entries)).reshape(self.dim, self.dim)

    def validate(self, tolerance: float = ORACLE_TOLERANCE) -> "FullProcessMatrix":
        chi = self.entries
        herm = float(np.max(np.abs(chi - chi.conj().T)))
        if herm > tolerance:
            raise InvalidProcessError(f"process matrix is not Hermitian (max deviation {herm:.3e})")
        trace = complex(np.trace(chi))
        if abs(trace - 1.0) > tolerance:
            raise InvalidProcessError(f"process matrix trace is {trace.real:.12f}{trace.imag:+.3e}j, expected 1")
        lowest = float(np.linalg.eigvalsh((chi + chi.conj().T) / 2)[0])
        if lowest < -tolerance:
            raise InvalidProcessError(f"process matrix is not positive semidefinite (eigenvalue {lowest:.3e})")
        ops = pauli_basis(self.n_qubits)
        # sum_ij chi_ij L_j L_i must be the identity
        weighted = np.tensordot(chi, ops, axes=(1, 0))
        tp = np.einsum("iab,ibc->ac", weighted, ops)
        dev = float(np.max(np.abs(tp - np.eye(self.dim))))
        if dev > tolerance:
            raise InvalidProcessError(f"process matrix is not trace preserving (max deviation {dev:.3e})")
        return self

    @classmethod
    def from_diagonal(cls, chi: Union[DiagonalChi, np.ndarray], n_qubits: Optional[int] = None) -> "FullProcessMatrix":
        if isinstance(chi, DiagonalChi):
            n_qubits, values = chi.n_qubits, chi.values
        else:
            values = np.asarray(chi, dtype=float)
            n_qubits = n_qubits if n_qubits is not None else int(np.log2(values.shape[0]))
        return cls(n_qubits, np.diag(np.asarray(values, dtype=complex).reshape(-1)))

    @classmethod
    def ideal(cls, n_qubits: int) -> "FullProcessMatrix":
        values = np.zeros((1 << n_qubits, 1 << n_qubits))
        values[0, 0] = 1.0
        return cls.from_diagonal(values, n_qubits)

    def to_document(self) -> Dict[str, Any]:
        return {
            "n_qubits": self.n_qubits,
            "entries_re": np.real(self.entries).tolist(),
            "entries_im": np.imag(self.entries).tolist(),
        }


class FullChiDocument(BaseModel):
    n_qubits: int = Field(ge=1, le=MAX_ORACLE_QUBITS)
    entries_re: List[List[float]]
    entries_im: Optional[List[List[float]]] = None


class GateDocument(BaseModel):
    re: List[List[float]]
    im: Optional[List[List[float]]] = None


def process_from_document(document: Mapping[str, Any]) -> FullProcessMatrix:
    """Accept either the full form (entries_re/entries_im) or a DiagonalChi document."""
    if isinstance(document, Mapping) and "entries_re" in document:
        try:
            doc = FullChiDocument.model_validate(document)
        except ValidationError as e:
            raise InvalidProcessError(f"process matrix document does not match the schema: {e}") from e
        re = np.array(doc.entries_re, dtype=float)
        im = np.array(doc.entries_im, dtype=float) if doc.entries_im is not None else np.zeros_like(re)
        if re.shape != im.shape:
            raise InvalidProcessError(f"entries_re {re.shape} and entries_im {im.shape} differ in shape")
        proc = FullProcessMatrix(doc.n_qubits, re + 1j * im)
    else:
        proc = FullProcessMatrix.from_diagonal(chi_from_document(document, mass_tolerance=ORACLE_TOLERANCE))
    try:
        return proc.validate()
    except InvalidProcessError as e:
        log.debug("process matrix rejected: %s", e)
        raise


def load_process(path) -> FullProcessMatrix:
    return process_from_document(load_json(path))


@dataclass
class GateSpec:
    kind: str  # identity | cnot | custom
    unitary: np.ndarray

    def __post_init__(self):
        self.unitary = np.asarray(self.unitary, dtype=complex)
        dim = self.unitary.shape[0]
        if self.unitary.shape != (dim, dim) or dim < 2 or dim & (dim - 1):
            raise DimensionMismatchError(f"gate must be a 2^N x 2^N matrix, got {self.unitary.shape}")
        dev = float(np.max(np.abs(self.unitary @ self.unitary.conj().T - np.eye(dim))))
        if dev > ORACLE_TOLERANCE:
            raise InvalidProcessError(f"gate {self.kind!r} is not unitary (U U^dag deviates by {dev:.3e})")

    @property
    def n_qubits(self) -> int:
        return self.unitary.shape[0].bit_length() - 1

    @classmethod
    def identity(cls, n_qubits: int) -> "GateSpec":
        _check_size(n_qubits)
        return cls("identity", np.eye(1 << n_qubits))

    @classmethod
    def cnot(cls, n_qubits: int = 2) -> "GateSpec":
        """Control qubit 1 (MSB), target qubit 2; other qubits untouched."""
        if n_qubits < 2:
            raise DimensionMismatchError("cnot needs at least 2 qubits")
        _check_size(n_qubits)
        dim = 1 << n_qubits
        control, target = 1 << (n_qubits - 1), 1 << (n_qubits - 2)
        u = np.zeros((dim, dim))
        for m in range(dim):
            u[m ^ target if m & control else m, m] = 1.0
        return cls("cnot", u)

    @classmethod
    def custom(cls, unitary: np.ndarray) -> "GateSpec":
        return cls("custom", unitary)

    @classmethod
    def parse(cls, text: str, n_qubits: int) -> "GateSpec":
        """identity | cnot | custom:<file with {"re": [[...]], "im": [[...]]}>."""
        if text == "identity":
            return cls.identity(n_qubits)
        if text == "cnot":
            return cls.cnot(n_qubits)
        if text.startswith("custom:"):
            try:
                doc = GateDocument.model_validate(load_json(text[len("custom:"):]))
            except ValidationError as e:
                raise InvalidProcessError(f"custom gate document does not match the schema: {e}") from e
            re = np.array(doc.re, dtype=float)
            im = np.array(doc.im, dtype=float) if doc.im is not None else np.zeros_like(re)
            if re.shape != im.shape:
                raise DimensionMismatchError(f"gate re {re.shape} and im {im.shape} differ in shape")
            gate = cls.custom(re + 1j * im)
            if gate.n_qubits != n_qubits:
                raise DimensionMismatchError(f"custom gate acts on {gate.n_qubits} qubits, chi on {n_qubits}")
            return gate
        raise InvalidProcessError(f"unknown gate {text!r}; use identity, cnot or custom:<file>")


def check_density(rho: np.ndarray, tolerance: float = ORACLE_TOLERANCE) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T)) > tolerance:
        raise InvalidProcessError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tolerance:
        raise InvalidProcessError(f"density matrix trace is {np.trace(rho).real:.12f}")
    if np.linalg.eigvalsh(rho)[0] < -tolerance:
        raise InvalidProcessError("density matrix is not positive semidefinite")
    return rho


def pure_density(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    state = state / np.linalg.norm(state)
    return np.outer(state, state.conj())


def _check_dims(chi: FullProcessMatrix, g: GateSpec, dim: int) -> None:
    if g.unitary.shape[0] != chi.dim or dim != chi.dim:
        raise DimensionMismatchError(
            f"dimension mismatch: chi d={chi.dim}, gate d={g.unitary.shape[0]}, state d={dim}"
        )


def apply_process(chi: FullProcessMatrix, g: GateSpec, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    _check_dims(chi, g, rho.shape[0])
    ops = pauli_basis(chi.n_qubits)
    u = g.unitary
    sigma = u @ rho @ u.conj().T
    if chi.is_diagonal:
        weights = np.diag(chi.entries)
        return np.einsum("i,iab,bc,icd->ad", weights, ops, sigma, ops, optimize=True)
    # B_i = sum_j chi_ij L_j, so rho_out = sum_i L_i sigma B_i
    right = np.tensordot(chi.entries, ops, axes=(1, 0))
    return np.einsum("iab,bc,icd->ad", ops, sigma, right, optimize=True)


def generate_tables(chi: FullProcessMatrix, g: GateSpec, metadata: str = "") -> ErrorTableSet:
    n = chi.n_qubits
    dim = chi.dim
    _check_dims(chi, g, dim)
    u_dag = g.unitary.conj().T
    xb = x_basis(n)
    z_table = np.zeros((dim, dim))
    x_table = np.zeros((dim, dim))
    for row in range(dim):
        # Z run: input U^dag|Z_n>, outcome m has flip pattern n XOR m
        z_in = u_dag[:, row]
        out = apply_process(chi, g, np.outer(z_in, z_in.conj()))
        probs = np.real(np.diag(out))
        for f in range(dim):
            z_table[row, f] = probs[row ^ f]
        # X run: input U^dag|X_k>, probabilities read in the X basis
        x_in = u_dag @ xb[:, row]
        out = apply_process(chi, g, np.outer(x_in, x_in.conj()))
        probs = np.real(np.einsum("ak,ab,bk->k", xb.conj(), out, xb))
        for f in range(dim):
            x_table[row, f] = probs[row ^ f]
    z_table = np.clip(z_table, 0.0, 1.0)
    x_table = np.clip(x_table, 0.0, 1.0)
    return ErrorTableSet(n, z_table, x_table, metadata or f"simulated, gate={g.kind}")


def sample_tables(t: ErrorTableSet, shots_per_input: int, seed: int) -> ErrorTableSet:
    """Replace each row by multinomial frequencies; row r of table k draws from stream (seed, k, r)."""
    if shots_per_input < 1:
        raise InvalidProcessError(f"shots_per_input must be >= 1, got {shots_per_input}")
    log.debug("sampling %d shots per input with seed %d", shots_per_input, seed)
    sampled = []
    for which, table in enumerate((t.z_table, t.x_table)):
        rows = np.empty_like(table)
        for r in range(table.shape[0]):
            rng = np.random.default_rng([seed, which, r])
            p = np.clip(table[r], 0.0, None)
            counts = rng.multinomial(shots_per_input, p / p.sum())
            rows[r] = counts / shots_per_input
        sampled.append(rows)
    meta = f"{t.metadata}; sampled {shots_per_input} shots/input, seed {seed}".lstrip("; ")
    return ErrorTableSet(t.n_qubits, sampled[0], sampled[1], meta)


def state_fidelity_oracle(chi: FullProcessMatrix, g: GateSpec, rho_in: np.ndarray, ideal_output: np.ndarray) -> float:
    ideal = np.asarray(ideal_output, dtype=complex)
    if ideal.shape != (chi.dim,):
        raise DimensionMismatchError(f"ideal output must have length {chi.dim}, got {ideal.shape}")
    out = apply_process(chi, g, rho_in)
    return float(np.real(ideal.conj() @ out @ ideal))


def haar_states(n_qubits: int, samples: int, seed: int) -> np.ndarray:
    """Haar-random pure states as rows: normalized complex Gaussian vectors."""
    rng = np.random.default_rng(seed)
    dim = 1 << n_qubits
    v = rng.standard_normal((samples, dim)) + 1j * rng.standard_normal((samples, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def haar_fidelity_samples(
    chi: FullProcessMatrix,
    g: GateSpec,
    samples: int,
    seed: int,
    chunk: int = 4096,
    progress: bool = False,
) -> np.ndarray:
    """Per-state fidelities <psi|E(|phi><phi|)|psi> with psi = U phi.

    For a pure input the output overlap reduces to a^T chi a with
    a_i = <psi|L_i|psi>, so each chunk is evaluated in one einsum.
    """
    if samples < 1:
        raise InvalidProcessError(f"samples must be >= 1, got {samples}")
    _check_dims(chi, g, chi.dim)
    ops = pauli_basis(chi.n_qubits)
    phis = haar_states(chi.n_qubits, samples, seed)
    psis = phis @ g.unitary.T
    out = np.empty(samples)
    for start in tqdm(range(0, samples, chunk), disable=not progress, desc="haar", unit="chunk"):
        psi = psis[start:start + chunk]
        a = np.einsum("sa,iab,sb->si", psi.conj(), ops, psi)
        out[start:start + chunk] = np.real(np.einsum("si,ij,sj->s", a.conj(), chi.entries, a))
    return out


def haar_average_fidelity(chi: FullProcessMatrix, g: GateSpec, samples: int, seed: int, progress: bool = False) -> float:
    return float(haar_fidelity_samples(chi, g, samples, seed, progress=progress).mean())


def stabilized_inputs(t: StabilizerTarget, g: GateSpec) -> List[Dict[str, np.ndarray]]:
    """The d joint eigenstates of a target's stabilizer group, as inputs and ideal outputs.

    Ideal outputs are the common eigenvectors of the group's Pauli matrices;
    inputs are U^dag applied to them.
    """
    dim = 1 << t.n_qubits
    mats = [pauli_matrix(pauli_of_index(i, t.n_qubits)) for i in t.sorted_members()]
    rng = np.random.default_rng(0)
    weights = rng.standard_normal(len(mats))
    # a generic real combination has non-degenerate spectrum on the joint eigenbasis
    combo = sum(w * m for w, m in zip(weights, mats))
    _, vecs = np.linalg.eigh(combo)
    u_dag = g.unitary.conj().T
    return [{"input": u_dag @ vecs[:, k], "ideal": vecs[:, k]} for k in range(dim)]

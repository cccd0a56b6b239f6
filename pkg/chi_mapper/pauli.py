"""Pauli error operators as bit-mask pairs.

Bit ordering: qubit 1 (the leftmost factor of a tensor product, the first
character of a Pauli string) is the MOST significant bit of every mask.
I⊗X⊗Y therefore has x_mask = 0b011 and z_mask = 0b001.

An error index (f_z, f_x) names the flip pattern an error leaves in the Z
basis and in the X basis. X and Y components flip Z-basis bits, Z and Y
components flip X-basis bits, so f_z = x_mask and f_x = z_mask.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from .errors import DimensionMismatchError, InvalidIndexError, InvalidPauliError

MAX_QUBITS = 16

# (x, z) component bits per character
_CHAR_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_CHAR = {v: k for k, v in _CHAR_BITS.items()}


def parity(value: int) -> int:
    return bin(value).count("1") & 1


def _check_n_qubits(n_qubits: int) -> None:
    if not isinstance(n_qubits, int) or not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidPauliError(f"n_qubits must be an integer in 1..{MAX_QUBITS}, got {n_qubits!r}")


def _fits(mask: int, n_qubits: int) -> bool:
    return 0 <= mask < (1 << n_qubits)


@dataclass(frozen=True)
class PauliLabel:
    n_qubits: int
    x_mask: int
    z_mask: int

    def __post_init__(self):
        _check_n_qubits(self.n_qubits)
        if not (_fits(self.x_mask, self.n_qubits) and _fits(self.z_mask, self.n_qubits)):
            raise InvalidPauliError(
                f"masks x={self.x_mask} z={self.z_mask} do not fit in {self.n_qubits} bits"
            )

    @classmethod
    def from_string(cls, text: str) -> "PauliLabel":
        """Parse "IXY"-style text, one character per qubit, qubit 1 first."""
        s = text.strip().upper() if isinstance(text, str) else ""
        if not s:
            raise InvalidPauliError(f"empty Pauli string: {text!r}")
        bad = sorted({c for c in s if c not in _CHAR_BITS})
        if bad:
            raise InvalidPauliError(f"Pauli string {text!r} has invalid characters {bad}")
        n = len(s)
        x_mask = z_mask = 0
        for pos, ch in enumerate(s):
            bit = n - 1 - pos
            x, z = _CHAR_BITS[ch]
            x_mask |= x << bit
            z_mask |= z << bit
        return cls(n, x_mask, z_mask)

    def components(self) -> str:
        out = []
        for pos in range(self.n_qubits):
            bit = self.n_qubits - 1 - pos
            out.append(_BITS_CHAR[((self.x_mask >> bit) & 1, (self.z_mask >> bit) & 1)])
        return "".join(out)

    def __str__(self) -> str:
        return self.components()


@dataclass(frozen=True, order=True)
class ErrorIndex:
    f_z: int
    f_x: int

    def __post_init__(self):
        if self.f_z < 0 or self.f_x < 0:
            raise InvalidIndexError(f"error index components must be non-negative: {self}")

    def fits(self, n_qubits: int) -> bool:
        return _fits(self.f_z, n_qubits) and _fits(self.f_x, n_qubits)

    def linear(self, dim: int) -> int:
        """Position in the d²-element operator basis, f_z·d + f_x."""
        return self.f_z * dim + self.f_x

    @classmethod
    def from_linear(cls, i: int, dim: int) -> "ErrorIndex":
        return cls(i // dim, i % dim)

    def as_tuple(self) -> Tuple[int, int]:
        return self.f_z, self.f_x


IDENTITY = ErrorIndex(0, 0)

IndexLike = Union[ErrorIndex, Tuple[int, int]]


def as_index(value: IndexLike) -> ErrorIndex:
    if isinstance(value, ErrorIndex):
        return value
    f_z, f_x = value
    return ErrorIndex(int(f_z), int(f_x))


def error_index_of(p: PauliLabel) -> ErrorIndex:
    return ErrorIndex(p.x_mask, p.z_mask)


def pauli_of_index(idx: IndexLike, n_qubits: int) -> PauliLabel:
    idx = as_index(idx)
    _check_n_qubits(n_qubits)
    if not idx.fits(n_qubits):
        raise InvalidIndexError(f"index {idx.as_tuple()} does not fit in {n_qubits} qubits")
    return PauliLabel(n_qubits, x_mask=idx.f_z, z_mask=idx.f_x)


def index_of_string(text: str) -> ErrorIndex:
    return error_index_of(PauliLabel.from_string(text))


def _check_pair(a: ErrorIndex, b: ErrorIndex, n_qubits: Optional[int]) -> None:
    if n_qubits is None:
        return
    for idx in (a, b):
        if not idx.fits(n_qubits):
            raise DimensionMismatchError(f"index {idx.as_tuple()} does not fit in {n_qubits} qubits")


def product_index(a: IndexLike, b: IndexLike, n_qubits: Optional[int] = None) -> ErrorIndex:
    """Pauli product modulo phase: componentwise XOR of the masks."""
    a, b = as_index(a), as_index(b)
    _check_pair(a, b, n_qubits)
    return ErrorIndex(a.f_z ^ b.f_z, a.f_x ^ b.f_x)


def commutes(a: IndexLike, b: IndexLike, n_qubits: Optional[int] = None) -> bool:
    a, b = as_index(a), as_index(b)
    _check_pair(a, b, n_qubits)
    return parity(a.f_z & b.f_x) == parity(a.f_x & b.f_z)


def all_indices(n_qubits: int) -> Iterator[ErrorIndex]:
    dim = 1 << n_qubits
    for f_z in range(dim):
        for f_x in range(dim):
            yield ErrorIndex(f_z, f_x)


@dataclass(frozen=True)
class StabilizerTarget:
    name: str
    n_qubits: int
    members: FrozenSet[ErrorIndex]

    @classmethod
    def from_indices(cls, name: str, n_qubits: int, indices: Iterable[IndexLike]) -> "StabilizerTarget":
        return cls(name, n_qubits, frozenset(as_index(i) for i in indices))

    @classmethod
    def from_paulis(cls, name: str, paulis: Iterable[str]) -> "StabilizerTarget":
        labels = [PauliLabel.from_string(p) for p in paulis]
        if not labels:
            raise InvalidPauliError(f"target {name!r} lists no Pauli strings")
        sizes = {p.n_qubits for p in labels}
        if len(sizes) != 1:
            raise DimensionMismatchError(f"target {name!r} mixes Pauli strings of lengths {sorted(sizes)}")
        return cls(name, sizes.pop(), frozenset(error_index_of(p) for p in labels))

    def sorted_members(self) -> List[ErrorIndex]:
        return sorted(self.members)

    def paulis(self) -> List[str]:
        return [str(pauli_of_index(i, self.n_qubits)) for i in self.sorted_members()]


@dataclass(frozen=True)
class Violation:
    kind: str  # size | identity | overflow | closure | commutation
    detail: str
    pair: Optional[Tuple[ErrorIndex, ErrorIndex]] = None


def validate_target(t: StabilizerTarget) -> List[Violation]:
    """Check a target's stabilizer-group invariants. Empty list means valid."""
    out: List[Violation] = []
    dim = 1 << t.n_qubits
    members = t.members
    if len(members) != dim:
        out.append(Violation("size", f"{t.name}: expected {dim} members, found {len(members)}"))
    if IDENTITY not in members:
        out.append(Violation("identity", f"{t.name}: identity (0,0) missing"))
    for idx in sorted(members):
        if not idx.fits(t.n_qubits):
            out.append(Violation("overflow", f"{t.name}: {idx.as_tuple()} does not fit in {t.n_qubits} qubits"))
    ordered = sorted(members)
    for a, b in combinations(ordered, 2):
        prod = product_index(a, b)
        if prod not in members:
            out.append(Violation(
                "closure",
                f"{t.name}: product of {a.as_tuple()} and {b.as_tuple()} is {prod.as_tuple()}, not a member",
                (a, b),
            ))
        if not commutes(a, b):
            out.append(Violation(
                "commutation",
                f"{t.name}: {a.as_tuple()} and {b.as_tuple()} anticommute",
                (a, b),
            ))
    return out

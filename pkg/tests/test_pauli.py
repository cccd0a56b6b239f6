from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from chi_mapper.errors import DimensionMismatchError, InvalidIndexError, InvalidPauliError
from chi_mapper.pauli import (
    IDENTITY,
    ErrorIndex,
    PauliLabel,
    StabilizerTarget,
    all_indices,
    commutes,
    error_index_of,
    index_of_string,
    pauli_of_index,
    product_index,
    validate_target,
)


def test_error_index_examples():
    assert error_index_of(PauliLabel.from_string("IXY")) == ErrorIndex(3, 1)
    assert error_index_of(PauliLabel.from_string("ZYY")) == ErrorIndex(3, 7)
    assert error_index_of(PauliLabel.from_string("YIY")) == ErrorIndex(5, 5)
    assert error_index_of(PauliLabel.from_string("III")) == ErrorIndex(0, 0)


def test_pauli_of_index_examples():
    assert str(pauli_of_index((3, 1), 3)) == "IXY"
    assert str(pauli_of_index((0, 0), 2)) == "II"


def test_pauli_of_index_overflow():
    with pytest.raises(InvalidIndexError):
        pauli_of_index((4, 0), 2)


def test_parser_rejects_bad_characters():
    with pytest.raises(InvalidPauliError):
        PauliLabel.from_string("IXA")
    with pytest.raises(InvalidPauliError):
        PauliLabel.from_string("")
    assert str(PauliLabel.from_string("ixy")) == "IXY"


def test_label_masks_must_fit():
    with pytest.raises(InvalidPauliError):
        PauliLabel(2, 4, 0)
    with pytest.raises(InvalidPauliError):
        PauliLabel(17, 0, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_roundtrip_exhaustive(n):
    seen = set()
    for idx in all_indices(n):
        p = pauli_of_index(idx, n)
        assert error_index_of(p) == idx
        assert PauliLabel.from_string(str(p)) == p
        seen.add(str(p))
    assert len(seen) == 4 ** n


def test_product_examples():
    assert product_index((3, 0), (0, 3)) == ErrorIndex(3, 3)
    assert product_index((5, 5), (5, 5)) == IDENTITY
    group = [ErrorIndex(0, 0), ErrorIndex(1, 0), ErrorIndex(0, 2), ErrorIndex(1, 2)]
    for a in group:
        for b in group:
            assert product_index(a, b) in group


def test_product_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        product_index((4, 0), (1, 0), n_qubits=2)
    with pytest.raises(DimensionMismatchError):
        commutes((0, 8), (1, 0), n_qubits=3)


@pytest.mark.parametrize("n", [1, 2])
def test_product_group_laws_exhaustive(n):
    idx = list(all_indices(n))
    for a in idx:
        assert product_index(a, IDENTITY) == a
        assert product_index(a, a) == IDENTITY
        for b in idx:
            assert product_index(a, b) == product_index(b, a)
            for c in idx:
                assert product_index(product_index(a, b), c) == product_index(a, product_index(b, c))


index3 = st.builds(ErrorIndex, st.integers(0, 7), st.integers(0, 7))


@given(index3, index3, index3)
def test_product_associative_n3(a, b, c):
    assert product_index(product_index(a, b), c) == product_index(a, product_index(b, c))


@given(index3, index3)
def test_commutes_symmetric_and_reflexive(a, b):
    assert commutes(a, a)
    assert commutes(a, b) == commutes(b, a)
    assert commutes(a, IDENTITY)


def test_commutes_examples():
    assert not commutes((1, 0), (0, 1))
    assert commutes((3, 0), (0, 3))
    assert commutes(index_of_string("XX"), index_of_string("ZZ"))
    assert not commutes(index_of_string("XI"), index_of_string("YI"))


def test_validate_bell_stabilizers():
    t = StabilizerTarget.from_indices("bell", 2, [(0, 0), (3, 0), (0, 3), (3, 3)])
    assert validate_target(t) == []
    assert set(t.paulis()) == {"II", "XX", "ZZ", "YY"}


def test_validate_yy_entangler_from_paulis():
    t = StabilizerTarget.from_paulis("yy", ["II", "ZY", "YX", "XZ"])
    assert t.members == frozenset(ErrorIndex(*x) for x in [(0, 0), (1, 3), (3, 2), (2, 1)])
    assert validate_target(t) == []


def test_validate_reports_anticommuting_pair():
    t = StabilizerTarget.from_indices("bad", 2, [(0, 0), (1, 0), (0, 1), (1, 1)])
    kinds = {v.kind for v in validate_target(t)}
    assert "commutation" in kinds
    bad = [v for v in validate_target(t) if v.kind == "commutation"]
    assert (ErrorIndex(0, 1), ErrorIndex(1, 0)) in [v.pair for v in bad]


def test_validate_reports_missing_identity_and_size():
    t = StabilizerTarget.from_indices("bad", 2, [(3, 0), (0, 3), (3, 3)])
    kinds = {v.kind for v in validate_target(t)}
    assert {"size", "identity"} <= kinds


def test_validate_reports_closure_failure():
    t = StabilizerTarget.from_indices("open", 2, [(0, 0), (1, 0), (2, 0), (0, 3)])
    closure = [v for v in validate_target(t) if v.kind == "closure"]
    assert (ErrorIndex(1, 0), ErrorIndex(2, 0)) in [v.pair for v in closure]


def test_validate_reports_overflow():
    t = StabilizerTarget.from_indices("wide", 1, [(0, 0), (2, 0)])
    assert any(v.kind == "overflow" for v in validate_target(t))


def test_two_qubit_stabilizer_groups_count():
    others = [i for i in all_indices(2) if i != IDENTITY]
    groups = []
    for trio in combinations(others, 3):
        t = StabilizerTarget.from_indices("g", 2, [IDENTITY, *trio])
        if not validate_target(t):
            groups.append(t)
    assert len(groups) == 15


def test_from_paulis_rejects_mixed_lengths():
    with pytest.raises(DimensionMismatchError):
        StabilizerTarget.from_paulis("mixed", ["II", "XXX"])

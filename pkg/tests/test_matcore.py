"""
Matrix substrate: commutators, norms, the eigensolver contract and the
verification gate.
"""

import numpy as np
import pytest

from matcore.decomposition import (
    GENERAL_COMMUTATORS,
    SELF_COMMUTATORS,
    ClaimedBound,
    CommutatorDecomposition,
    make_decomposition,
)
from matcore.errors import InvalidInputError
from matcore.linalg import (
    commutator,
    hermitian_eig,
    operator_norm,
    random_unitary,
    range_projection,
    rank,
    spectral_apply,
)
from matcore.matrices import as_hermitian, matrix_from_json, matrix_to_json
from matcore.verification import BoundCheck, VerificationReport, verify_decomposition


def unit(i, j, n=2):
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


# ===== commutator =====

def test_commutator_of_matrix_units():
    assert np.allclose(commutator(unit(0, 1), unit(1, 0)), np.diag([1.0, -1.0]))


def test_self_bracket_vanishes(rng):
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(commutator(x, x), np.zeros((4, 4)))


def test_commutator_trace_is_zero(rng):
    for n in range(2, 9):
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        bound = 1e-10 * n * (1 + operator_norm(x) * operator_norm(y))
        assert abs(np.trace(commutator(x, y))) <= bound


def test_commutator_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        commutator(np.eye(2), np.eye(3))


# ===== norms =====

@pytest.mark.parametrize("a,expected", [
    (np.diag([3.0, -1.0]), 3.0),
    (np.zeros((3, 3)), 0.0),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), 1.0),
])
def test_operator_norm_examples(a, expected):
    assert operator_norm(a) == pytest.approx(expected, rel=1e-10, abs=1e-12)


def test_operator_norm_unitarily_invariant(rng, trace_zero):
    for n in (2, 5, 9):
        a = trace_zero(n)
        u = random_unitary(n, rng)
        assert operator_norm(u @ a @ u.conj().T) == pytest.approx(operator_norm(a), rel=1e-9)


# ===== eigensolver =====

def test_eig_identity():
    eig = hermitian_eig(np.eye(3))
    assert np.allclose(eig.eigenvalues, [1.0, 1.0, 1.0])
    assert eig.validate(np.eye(3))


def test_eig_diagonal_keeps_standard_basis():
    eig = hermitian_eig(np.diag([-1.0, 2.0]))
    assert np.allclose(eig.eigenvalues, [-1.0, 2.0])
    assert np.allclose(eig.unitary, np.eye(2))


def test_eig_diagonal_ties_keep_index_order():
    eig = hermitian_eig(np.diag([3.0, -1.0, -1.0, -1.0]))
    assert np.allclose(eig.eigenvalues, [-1.0, -1.0, -1.0, 3.0])
    assert np.array_equal(eig.unitary, np.eye(4)[:, [1, 2, 3, 0]])


def test_eig_pauli_x():
    eig = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(eig.eigenvalues, [-1.0, 1.0])


def test_eig_contract_and_phase_convention(trace_zero):
    for n in (2, 6, 12):
        a = trace_zero(n)
        eig = hermitian_eig(a)
        assert eig.validate(a)
        for j in range(n):
            column = eig.unitary[:, j]
            first = column[np.flatnonzero(np.abs(column) > 1e-8)[0]]
            assert abs(first.imag) <= 1e-12
            assert first.real > 0


def test_eig_is_deterministic(trace_zero):
    a = trace_zero(7)
    first, second = hermitian_eig(a), hermitian_eig(a.copy())
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.unitary, second.unitary)


def test_eig_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_spectral_apply_and_range(trace_zero):
    a = trace_zero(5)
    squared = spectral_apply(a, lambda t: t ** 2)
    assert np.allclose(squared, a @ a)

    p = np.diag([1.0, 1.0, 0.0, 0.0])
    assert rank(p) == 2
    assert np.allclose(range_projection(p), p)


# ===== JSON codec =====

def test_matrix_json_codec(trace_zero):
    a = trace_zero(3)
    assert np.array_equal(matrix_from_json(matrix_to_json(a)), a)


def test_matrix_json_accepts_real_entries():
    a = matrix_from_json({"n": 2, "entries": [[1, 0], [0, -1]]})
    assert np.array_equal(a, np.diag([1.0, -1.0]))


def test_matrix_json_rejects_ragged_rows():
    with pytest.raises(InvalidInputError) as e:
        matrix_from_json({"n": 2, "entries": [[1, 0], [0]]}, "$.matrix")
    assert e.value.path == "$.matrix.entries[1]"


def test_as_hermitian_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        as_hermitian(np.array([[np.nan, 0.0], [0.0, 1.0]]))


# ===== verification =====

def test_bound_check_pass_flag():
    assert BoundCheck("x", 1.0, 1.0 + 1e-12, 1e-9).passed
    assert not BoundCheck("x", 1.0, 1.1, 1e-9).passed


def test_verify_self_factor_on_diag():
    a = np.diag([1.0, -1.0])
    d = make_decomposition(
        SELF_COMMUTATORS, [(unit(1, 0),)], np.zeros((2, 2)),
        [ClaimedBound("factor_norm_sq", 2.0, 1e-9)],
    )
    report = verify_decomposition(a, d)
    assert report.residual_norm == pytest.approx(0.0, abs=1e-15)
    check = report.bound_checks[0]
    assert check.name == "factor_norm_sq"
    assert check.measured_value == pytest.approx(1.0)
    assert report.passed


def test_verify_empty_factors_reports_full_residual(trace_zero):
    a = trace_zero(4)
    d = make_decomposition(GENERAL_COMMUTATORS, [], a)
    report = verify_decomposition(a, d)
    assert report.residual_norm == pytest.approx(operator_norm(a))
    assert report.commutator_count == 0
    assert report.passed


def test_verify_flags_inconsistent_residual(trace_zero):
    a = trace_zero(3)
    d = make_decomposition(GENERAL_COMMUTATORS, [], np.zeros((3, 3)))
    report = verify_decomposition(a, d)
    assert not report.passed
    assert report.failures == ["consistency"]


def test_verify_dimension_mismatch():
    d = make_decomposition(SELF_COMMUTATORS, [(np.zeros((3, 3)),)], np.zeros((3, 3)))
    with pytest.raises(InvalidInputError):
        verify_decomposition(np.zeros((2, 2)), d)


def test_decomposition_rejects_wrong_arity():
    with pytest.raises(InvalidInputError):
        CommutatorDecomposition(GENERAL_COMMUTATORS, ((np.eye(2),),), np.zeros((2, 2)))


def test_decomposition_json_codec(trace_zero):
    x = trace_zero(3) + 1j * trace_zero(3)
    d = make_decomposition(
        SELF_COMMUTATORS, [(x,)], np.zeros((3, 3)),
        [ClaimedBound("factor_norm_sq", 4.0, 1e-9)],
    )
    back = CommutatorDecomposition.from_dict(d.to_dict())
    assert back.kind == SELF_COMMUTATORS
    assert np.array_equal(back.factors[0][0], x)
    assert back.bound("factor_norm_sq") == ClaimedBound("factor_norm_sq", 4.0, 1e-9)


def test_report_merge_prefixes_checks():
    base = VerificationReport(0.5, [BoundCheck("a", 1.0, 0.0, 0.0)], 3)
    other = VerificationReport(9.0, [BoundCheck("b", 0.0, 1.0, 0.0)], 7)
    merged = base.merge(other, "stage1.")
    assert [c.name for c in merged.bound_checks] == ["a", "stage1.b"]
    assert merged.residual_norm == 0.5
    assert merged.commutator_count == 3
    assert not merged.passed

"""
Single-commutator decompositions of trace-zero Hermitian matrices, the
partial-sum orderings behind them and the orthogonal collapse.
"""

from itertools import combinations_with_replacement

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from matcore.errors import InvalidInputError, PreconditionError
from matcore.linalg import (
    commutator,
    operator_norm,
    random_trace_zero_hermitian,
    random_unitary,
    self_commutator,
)
from matcore.verification import verify_decomposition
from selfcomm.collapse import balance_pair, collapse_orthogonal
from selfcomm.decompose import self_commutator_decompose, tight_commutator_decompose
from selfcomm.orderings import greedy_nonneg_order, signed_order


def zero_sum_multisets(max_size=8, low=-5, high=5):
    for size in range(1, max_size + 1):
        for combo in combinations_with_replacement(range(low, high + 1), size):
            if sum(combo) == 0:
                yield combo


# ===== orderings =====

def test_greedy_and_signed_orders_exhaustive():
    checked = 0
    for combo in zero_sum_multisets():
        values = np.array(combo, dtype=float)
        bound = float(np.max(np.abs(values)))

        greedy = greedy_nonneg_order(values)
        assert sorted(greedy.permutation.tolist()) == list(range(len(combo)))
        assert np.all(greedy.partial_sums >= 0.0)
        assert np.all(greedy.partial_sums <= 2.0 * bound)

        signed = signed_order(values)
        assert sorted(signed.permutation.tolist()) == list(range(len(combo)))
        assert np.all(np.abs(signed.partial_sums) <= bound)

        checked += 1
    assert checked > 1000


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=2, max_size=12))
def test_orders_on_real_spectra(raw):
    values = np.array(raw) - np.mean(raw)
    bound = float(np.max(np.abs(values)))
    assume(bound > 1e-3)
    slack = 1e-9 * len(raw) * max(bound, 1.0)

    greedy = greedy_nonneg_order(values)
    assert greedy.partial_sums.min() >= -slack
    assert greedy.partial_sums.max() <= 2.0 * bound + slack

    signed = signed_order(values)
    assert np.abs(signed.partial_sums).max() <= bound + slack


def test_greedy_ties_go_to_lowest_index():
    order = greedy_nonneg_order([1.0, 1.0, -1.0, -1.0])
    assert order.permutation.tolist() == [0, 2, 1, 3]


def test_order_rejects_nonzero_trace():
    with pytest.raises(InvalidInputError, match="trace not zero"):
        greedy_nonneg_order([1.0, 1.0])


# ===== self-commutator =====

def test_diag_decomposes_to_shift():
    d = self_commutator_decompose(np.diag([1.0, -1.0]))
    x = d.factors[0][0]
    expected = np.zeros((2, 2))
    expected[1, 0] = 1.0
    assert np.allclose(x, expected)
    assert np.allclose(self_commutator(x), np.diag([1.0, -1.0]))


def test_diag_with_repeated_negatives_gives_weighted_shift():
    a = np.diag([3.0, -1.0, -1.0, -1.0])
    x = self_commutator_decompose(a).factors[0][0]

    expected = np.zeros((4, 4))
    expected[1, 0], expected[2, 1], expected[3, 2] = np.sqrt(3.0), np.sqrt(2.0), 1.0
    assert np.allclose(x, expected)
    assert np.allclose(self_commutator(x), a)


def test_identity_is_rejected():
    with pytest.raises(InvalidInputError, match="trace not zero"):
        self_commutator_decompose(np.eye(3))


def test_non_hermitian_is_rejected():
    with pytest.raises(InvalidInputError):
        self_commutator_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_zero_matrix():
    d = self_commutator_decompose(np.zeros((3, 3)))
    assert np.array_equal(d.factors[0][0], np.zeros((3, 3)))


def test_self_commutator_bound_on_random_family():
    rng = np.random.default_rng(1)
    for trial in range(1000):
        n = 2 + trial % 15
        a = random_trace_zero_hermitian(n, rng)
        norm_a = operator_norm(a)
        x = self_commutator_decompose(a).factors[0][0]

        assert operator_norm(a - self_commutator(x)) <= 1e-9 * max(1.0, norm_a)
        assert operator_norm(x) ** 2 <= 2.0 * norm_a + 1e-9


def test_tight_commutator_bound_on_random_family():
    rng = np.random.default_rng(2)
    for trial in range(1000):
        n = 2 + trial % 15
        a = random_trace_zero_hermitian(n, rng)
        norm_a = operator_norm(a)
        x, y = tight_commutator_decompose(a).factors[0]

        assert operator_norm(a - commutator(x, y)) <= 1e-9 * max(1.0, norm_a)
        assert operator_norm(x) * operator_norm(y) <= norm_a + 1e-9


def test_self_commutator_is_unitarily_covariant(trace_zero, rng):
    a = trace_zero(6)
    u = random_unitary(6, rng)
    rotated = u @ a @ u.conj().T

    plain = verify_decomposition(a, self_commutator_decompose(a))
    moved = verify_decomposition(rotated, self_commutator_decompose(rotated))

    assert moved.passed
    assert moved.residual_norm == pytest.approx(plain.residual_norm, abs=1e-9)
    for p, q in zip(plain.bound_checks, moved.bound_checks):
        assert p.name == q.name
        assert q.claimed_bound == pytest.approx(p.claimed_bound, rel=1e-9)
        assert q.measured_value == pytest.approx(p.measured_value, rel=1e-9, abs=1e-9)


def test_decompositions_pass_their_own_report(trace_zero):
    a = trace_zero(8)
    for d in (self_commutator_decompose(a), tight_commutator_decompose(a)):
        report = verify_decomposition(a, d)
        assert report.passed
        assert report.residual_norm <= 1e-9
        assert report.commutator_count == 1


# ===== collapse =====

def _block_pair(rng, index, blocks=3, size=2):
    n = blocks * size
    c = np.zeros((n, n), dtype=np.complex128)
    d = np.zeros((n, n), dtype=np.complex128)
    lo = index * size
    c[lo:lo + size, lo:lo + size] = rng.standard_normal((size, size))
    d[lo:lo + size, lo:lo + size] = rng.standard_normal((size, size))
    return c, d


def test_collapse_of_block_pairs(rng):
    pairs = [_block_pair(rng, i) for i in range(3)]
    c, d = collapse_orthogonal(pairs)
    total = sum(commutator(p, q) for p, q in pairs)
    assert np.allclose(commutator(c, d), total)


def test_collapse_reports_offending_pair(rng):
    pairs = [_block_pair(rng, 0), _block_pair(rng, 0)]
    with pytest.raises(PreconditionError) as e:
        collapse_orthogonal(pairs)
    assert "pairs 0 and 1" in str(e.value)


def test_collapse_empty_needs_size():
    with pytest.raises(InvalidInputError):
        collapse_orthogonal([])
    c, d = collapse_orthogonal([], size=2)
    assert c.shape == d.shape == (2, 2)


def test_balance_pair_keeps_commutator(rng):
    c = rng.standard_normal((3, 3))
    d = 10.0 * rng.standard_normal((3, 3))
    bc, bd = balance_pair(c, d)
    assert operator_norm(bc) == pytest.approx(operator_norm(bd))
    assert np.allclose(commutator(bc, bd), commutator(c, d))

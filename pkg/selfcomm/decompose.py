"""
decompose.py
Single-commutator decompositions of trace-zero Hermitian matrices.

  self_commutator_decompose   a = [x*, x]   with ||x||^2 <= 2||a||
  tight_commutator_decompose  a = [x, y]    with ||x|| ||y|| <= ||a||

Both diagonalize a, reorder the spectrum so its partial sums stay in a band
and place the partial sums on a weighted shift in the reordered eigenbasis.
"""

import logging
from typing import Tuple

import numpy as np

from constants import BOUND_SLACK, RESIDUAL_TOL, TRACE_ZERO_TOL
from matcore.decomposition import (
    GENERAL_COMMUTATORS,
    SELF_COMMUTATORS,
    ClaimedBound,
    CommutatorDecomposition,
    make_decomposition,
)
from matcore.linalg import hermitian_eig, operator_norm
from matcore.matrices import as_hermitian
from selfcomm.orderings import PartialSumOrder, greedy_nonneg_order, signed_order

__all__ = [
    "CommutatorDecomposition",
    "self_commutator_decompose",
    "tight_commutator_decompose",
]

logger = logging.getLogger("selfcomm")


def _ordered_basis(a: np.ndarray, order_fn, tol: float) -> Tuple[np.ndarray, PartialSumOrder]:
    eig = hermitian_eig(a)
    order = order_fn(eig.eigenvalues, tol)
    return eig.unitary[:, order.permutation], order


def _exactness_bounds(norm_a: float) -> list:
    return [
        ClaimedBound("residual_norm", 0.0, RESIDUAL_TOL * max(1.0, norm_a)),
        ClaimedBound("commutator_count", 1.0, 0.0),
    ]


def self_commutator_decompose(a, tol: float = TRACE_ZERO_TOL) -> CommutatorDecomposition:
    a = as_hermitian(a, "a")
    n = a.shape[0]
    norm_a = operator_norm(a)

    basis, order = _ordered_basis(a, greedy_nonneg_order, tol)

    # Weighted lower shift: [X*, X] = diag of the reordered spectrum.
    shift = np.zeros((n, n), dtype=np.complex128)
    weights = np.sqrt(np.maximum(order.partial_sums[:-1], 0.0))
    shift[np.arange(1, n), np.arange(n - 1)] = weights

    x = basis @ shift @ basis.conj().T

    logger.debug(
        f"[SELFCOMM] self-commutator n={n} max partial sum="
        f"{float(np.max(order.partial_sums)):.3e} ||a||={norm_a:.3e}"
    )

    bounds = [ClaimedBound("factor_norm_sq", 2.0 * norm_a, BOUND_SLACK)]
    bounds += _exactness_bounds(norm_a)

    return make_decomposition(
        SELF_COMMUTATORS, [(x,)], np.zeros((n, n), dtype=np.complex128), bounds
    )


def tight_commutator_decompose(a, tol: float = TRACE_ZERO_TOL) -> CommutatorDecomposition:
    a = as_hermitian(a, "a")
    n = a.shape[0]
    norm_a = operator_norm(a)

    basis, order = _ordered_basis(a, signed_order, tol)

    upper = np.zeros((n, n), dtype=np.complex128)
    lower = np.zeros((n, n), dtype=np.complex128)
    if n > 1:
        upper[np.arange(n - 1), np.arange(1, n)] = order.partial_sums[:-1]
        lower[np.arange(1, n), np.arange(n - 1)] = 1.0

    x = basis @ upper @ basis.conj().T
    y = basis @ lower @ basis.conj().T

    logger.debug(
        f"[SELFCOMM] tight commutator n={n} max|s|="
        f"{float(np.max(np.abs(order.partial_sums))):.3e} ||a||={norm_a:.3e}"
    )

    bounds = [ClaimedBound("factor_norm_product", norm_a, BOUND_SLACK)]
    bounds += _exactness_bounds(norm_a)

    return make_decomposition(
        GENERAL_COMMUTATORS, [(x, y)], np.zeros((n, n), dtype=np.complex128), bounds
    )

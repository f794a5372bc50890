# selfcomm/orderings.py
# Orderings of a trace-zero spectrum whose partial sums stay inside a band.

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from constants import TRACE_ZERO_TOL
from matcore.errors import InvalidInputError


@dataclass(frozen=True)
class PartialSumOrder:
    permutation: np.ndarray
    partial_sums: np.ndarray


def check_trace_zero(eigenvalues, tol: float = TRACE_ZERO_TOL) -> np.ndarray:
    values = np.asarray(eigenvalues, dtype=float).ravel()

    if values.size == 0:
        raise InvalidInputError("empty spectrum")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("spectrum must be finite")

    total = float(np.sum(values))
    scale = float(np.max(np.abs(values)))

    if abs(total) > tol * values.size * scale:
        raise InvalidInputError(
            f"trace not zero: sum {total:.6e} exceeds {tol:.1e} * n * max|lambda|"
        )

    return values


def _build(values: Sequence[float], order: List[int]) -> PartialSumOrder:
    permutation = np.asarray(order, dtype=int)
    partial_sums = np.cumsum(np.asarray(values, dtype=float)[permutation])
    return PartialSumOrder(permutation=permutation, partial_sums=partial_sums)


def _pick(values: Sequence[float], candidates: List[int], largest: bool) -> int:
    # Ties go to the lowest original index.
    if largest:
        return min(candidates, key=lambda i: (-values[i], i))
    return min(candidates, key=lambda i: (values[i], i))


def greedy_nonneg_order(eigenvalues, tol: float = TRACE_ZERO_TOL) -> PartialSumOrder:
    """
    Partial sums in [0, 2 max|lambda|].

    While the running sum is below max|lambda| take the largest remaining
    nonnegative value; otherwise take the remaining negative closest to zero.
    """
    values = check_trace_zero(eigenvalues, tol).tolist()
    bound = max(abs(v) for v in values)

    remaining = list(range(len(values)))
    order: List[int] = []
    running = 0.0

    while remaining:
        nonneg = [i for i in remaining if values[i] >= 0.0]
        negative = [i for i in remaining if values[i] < 0.0]

        if (running < bound and nonneg) or not negative:
            chosen = _pick(values, nonneg, largest=True)
        else:
            chosen = _pick(values, negative, largest=True)

        order.append(chosen)
        remaining.remove(chosen)
        running += values[chosen]

    return _build(values, order)


def signed_order(eigenvalues, tol: float = TRACE_ZERO_TOL) -> PartialSumOrder:
    """Partial sums in [-max|lambda|, max|lambda|]."""
    values = check_trace_zero(eigenvalues, tol).tolist()

    remaining = list(range(len(values)))
    order: List[int] = []
    running = 0.0

    while remaining:
        chosen = _pick(values, remaining, largest=running <= 0.0)
        order.append(chosen)
        remaining.remove(chosen)
        running += values[chosen]

    return _build(values, order)

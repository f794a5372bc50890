# selfcomm/collapse.py
# Sums of commutators with mutually orthogonal supports collapse to one.

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from constants import ORTHOGONALITY_TOL
from matcore.errors import InvalidInputError, PreconditionError
from matcore.linalg import operator_norm
from matcore.matrices import as_square_matrix, require_same_square

logger = logging.getLogger("selfcomm")

Pair = Tuple[np.ndarray, np.ndarray]


def balance_pair(c, d) -> Pair:
    """Rescale (c, d) -> (tc, d/t) so both factors have equal norm; [c, d] is unchanged."""
    c = np.asarray(c, dtype=np.complex128)
    d = np.asarray(d, dtype=np.complex128)

    nc, nd = operator_norm(c), operator_norm(d)
    if nc == 0.0 or nd == 0.0:
        return np.zeros_like(c), np.zeros_like(d)

    t = np.sqrt(nd / nc)
    return c * t, d / t


def _orthogonal(x: np.ndarray, y: np.ndarray) -> float:
    return max(operator_norm(x.conj().T @ y), operator_norm(x @ y.conj().T))


def _relations(ci, di, cj, dj) -> List[Tuple[str, float]]:
    return [
        ("c_i d_j", operator_norm(ci @ dj)),
        ("c_i* d_j", operator_norm(ci.conj().T @ dj)),
        ("c_i* d_j*", operator_norm(ci.conj().T @ dj.conj().T)),
        ("c_i perp c_j", _orthogonal(ci, cj)),
        ("d_i perp d_j", _orthogonal(di, dj)),
    ]


def _scale(p: Pair, q: Pair) -> float:
    nc, nd = operator_norm(p[0]), operator_norm(p[1])
    mc, md = operator_norm(q[0]), operator_norm(q[1])
    return max(1.0, nc * md, nc * mc, nd * md)


def pairs_orthogonal(p: Pair, q: Pair, tol: float = ORTHOGONALITY_TOL) -> bool:
    """True when (p, q) may share one collapsed commutator, checked in both orders."""
    for first, second in ((p, q), (q, p)):
        scale = _scale(first, second)
        if any(value > tol * scale for _, value in _relations(*first, *second)):
            return False
    return True


def collapse_orthogonal(pairs: Sequence[Pair], size: Optional[int] = None,
                        tol: float = ORTHOGONALITY_TOL) -> Pair:
    """
    (c, d) = (sum c_i, sum d_i), so that [c, d] = sum [c_i, d_i].

    Every ordered pair i != j is checked; the first violated relation raises
    PreconditionError naming both indices. An empty list gives the zero pair
    of shape (size, size); size is required in that case and ignored otherwise.
    """
    if not pairs:
        if size is None:
            raise InvalidInputError("empty pair list needs an explicit matrix size")
        zero = np.zeros((size, size), dtype=np.complex128)
        return zero, zero.copy()

    mats = []
    for i, (c, d) in enumerate(pairs):
        c = as_square_matrix(c, f"pairs[{i}].c")
        d = as_square_matrix(d, f"pairs[{i}].d")
        require_same_square(c, d, f"pairs[{i}]")
        if mats:
            require_same_square(mats[0][0], c, f"pairs[{i}]")
        mats.append((c, d))

    for i, (ci, di) in enumerate(mats):
        for j, (cj, dj) in enumerate(mats):
            if i == j:
                continue
            scale = _scale((ci, di), (cj, dj))
            for relation, value in _relations(ci, di, cj, dj):
                if value > tol * scale:
                    raise PreconditionError(
                        f"pairs {i} and {j} not orthogonal: ||{relation}|| = {value:.3e}",
                        f"$.pairs[{j}]",
                    )

    c = sum(p[0] for p in mats)
    d = sum(p[1] for p in mats)

    logger.debug(f"[SELFCOMM] collapsed {len(mats)} orthogonal pairs")

    return c, d

"""
block_split.py
Two-commutator split of a block matrix b = (b_ij) in M_n(her(c)).

Given pairs (x_i, y_i) with sum_i b_ii = sum_i [x_i, y_i] and a ramp e acting
as a unit on the diagonal data, put

    s_k = sum_{j <= k} (b_jj - [x_j, y_j])
    S   = block superdiagonal (s_1, ..., s_{n-1})
    E   = block subdiagonal (e, ..., e)

so b' = [S, E] carries the diagonal defect and b'' = b - b' has diagonal
blocks [x_i, y_i]. Collapsing b'' to a single commutator is not implemented.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from constants import FACK_TOL
from matcore.errors import InvalidInputError, PreconditionError
from matcore.linalg import commutator, operator_norm
from matcore.matrices import as_square_matrix, matrix_to_json
from matcore.verification import BoundCheck, VerificationReport

logger = logging.getLogger("fack")

COLLAPSE_STATUS = "single-commutator collapse of b'' unsupported"


@dataclass(frozen=True)
class BlockSplit:
    S: np.ndarray
    E: np.ndarray
    b_prime: np.ndarray
    b_doubleprime: np.ndarray
    report: VerificationReport
    block_size: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "S": matrix_to_json(self.S),
            "E": matrix_to_json(self.E),
            "b_doubleprime": matrix_to_json(self.b_doubleprime),
            "block_size": self.block_size,
            "collapse": COLLAPSE_STATUS,
            "report": self.report.to_dict(),
        }


def _block(m: np.ndarray, i: int, j: int, size: int) -> np.ndarray:
    return m[i * size:(i + 1) * size, j * size:(j + 1) * size]


def block_two_commutator_split(b, pairs: Sequence[Tuple[np.ndarray, np.ndarray]], e,
                               tol: float = FACK_TOL) -> BlockSplit:
    b = as_square_matrix(b, "b")
    e = as_square_matrix(e, "e")
    m = e.shape[0]

    if b.shape[0] % m:
        raise InvalidInputError(f"b of size {b.shape[0]} is not a block matrix over {m}x{m}", "$.b")

    n = b.shape[0] // m
    if len(pairs) != n:
        raise InvalidInputError(f"expected {n} pairs, got {len(pairs)}", "$.pairs")

    brackets: List[np.ndarray] = []
    for i, (x, y) in enumerate(pairs):
        x = as_square_matrix(x, f"pairs[{i}].x")
        y = as_square_matrix(y, f"pairs[{i}].y")
        if x.shape != (m, m) or y.shape != (m, m):
            raise InvalidInputError(f"pair {i} is not {m}x{m}", f"$.pairs[{i}]")
        brackets.append(commutator(x, y))

    scale = max(1.0, operator_norm(b))
    defects = [_block(b, i, i, m) - brackets[i] for i in range(n)]

    trace_gap = operator_norm(sum(defects))
    if trace_gap > tol * scale:
        if n == 1:
            raise PreconditionError(
                f"single block differs from [x_1, y_1] by {trace_gap:.3e}", "$.b"
            )
        raise PreconditionError(
            f"sum of diagonal blocks differs from sum of commutators by {trace_gap:.3e}", "$.pairs"
        )

    partial = np.cumsum(np.array(defects), axis=0)

    S = np.zeros_like(b)
    E = np.zeros_like(b)
    for k in range(n - 1):
        S[k * m:(k + 1) * m, (k + 1) * m:(k + 2) * m] = partial[k]
        E[(k + 1) * m:(k + 2) * m, k * m:(k + 1) * m] = e

    b_prime = S @ E - E @ S
    b_doubleprime = b - b_prime

    carried = max(
        operator_norm(_block(b_prime, i, i, m) - defects[i]) for i in range(n)
    )
    diagonal = max(
        operator_norm(_block(b_doubleprime, i, i, m) - brackets[i]) for i in range(n)
    )
    checks = [
        BoundCheck("defect_blocks", 0.0, carried, tol * scale),
        BoundCheck("trace_condition", 0.0, trace_gap, tol * scale),
        BoundCheck("diagonal_commutators", 0.0, diagonal, tol * scale),
    ]
    report = VerificationReport(
        residual_norm=carried,
        bound_checks=checks,
        commutator_count=1,
    )

    logger.debug(f"[FACK] block split n={n} m={m}: diagonal defect {diagonal:.3e}")

    return BlockSplit(S, E, b_prime, b_doubleprime, report, m)

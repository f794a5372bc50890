"""
witness.py
Cuntz-comparison witnesses in matrix algebras.

For positive a, b and integers L, K with

    L rank(g(a)) <= (L - 1) rank((a - eps)_+) + K rank(b)

build V with V*V = g(a) (x) 1_L and VV* in her(c), where

    c = (a - eps)_+ (x) 1_{L-1}  (+)  b (x) 1_K.

V is a ((L+K-1) n) x (L n) matrix; block v_ij sits at row block i, column
block j.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
from scipy import linalg as sla

from constants import FACK_TOL, RANK_THRESHOLD
from matcore.errors import InvalidInputError, PreconditionError
from matcore.linalg import compression_defect, operator_norm, range_basis, spectral_apply
from fack.ramps import CUT, RAMP, apply_ramp, cuntz_rank, require_psd

logger = logging.getLogger("fack")


def _blocks(mats) -> np.ndarray:
    if not mats:
        return np.zeros((0, 0), dtype=np.complex128)
    return sla.block_diag(*mats).astype(np.complex128)


@dataclass(frozen=True)
class CuntzWitness:
    V: np.ndarray
    n: int
    L: int
    K: int
    epsilon: float
    ramp_block: np.ndarray
    target: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.n
        return self.V[i * n:(i + 1) * n, j * n:(j + 1) * n]

    @property
    def row_blocks(self) -> int:
        return self.L + self.K - 1

    def gram_defect(self) -> float:
        """||V*V - g(a) (x) 1_L||."""
        g = _blocks([self.ramp_block] * self.L)
        return operator_norm(self.V.conj().T @ self.V - g)

    def range_defect(self) -> float:
        """How far VV* sits outside her(c)."""
        p = range_basis(self.target)
        return compression_defect(self.V @ self.V.conj().T, p @ p.conj().T)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "L": self.L,
            "K": self.K,
            "epsilon": self.epsilon,
            "gram_defect": self.gram_defect(),
            "range_defect": self.range_defect(),
        }


def cuntz_witness(a, b, L: int, K: int, epsilon: float,
                  threshold: float = RANK_THRESHOLD, tol: float = FACK_TOL) -> CuntzWitness:
    if L < 1 or K < 1:
        raise InvalidInputError(f"L and K must be positive, got L={L}, K={K}")

    a, _ = require_psd(a, "a")
    b, _ = require_psd(b, "b")
    if a.shape != b.shape:
        raise InvalidInputError(f"a and b differ in size: {a.shape} vs {b.shape}", "$.b")

    n = a.shape[0]
    g = apply_ramp(a, epsilon, RAMP)
    cut = apply_ramp(a, epsilon, CUT)

    lhs = L * cuntz_rank(g, threshold)
    rhs = (L - 1) * cuntz_rank(cut, threshold) + K * cuntz_rank(b, threshold)
    if lhs > rhs:
        raise PreconditionError(
            f"rank condition fails: L*rank(g(a)) = {lhs} > "
            f"(L-1)*rank((a-eps)_+) + K*rank(b) = {rhs}"
        )

    big_g = _blocks([g] * L)
    c = _blocks([cut] * (L - 1) + [b] * K)

    source = range_basis(big_g, threshold)
    dest = range_basis(c, threshold)[:, :source.shape[1]]

    # Partial isometry range(G) -> range(c), ascending eigenbases paired.
    w = dest @ source.conj().T
    v = w @ spectral_apply(big_g, lambda t: np.sqrt(np.maximum(t, 0.0)))

    witness = CuntzWitness(v, n, L, K, float(epsilon), g, c)

    gram, reach = witness.gram_defect(), witness.range_defect()
    if gram > tol or reach > tol:
        raise PreconditionError(
            f"witness defect too large: gram {gram:.3e}, range {reach:.3e}"
        )

    logger.debug(f"[FACK] witness n={n} L={L} K={K} ranks {lhs} <= {rhs}")

    return witness

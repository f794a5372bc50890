"""
trapecio.py
One decomposition step: x in her((a - eps)_+) becomes a sum of exactly
L(L+K-1) commutators plus a remainder z in her(b) with ||z|| <= K||x||.

    Phi(y) = (1/L) sum_{i < L-1, j} v_ij y v_ij*
    y      = (Id - Phi)^{-1} x            (Neumann series, ||Phi|| <= (L-1)/L)
    pairs  = (v_ij* / L, v_ij y)          for every block (i, j)
    z      = (1/L) sum_{i >= L-1, j} v_ij y v_ij*
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from constants import (
    BOUND_SLACK,
    FACK_TOL,
    NEUMANN_MAX_ITERATIONS,
    NEUMANN_TARGET,
    SUPPORT_TOL,
)
from matcore.decomposition import (
    GENERAL_COMMUTATORS,
    ClaimedBound,
    CommutatorDecomposition,
    make_decomposition,
)
from matcore.errors import ConvergenceError, PreconditionError
from matcore.linalg import compression_defect, operator_norm, range_projection
from matcore.matrices import as_square_matrix
from matcore.verification import BoundCheck, VerificationReport, verify_decomposition
from fack.ramps import CUT, apply_ramp
from fack.witness import CuntzWitness, cuntz_witness

logger = logging.getLogger("fack")

Pair = Tuple[np.ndarray, np.ndarray]


def apply_phi(witness: CuntzWitness, y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y, dtype=np.complex128)
    for i in range(witness.L - 1):
        for j in range(witness.L):
            v = witness.block(i, j)
            out += v @ y @ v.conj().T
    return out / witness.L


def phi_norm(witness: CuntzWitness, projection: np.ndarray) -> float:
    """Phi is completely positive, so its norm on her(P) is ||Phi(P)||."""
    return operator_norm(apply_phi(witness, projection))


def neumann_solve(witness: CuntzWitness, x: np.ndarray,
                  target: float = NEUMANN_TARGET,
                  max_iterations: int = NEUMANN_MAX_ITERATIONS) -> Tuple[np.ndarray, int]:
    """y = sum_k Phi^k(x), stopped once ||x - (Id - Phi)y|| = ||Phi^{k+1} x|| <= target ||x||."""
    scale = operator_norm(x)
    y = x.astype(np.complex128).copy()
    term = y.copy()

    for iteration in range(1, max_iterations + 1):
        term = apply_phi(witness, term)
        if operator_norm(term) <= target * scale:
            return y, iteration
        y += term

    raise ConvergenceError(
        f"Neumann series did not reach {target:.1e} relative residual "
        f"in {max_iterations} iterations"
    )


@dataclass(frozen=True)
class TrapecioResult:
    commutators: List[Pair]
    z: np.ndarray
    y: np.ndarray
    witness: CuntzWitness
    certificates: VerificationReport
    iterations: int

    @property
    def commutator_count(self) -> int:
        return len(self.commutators)

    def as_decomposition(self, x: Optional[np.ndarray] = None) -> CommutatorDecomposition:
        norm_x = operator_norm(x) if x is not None else 0.0
        bounds = [
            ClaimedBound("commutator_count", float(self.commutator_count), 0.0),
            ClaimedBound("factor_norm_product", norm_x, FACK_TOL * max(1.0, norm_x)),
            ClaimedBound("remainder_norm", self.witness.K * norm_x, FACK_TOL * max(1.0, norm_x)),
        ]
        return make_decomposition(GENERAL_COMMUTATORS, self.commutators, self.z, bounds)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "commutator_count": self.commutator_count,
            "remainder_norm": operator_norm(self.z),
            "neumann_iterations": self.iterations,
            "witness": self.witness.to_dict(),
            "certificates": self.certificates.to_dict(),
        }


def trapecio_step(x, a, b, L: int, K: int, epsilon: float,
                  tol: float = FACK_TOL, witness: Optional[CuntzWitness] = None) -> TrapecioResult:
    x = as_square_matrix(x, "x")
    norm_x = operator_norm(x)

    corner = range_projection(apply_ramp(a, epsilon, CUT))
    defect = compression_defect(x, corner)
    if defect > tol * norm_x:
        raise PreconditionError(
            f"x is not in her((a - eps)_+): compression defect {defect:.3e}", "$.x"
        )

    witness = witness or cuntz_witness(a, b, L, K, epsilon)

    y, iterations = neumann_solve(witness, x)

    pairs: List[Pair] = []
    z = np.zeros_like(x, dtype=np.complex128)

    for i in range(witness.row_blocks):
        for j in range(L):
            v = witness.block(i, j)
            vy = v @ y
            pairs.append((v.conj().T / L, vy))
            if i >= L - 1:
                z += vy @ v.conj().T
    z /= L

    decomposition = make_decomposition(GENERAL_COMMUTATORS, pairs, z)
    recon = operator_norm(x - decomposition.reconstruct() - z)

    support = range_projection(np.asarray(b, dtype=np.complex128))
    slack = tol * max(1.0, norm_x)

    checks = [
        BoundCheck("commutator_count", float(L * (L + K - 1)), float(len(pairs)), 0.0),
        BoundCheck("remainder_norm", K * norm_x, operator_norm(z), slack),
        BoundCheck(
            "factor_norm_product",
            norm_x,
            max(operator_norm(p) * operator_norm(q) for p, q in pairs),
            slack,
        ),
        BoundCheck("reconstruction", 0.0, recon, tol * norm_x),
        BoundCheck("remainder_support", 0.0, compression_defect(z, support), SUPPORT_TOL * max(1.0, norm_x)),
        BoundCheck("neumann_norm", L * norm_x, operator_norm(y), slack),
        BoundCheck("phi_norm", (L - 1) / L, phi_norm(witness, corner), BOUND_SLACK),
    ]

    report = VerificationReport(
        residual_norm=operator_norm(x - decomposition.reconstruct()),
        bound_checks=checks,
        commutator_count=len(pairs),
    )

    logger.debug(
        f"[FACK] trapecio L={L} K={K}: {len(pairs)} commutators, "
        f"||z||={operator_norm(z):.3e}, {iterations} Neumann iterations"
    )

    return TrapecioResult(pairs, z, y, witness, report, iterations)


def verify_trapecio(x, result: TrapecioResult) -> VerificationReport:
    x = as_square_matrix(x, "x")
    return verify_decomposition(
        x,
        result.as_decomposition(x),
        {"consistency": FACK_TOL * max(1.0, operator_norm(x))},
    )

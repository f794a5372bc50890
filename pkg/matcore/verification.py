"""
verification.py
Threshold gate for decompositions: every claimed bound is re-measured from
the factors and compared against its limit plus the stated tolerance.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from constants import RESIDUAL_TOL
from matcore.decomposition import SELF_COMMUTATORS, CommutatorDecomposition
from matcore.errors import InvalidInputError
from matcore.linalg import operator_norm
from matcore.matrices import as_square_matrix


@dataclass(frozen=True)
class BoundCheck:
    name: str
    claimed_bound: float
    measured_value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured_value <= self.claimed_bound + self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "claimed_bound": float(self.claimed_bound),
            "measured_value": float(self.measured_value),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    residual_norm: float
    bound_checks: List[BoundCheck] = field(default_factory=list)
    commutator_count: int = 0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.bound_checks)

    @property
    def failures(self) -> List[str]:
        return [check.name for check in self.bound_checks if not check.passed]

    def merge(self, other: "VerificationReport", prefix: str = "") -> "VerificationReport":
        """Append other's checks (renamed with prefix); residual and count stay this report's."""
        renamed = [
            BoundCheck(f"{prefix}{c.name}", c.claimed_bound, c.measured_value, c.tolerance)
            for c in other.bound_checks
        ]
        return VerificationReport(
            residual_norm=self.residual_norm,
            bound_checks=list(self.bound_checks) + renamed,
            commutator_count=self.commutator_count,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "residual_norm": float(self.residual_norm),
            "bound_checks": [c.to_dict() for c in self.bound_checks],
            "commutator_count": int(self.commutator_count),
            "passed": self.passed,
        }


def report_from_checks(checks: List[BoundCheck], residual_norm: float = 0.0,
                       commutator_count: int = 0) -> VerificationReport:
    return VerificationReport(
        residual_norm=float(residual_norm),
        bound_checks=list(checks),
        commutator_count=int(commutator_count),
    )

# ================================
# METRICS
# ================================

def _factor_norm_sq(d: CommutatorDecomposition, a: np.ndarray) -> float:
    return max((operator_norm(f[0]) ** 2 for f in d.factors), default=0.0)


def _factor_norm_product(d: CommutatorDecomposition, a: np.ndarray) -> float:
    if d.kind == SELF_COMMUTATORS:
        return max((operator_norm(f[0]) ** 2 for f in d.factors), default=0.0)
    return max(
        (operator_norm(f[0]) * operator_norm(f[1]) for f in d.factors),
        default=0.0,
    )


def _residual_norm(d: CommutatorDecomposition, a: np.ndarray) -> float:
    return operator_norm(a - d.reconstruct())


def _remainder_norm(d: CommutatorDecomposition, a: np.ndarray) -> float:
    return operator_norm(d.residual)


def _commutator_count(d: CommutatorDecomposition, a: np.ndarray) -> float:
    return float(d.commutator_count)


METRICS: Dict[str, Callable[[CommutatorDecomposition, np.ndarray], float]] = {
    "factor_norm_sq": _factor_norm_sq,
    "factor_norm_product": _factor_norm_product,
    "residual_norm": _residual_norm,
    "remainder_norm": _remainder_norm,
    "commutator_count": _commutator_count,
}


def verify_decomposition(a, decomposition: CommutatorDecomposition,
                         tolerances: Optional[Dict[str, float]] = None) -> VerificationReport:
    """
    Re-measure every bound declared on the decomposition against a.

    `tolerances` overrides per-bound tolerances by name; the key
    "consistency" sets the tolerance of the check a = Σ commutators + residual.
    """
    a = as_square_matrix(a, "a")
    tolerances = tolerances or {}

    for i, factor in enumerate(decomposition.factors):
        for m in factor:
            if m.shape != a.shape:
                raise InvalidInputError(
                    f"factor {i}: shape {m.shape} does not match element {a.shape}",
                    f"$.factors[{i}]",
                )
    if decomposition.residual.shape != a.shape:
        raise InvalidInputError(
            f"residual shape {decomposition.residual.shape} does not match element {a.shape}",
            "$.residual",
        )

    reconstruction = decomposition.reconstruct()
    residual_norm = operator_norm(a - reconstruction)

    checks: List[BoundCheck] = []

    for claimed in decomposition.claimed_bounds:
        metric = METRICS.get(claimed.name)
        if metric is None:
            raise InvalidInputError(f"unknown bound '{claimed.name}'", f"$.bounds.{claimed.name}")

        checks.append(BoundCheck(
            name=claimed.name,
            claimed_bound=claimed.limit,
            measured_value=metric(decomposition, a),
            tolerance=float(tolerances.get(claimed.name, claimed.tolerance)),
        ))

    consistency_tol = float(
        tolerances.get("consistency", RESIDUAL_TOL * max(1.0, operator_norm(a)))
    )
    checks.append(BoundCheck(
        name="consistency",
        claimed_bound=0.0,
        measured_value=operator_norm(a - reconstruction - decomposition.residual),
        tolerance=consistency_tol,
    ))

    return VerificationReport(
        residual_norm=residual_norm,
        bound_checks=checks,
        commutator_count=decomposition.commutator_count,
    )

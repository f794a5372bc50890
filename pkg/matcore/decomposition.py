"""
decomposition.py
Canonical decomposition contract: commutator factors, residual and the
norm bounds the producer claims for them.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from matcore.errors import InvalidInputError
from matcore.linalg import operator_norm
from matcore.matrices import as_square_matrix, matrix_from_json, matrix_to_json

SELF_COMMUTATORS = "self_commutators"
GENERAL_COMMUTATORS = "general_commutators"

KINDS = (SELF_COMMUTATORS, GENERAL_COMMUTATORS)


@dataclass(frozen=True)
class ClaimedBound:
    name: str
    limit: float
    tolerance: float


@dataclass(frozen=True)
class CommutatorDecomposition:
    kind: str
    factors: Tuple[Tuple[np.ndarray, ...], ...]
    residual: np.ndarray
    claimed_bounds: Tuple[ClaimedBound, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown decomposition kind '{self.kind}'")

        arity = 1 if self.kind == SELF_COMMUTATORS else 2
        for i, factor in enumerate(self.factors):
            if len(factor) != arity:
                raise InvalidInputError(
                    f"factor {i}: {self.kind} expects {arity} matrices, got {len(factor)}",
                    f"$.factors[{i}]",
                )

    @property
    def size(self) -> int:
        return int(self.residual.shape[0])

    @property
    def commutator_count(self) -> int:
        return len(self.factors)

    def reconstruct(self) -> np.ndarray:
        total = np.zeros_like(self.residual, dtype=np.complex128)

        for factor in self.factors:
            if self.kind == SELF_COMMUTATORS:
                x = factor[0]
                xh = x.conj().T
                total += xh @ x - x @ xh
            else:
                x, y = factor
                total += x @ y - y @ x

        return total

    def bound(self, name: str) -> Optional[ClaimedBound]:
        for claimed in self.claimed_bounds:
            if claimed.name == name:
                return claimed
        return None

    # ================================
    # JSON
    # ================================

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == SELF_COMMUTATORS:
            factors = [{"x": matrix_to_json(f[0])} for f in self.factors]
        else:
            factors = [
                {"x": matrix_to_json(f[0]), "y": matrix_to_json(f[1])}
                for f in self.factors
            ]

        return {
            "kind": self.kind,
            "factors": factors,
            "residual": matrix_to_json(self.residual),
            "residual_norm": operator_norm(self.residual),
            "bounds": {b.name: float(b.limit) for b in self.claimed_bounds},
            "bound_tolerances": {b.name: float(b.tolerance) for b in self.claimed_bounds},
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], path: str = "$") -> "CommutatorDecomposition":
        kind = doc.get("kind")
        keys = ("x",) if kind == SELF_COMMUTATORS else ("x", "y")

        factors: List[Tuple[np.ndarray, ...]] = []
        for i, entry in enumerate(doc.get("factors", [])):
            factors.append(tuple(
                matrix_from_json(entry[k], f"{path}.factors[{i}].{k}") for k in keys
            ))

        tolerances = doc.get("bound_tolerances", {})
        bounds = tuple(
            ClaimedBound(name, float(limit), float(tolerances.get(name, 0.0)))
            for name, limit in sorted(doc.get("bounds", {}).items())
        )

        return cls(
            kind=kind,
            factors=tuple(factors),
            residual=matrix_from_json(doc["residual"], f"{path}.residual"),
            claimed_bounds=bounds,
        )


def make_decomposition(kind: str, factors: Sequence[Sequence[np.ndarray]],
                       residual, bounds: Sequence[ClaimedBound] = ()) -> CommutatorDecomposition:
    residual = as_square_matrix(residual, "residual")
    return CommutatorDecomposition(
        kind=kind,
        factors=tuple(tuple(np.asarray(m, dtype=np.complex128) for m in f) for f in factors),
        residual=residual,
        claimed_bounds=tuple(bounds),
    )

"""
factorization.py
Field decomposition a = sum_k [y_k*, y_k] through the colored order-zero
factorization: per color, every vertex value is a single self-commutator
[x_v*, x_v] and y_k(p) = sum_v h_v(p)^(1/2) x_v over the color-k vertices.
Same-color hat functions have disjoint supports, so the cross terms vanish
and sum_k [y_k*, y_k] is the PL interpolation of a.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from constants import GRID_ORDER, GRID_TOL, VERTEX_WORKERS
from matcore.errors import InvalidInputError
from matcore.linalg import stacked_operator_norms
from matcore.matrices import is_hermitian, matrix_from_json, matrix_to_json
from matcore.verification import BoundCheck, VerificationReport
from ozfield.complexes import VertexColoring
from ozfield.fields import SampleGrid, SimplicialField, first_trace_violation, sample_grid
from ozfield.vertex_pool import VertexDecomposer

logger = logging.getLogger("ozfield")


@dataclass(frozen=True)
class SqrtWeightedFactor:
    color: int
    vertices: List[int]
    matrices: np.ndarray

    def evaluate(self, grid: SampleGrid) -> np.ndarray:
        n = self.matrices.shape[1] if self.matrices.ndim == 3 else 0
        if not self.vertices:
            return np.zeros((grid.size, n, n), dtype=np.complex128)
        weights = np.sqrt(grid.hat_values()[:, self.vertices])
        return np.einsum("pv,vij->pij", weights, self.matrices)

    def self_commutator(self, grid: SampleGrid) -> np.ndarray:
        y = self.evaluate(grid)
        yh = np.conj(np.transpose(y, (0, 2, 1)))
        return yh @ y - y @ yh

    def to_dict(self) -> Dict[str, Any]:
        return {
            "color": self.color,
            "vertices": list(self.vertices),
            "matrices": [matrix_to_json(m) for m in self.matrices],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], n: int, path: str = "$") -> "SqrtWeightedFactor":
        mats = [
            matrix_from_json(m, f"{path}.matrices[{i}]")
            for i, m in enumerate(doc["matrices"])
        ]
        matrices = np.array(mats) if mats else np.zeros((0, n, n), dtype=np.complex128)
        return cls(int(doc["color"]), [int(v) for v in doc["vertices"]], matrices)


@dataclass(frozen=True)
class FieldDecomposition:
    factors: List[SqrtWeightedFactor]
    report: VerificationReport
    grid_order: int = GRID_ORDER
    coloring: Optional[VertexColoring] = field(default=None)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "factors": [f.to_dict() for f in self.factors],
            "grid_order": self.grid_order,
            "coloring": self.coloring.to_dict() if self.coloring is not None else None,
            "report": self.report.to_dict(),
        }


def measure_field_decomposition(a: SimplicialField, factors: List[SqrtWeightedFactor],
                                order: int = GRID_ORDER, tol: float = GRID_TOL,
                                color_count: Optional[int] = None) -> VerificationReport:
    """Grid residual and per-factor ||y_k||^2 = max_p ||y_k(p)* y_k(p)||."""
    grid = sample_grid(a.complex, order)
    target = a.evaluate(grid)
    norm_inf = a.sup_norm()

    total = np.zeros_like(target)
    checks: List[BoundCheck] = []

    for f in factors:
        total += f.self_commutator(grid)
        y = f.evaluate(grid)
        gram = np.conj(np.transpose(y, (0, 2, 1))) @ y
        norm_sq = float(np.max(stacked_operator_norms(gram))) if grid.size else 0.0
        checks.append(BoundCheck(f"factor_norm_sq[{f.color}]", 2.0 * norm_inf, norm_sq, tol))

    residual = float(np.max(stacked_operator_norms(target - total))) if grid.size else 0.0

    checks.insert(0, BoundCheck("grid_residual", 0.0, residual, tol * norm_inf))

    expected = color_count if color_count is not None else len(factors)
    checks.append(BoundCheck("commutator_count", float(expected), float(len(factors)), 0.0))

    return VerificationReport(
        residual_norm=residual,
        bound_checks=checks,
        commutator_count=len(factors),
    )


def decompose_field(a: SimplicialField, coloring: VertexColoring,
                    order: int = GRID_ORDER, tol: float = GRID_TOL,
                    workers: int = VERTEX_WORKERS) -> FieldDecomposition:
    if not coloring.is_proper(a.complex):
        raise InvalidInputError("coloring is not proper on this complex", "$.coloring")

    for v in range(a.complex.vertex_count):
        if not is_hermitian(a.values[v]):
            raise InvalidInputError(f"vertex {v}: value is not Hermitian", f"$.field.values.{v}")

    bad = first_trace_violation(a)
    if bad is not None:
        raise InvalidInputError(f"vertex {bad}: trace not zero", f"$.field.values.{bad}")

    n = a.matrix_size
    xs = VertexDecomposer(workers).decompose(list(a.values))

    factors = []
    for k in range(coloring.color_count):
        vertices = coloring.vertices_of(k)
        mats = (
            np.array([xs[v] for v in vertices])
            if vertices else np.zeros((0, n, n), dtype=np.complex128)
        )
        factors.append(SqrtWeightedFactor(k, vertices, mats))

    report = measure_field_decomposition(a, factors, order, tol, coloring.color_count)

    logger.info(
        f"[OZFIELD] {len(factors)} factors over {a.complex.vertex_count} vertices, "
        f"grid residual {report.residual_norm:.3e}"
    )

    return FieldDecomposition(factors, report, order, coloring)

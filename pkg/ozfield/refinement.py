"""
refinement.py
Smooth (non-PL) fields enter only through PL sampling; a limit of sums of
dim + 1 self-commutators is realised as mesh refinement. Each level samples
the target at the vertices of a subdivided polygon, decomposes the PL
interpolant exactly and measures the distance to the smooth target on the
grid.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List

import numpy as np

from constants import GRID_ORDER, VERTEX_WORKERS
from matcore.linalg import stacked_operator_norms
from ozfield.complexes import barycentric_subdivide
from ozfield.factorization import decompose_field
from ozfield.fields import SimplicialField, sample_grid
from ozfield.meshes import PAULI, circle

logger = logging.getLogger("ozfield")

Target = Callable[[np.ndarray], np.ndarray]


def circle_target(point) -> np.ndarray:
    """cos(t) Z + sin(t) X at angle t of the point; trace zero, norm 1."""
    t = np.arctan2(point[1], point[0])
    return np.cos(t) * PAULI[2] + np.sin(t) * PAULI[0]


@dataclass(frozen=True)
class RefinementLevel:
    level: int
    segments: int
    vertex_count: int
    residual: float
    decomposition_residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "level": self.level,
            "segments": self.segments,
            "vertex_count": self.vertex_count,
            "residual": self.residual,
            "decomposition_residual": self.decomposition_residual,
        }


def refinement_residuals(target: Target = circle_target, levels: int = 5,
                         base_segments: int = 3, order: int = GRID_ORDER,
                         workers: int = VERTEX_WORKERS) -> List[RefinementLevel]:
    """Levels 0..levels; level r uses base_segments * 2^r polygon edges."""
    out: List[RefinementLevel] = []

    for r in range(levels + 1):
        segments = base_segments * 2 ** r
        sub, coloring = barycentric_subdivide(circle(segments))
        field = SimplicialField.from_function(sub, target)

        result = decompose_field(field, coloring, order=order, workers=workers)

        grid = sample_grid(sub, order)
        points = grid.coordinates(sub.positions)
        smooth = np.array([target(p) for p in points])

        approx = sum(f.self_commutator(grid) for f in result.factors)
        residual = float(np.max(stacked_operator_norms(smooth - approx)))

        out.append(RefinementLevel(r, segments, sub.vertex_count, residual, result.report.residual_norm))

        logger.info(f"[OZFIELD] refinement level {r}: {segments} segments, residual {residual:.3e}")

    return out


def residual_ratios(levels: List[RefinementLevel]) -> List[float]:
    return [
        b.residual / a.residual if a.residual > 0 else 0.0
        for a, b in zip(levels, levels[1:])
    ]

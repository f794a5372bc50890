"""
fields.py
Matrix-valued piecewise-linear fields over a simplicial complex: the
C(X, M_n) model. A field is its vertex values; evaluation at a point is the
convex combination by barycentric coordinates (hat functions).
"""

from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from constants import FIELD_TRACE_ZERO_TOL, GRID_ORDER
from matcore.errors import InvalidInputError
from matcore.linalg import stacked_operator_norms
from matcore.matrices import is_hermitian, matrix_from_json, matrix_to_json
from ozfield.complexes import SimplicialComplex, VertexColoring, barycentric_subdivide

# ================================
# SAMPLE GRID
# ================================

@dataclass(frozen=True)
class SampleGrid:
    """
    Barycentric lattice points. Row p lies in maximal simplex simplex_ids[p]
    with vertex ids vertex_ids[p] and barycentric weights weights[p]; lower
    dimensional simplices are padded with zero weights.
    """
    simplex_ids: np.ndarray
    vertex_ids: np.ndarray
    weights: np.ndarray
    vertex_count: int

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def hat_values(self) -> np.ndarray:
        """(points, vertices) matrix of h_v(p)."""
        hats = np.zeros((self.size, self.vertex_count))
        rows = np.repeat(np.arange(self.size), self.vertex_ids.shape[1])
        np.add.at(hats, (rows, self.vertex_ids.ravel()), self.weights.ravel())
        return hats

    def coordinates(self, positions: np.ndarray) -> np.ndarray:
        return np.einsum("pk,pkd->pd", self.weights, positions[self.vertex_ids])


def _lattice(parts: int, order: int) -> List[Tuple[int, ...]]:
    return [c for c in product(range(order + 1), repeat=parts) if sum(c) == order]


def sample_grid(c: SimplicialComplex, order: int = GRID_ORDER) -> SampleGrid:
    if order < 1:
        raise InvalidInputError(f"grid order must be >= 1, got {order}")

    width = c.dimension + 1
    simplex_ids, vertex_ids, weights = [], [], []

    for sid, s in enumerate(c.maximal_simplices):
        padded = list(s) + [s[0]] * (width - len(s))
        for point in _lattice(len(s), order):
            simplex_ids.append(sid)
            vertex_ids.append(padded)
            weights.append([p / order for p in point] + [0.0] * (width - len(s)))

    return SampleGrid(
        simplex_ids=np.asarray(simplex_ids, dtype=int),
        vertex_ids=np.asarray(vertex_ids, dtype=int),
        weights=np.asarray(weights, dtype=float),
        vertex_count=c.vertex_count,
    )

# ================================
# FIELDS
# ================================

@dataclass(frozen=True)
class SimplicialField:
    complex: SimplicialComplex
    values: np.ndarray

    def __post_init__(self):
        v = self.values
        if v.ndim != 3 or v.shape[1] != v.shape[2] or v.shape[1] < 1:
            raise InvalidInputError(f"field values must have shape (V, n, n), got {v.shape}")
        if v.shape[0] != self.complex.vertex_count:
            raise InvalidInputError(
                f"field has {v.shape[0]} values for {self.complex.vertex_count} vertices",
                "$.field.values",
            )
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("field values must be finite", "$.field.values")

    @property
    def matrix_size(self) -> int:
        return int(self.values.shape[1])

    def evaluate(self, grid: SampleGrid) -> np.ndarray:
        return np.einsum("pv,vij->pij", grid.hat_values(), self.values)

    def sup_norm(self) -> float:
        # Convex combinations never exceed the largest vertex norm.
        return float(np.max(stacked_operator_norms(self.values)))

    def is_hermitian(self) -> bool:
        return all(is_hermitian(m) for m in self.values)

    def subdivide(self) -> Tuple["SimplicialField", VertexColoring]:
        """Same PL field on the barycentric subdivision."""
        sub, coloring = barycentric_subdivide(self.complex)
        faces = self.complex.faces()
        values = np.array([self.values[list(f)].mean(axis=0) for f in faces])
        return SimplicialField(sub, values), coloring

    @classmethod
    def from_function(cls, c: SimplicialComplex,
                      fn: Callable[[np.ndarray], np.ndarray]) -> "SimplicialField":
        if c.positions is None:
            raise InvalidInputError("complex has no vertex positions to sample")
        values = np.array([np.asarray(fn(p), dtype=np.complex128) for p in c.positions])
        return cls(c, values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "complex": self.complex.to_dict(),
            "n": self.matrix_size,
            "values": {str(v): matrix_to_json(m) for v, m in enumerate(self.values)},
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], path: str = "$.field") -> "SimplicialField":
        c = SimplicialComplex.from_dict(doc["complex"])
        n = int(doc["n"])
        raw = doc["values"]

        values = np.zeros((c.vertex_count, n, n), dtype=np.complex128)
        for v in range(c.vertex_count):
            if str(v) not in raw:
                raise InvalidInputError(f"missing value for vertex {v}", f"{path}.values")
            m = matrix_from_json(raw[str(v)], f"{path}.values.{v}")
            if m.shape != (n, n):
                raise InvalidInputError(
                    f"vertex {v}: expected {n}x{n}, got {m.shape}", f"{path}.values.{v}"
                )
            values[v] = m

        return cls(c, values)


def is_trace_zero_field(a: SimplicialField, tol: float = FIELD_TRACE_ZERO_TOL) -> bool:
    return first_trace_violation(a, tol) is None


def first_trace_violation(a: SimplicialField, tol: float = FIELD_TRACE_ZERO_TOL) -> Optional[int]:
    """Lowest vertex id whose value is not trace-zero, or None."""
    n = a.matrix_size
    traces = np.abs(np.trace(a.values, axis1=1, axis2=2))
    norms = stacked_operator_norms(a.values)
    bad = np.flatnonzero(traces > tol * n * norms)
    return int(bad[0]) if bad.size else None

# ================================
# ORDER-ZERO MAPS
# ================================

def psi_k(a: SimplicialField, coloring: VertexColoring, k: int) -> List[Tuple[int, np.ndarray]]:
    """Samples of a at the color-k vertices, in vertex-id order."""
    return [(v, a.values[v].copy()) for v in coloring.vertices_of(k)]


def phi_k(samples: Sequence[Tuple[int, np.ndarray]], coloring: VertexColoring, k: int,
          c: SimplicialComplex, matrix_size: Optional[int] = None) -> SimplicialField:
    """The field p -> sum_v h_v(p) b_v over color-k samples."""
    if not 0 <= k < coloring.color_count:
        raise InvalidInputError(f"color {k} out of range 0..{coloring.color_count - 1}")

    if samples:
        n = np.asarray(samples[0][1]).shape[0]
    elif matrix_size is not None:
        n = int(matrix_size)
    else:
        raise InvalidInputError("empty sample list needs an explicit matrix size")

    values = np.zeros((c.vertex_count, n, n), dtype=np.complex128)

    for v, b in samples:
        if coloring.colors[v] != k:
            raise InvalidInputError(
                f"vertex {v} has color {int(coloring.colors[v])}, expected {k}"
            )
        values[v] = b

    return SimplicialField(c, values)

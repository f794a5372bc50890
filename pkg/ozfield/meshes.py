# ozfield/meshes.py
# Fixed triangulations used by the demos and the acceptance harness.

import numpy as np

from matcore.linalg import random_trace_zero_hermitian
from ozfield.complexes import SimplicialComplex
from ozfield.fields import SimplicialField

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def circle(segments: int = 3) -> SimplicialComplex:
    """Polygon on the unit circle, vertex i at angle 2*pi*i/segments."""
    angles = 2.0 * np.pi * np.arange(segments) / segments
    positions = np.column_stack([np.cos(angles), np.sin(angles)])
    simplices = [(i, (i + 1) % segments) for i in range(segments)]
    return SimplicialComplex.build(segments, simplices, positions)


def octahedron_sphere() -> SimplicialComplex:
    positions = np.array([
        [1, 0, 0], [-1, 0, 0],
        [0, 1, 0], [0, -1, 0],
        [0, 0, 1], [0, 0, -1],
    ], dtype=float)
    simplices = [
        (x, y, z)
        for x in (0, 1)
        for y in (2, 3)
        for z in (4, 5)
    ]
    return SimplicialComplex.build(6, simplices, positions)


def solid_triangle() -> SimplicialComplex:
    positions = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return SimplicialComplex.build(3, [(0, 1, 2)], positions)


def random_pl_field(c: SimplicialComplex, n: int, rng: np.random.Generator) -> SimplicialField:
    values = np.array([random_trace_zero_hermitian(n, rng) for _ in range(c.vertex_count)])
    return SimplicialField(c, values)

# ================================
# BOTT PROJECTION
# ================================

def bott_projection(point) -> np.ndarray:
    """P(x) = (1 + x . sigma) / 2 for x on the unit 2-sphere (radially projected)."""
    x = np.asarray(point, dtype=float)
    x = x / np.linalg.norm(x)
    return 0.5 * (np.eye(2) + sum(x[i] * PAULI[i] for i in range(3)))


def bott_difference_field(c: SimplicialComplex) -> SimplicialField:
    """Vertex samples of diag(1, -P(x)) in M_3: trace zero, Hermitian, norm 1."""
    def value(p):
        out = np.zeros((3, 3), dtype=np.complex128)
        out[0, 0] = 1.0
        out[1:, 1:] = -bott_projection(p)
        return out

    return SimplicialField.from_function(c, value)

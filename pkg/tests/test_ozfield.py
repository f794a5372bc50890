"""
Fields over simplicial complexes: subdivision, colorings, the colored
factorization into dim + 1 self-commutators and mesh refinement.
"""

from itertools import combinations

import numpy as np
import pytest

from matcore.errors import InvalidInputError
from matcore.linalg import operator_norm
from ozfield.complexes import SimplicialComplex, VertexColoring, barycentric_subdivide, greedy_coloring
from ozfield.factorization import decompose_field, measure_field_decomposition
from ozfield.fields import SimplicialField, is_trace_zero_field, phi_k, psi_k, sample_grid
from ozfield.meshes import bott_difference_field, circle, octahedron_sphere, random_pl_field, solid_triangle
from ozfield.refinement import refinement_residuals, residual_ratios


# ===== complexes =====

def test_triangle_subdivision_counts():
    sub, coloring = barycentric_subdivide(solid_triangle())
    assert sub.vertex_count == 7
    assert len(sub.maximal_simplices) == 6
    assert coloring.color_count == 3
    assert coloring.is_proper(sub)


def test_octahedron_subdivision_counts():
    sphere = octahedron_sphere()
    assert sphere.dimension == 2
    assert len(sphere.edges()) == 12

    sub, coloring = barycentric_subdivide(sphere)
    assert sub.vertex_count == 6 + 12 + 8
    assert len(sub.maximal_simplices) == 48
    assert coloring.is_proper(sub)


def test_subdivision_places_barycenters():
    sub, _ = barycentric_subdivide(solid_triangle())
    assert np.allclose(sub.positions[-1], [1.0 / 3.0, 1.0 / 3.0])


def test_faces_start_with_vertices():
    faces = solid_triangle().faces()
    assert faces[:3] == [(0,), (1,), (2,)]
    assert faces[-1] == (0, 1, 2)
    assert len(faces) == 7


def test_build_drops_non_maximal_simplices():
    c = SimplicialComplex.build(3, [(0, 1), (2, 1, 0), (1,)])
    assert c.maximal_simplices == ((0, 1, 2),)


def test_build_rejects_out_of_range_vertex():
    with pytest.raises(InvalidInputError):
        SimplicialComplex.build(2, [(0, 2)])


def test_greedy_coloring_is_proper():
    c = circle(5)
    coloring = greedy_coloring(c)
    assert coloring.is_proper(c)
    assert coloring.color_count == 3
    assert coloring.colors.tolist() == [0, 1, 0, 1, 2]


def test_greedy_coloring_keeps_isolated_vertices():
    c = SimplicialComplex.build(4, [(0, 1), (2,), (3,)])
    assert c.graph().number_of_nodes() == 4
    assert greedy_coloring(c).colors.tolist() == [0, 1, 0, 0]


# ===== fields =====

def test_grid_hat_values_partition_unity():
    sub, _ = barycentric_subdivide(octahedron_sphere())
    grid = sample_grid(sub, 4)
    assert np.allclose(grid.hat_values().sum(axis=1), 1.0)


def test_order_zero_maps_sum_back(rng):
    sub, coloring = barycentric_subdivide(octahedron_sphere())
    a = random_pl_field(sub, 2, rng)

    total = np.zeros_like(a.values)
    for k in range(coloring.color_count):
        total += phi_k(psi_k(a, coloring, k), coloring, k, sub).values
    assert np.allclose(total, a.values)


def test_same_color_hats_never_overlap():
    sub, coloring = barycentric_subdivide(octahedron_sphere())
    hats = sample_grid(sub, 4).hat_values()

    for k in range(coloring.color_count):
        for v, w in combinations(coloring.vertices_of(k), 2):
            assert np.max(np.abs(hats[:, v] * hats[:, w])) == 0.0


def test_phi_maps_orthogonal_samples_to_orthogonal_fields():
    sub, coloring = barycentric_subdivide(solid_triangle())
    grid = sample_grid(sub, 4)
    k = next(k for k in range(coloring.color_count) if len(coloring.vertices_of(k)) >= 2)
    v, w = coloring.vertices_of(k)[:2]

    fv = phi_k([(v, np.diag([1.0, 0.0, 0.0]))], coloring, k, sub).evaluate(grid)
    fw = phi_k([(w, np.diag([0.0, 2.0, 0.0]))], coloring, k, sub).evaluate(grid)

    assert np.max(np.abs(fv @ fw)) == 0.0
    assert np.max(np.abs(fw @ fv)) == 0.0


def test_phi_rejects_wrong_color(rng):
    sub, coloring = barycentric_subdivide(solid_triangle())
    a = random_pl_field(sub, 2, rng)
    with pytest.raises(InvalidInputError):
        phi_k(psi_k(a, coloring, 0), coloring, 1, sub)


def test_field_json_codec(rng):
    a = random_pl_field(circle(4), 3, rng)
    back = SimplicialField.from_dict(a.to_dict())
    assert np.array_equal(back.values, a.values)
    assert back.complex.maximal_simplices == a.complex.maximal_simplices


def test_bott_difference_field():
    a = bott_difference_field(octahedron_sphere())
    assert a.matrix_size == 3
    assert a.is_hermitian()
    assert is_trace_zero_field(a)
    assert a.sup_norm() == pytest.approx(1.0)


# ===== factorization =====

@pytest.mark.parametrize(
    "base", [circle(6), octahedron_sphere(), solid_triangle()], ids=["circle", "sphere", "triangle"]
)
def test_random_fields_decompose_into_dim_plus_one(base):
    rng = np.random.default_rng(7)
    sub, coloring = barycentric_subdivide(base)
    dim = sub.dimension

    for trial in range(100):
        a = random_pl_field(sub, 2 + trial % 2, rng)
        result = decompose_field(a, coloring)
        norm_inf = a.sup_norm()

        assert len(result.factors) == dim + 1
        assert result.report.passed, result.report.failures
        assert result.report.residual_norm <= 1e-8 * norm_inf
        for check in result.report.bound_checks:
            if check.name.startswith("factor_norm_sq"):
                assert check.measured_value <= 2.0 * norm_inf + 1e-8


def test_decompose_field_rejects_improper_coloring(rng):
    c = solid_triangle()
    a = random_pl_field(c, 2, rng)
    with pytest.raises(InvalidInputError):
        decompose_field(a, VertexColoring.from_list([0, 0, 1]))


def test_decompose_field_names_trace_violation(rng):
    c = solid_triangle()
    a = random_pl_field(c, 2, rng)
    values = a.values.copy()
    values[2] = np.eye(2)
    with pytest.raises(InvalidInputError) as e:
        decompose_field(SimplicialField(c, values), VertexColoring.from_list([0, 1, 2]))
    assert e.value.path == "$.field.values.2"


def test_measure_detects_tampered_factor(rng):
    sub, coloring = barycentric_subdivide(solid_triangle())
    a = random_pl_field(sub, 2, rng)
    result = decompose_field(a, coloring)

    factors = list(result.factors)
    first = factors[0]
    factors[0] = type(first)(first.color, first.vertices, 2.0 * first.matrices)
    report = measure_field_decomposition(a, factors)
    assert "grid_residual" in report.failures


def test_worker_pool_matches_sequential(rng):
    sub, coloring = barycentric_subdivide(solid_triangle())
    a = random_pl_field(sub, 3, rng)

    sequential = decompose_field(a, coloring, workers=1)
    pooled = decompose_field(a, coloring, workers=2)
    for f, g in zip(sequential.factors, pooled.factors):
        assert f.vertices == g.vertices
        assert np.allclose(f.matrices, g.matrices)


def test_subdivided_field_is_the_same_pl_field(rng):
    a = random_pl_field(solid_triangle(), 2, rng)
    refined, coloring = a.subdivide()
    assert coloring.is_proper(refined.complex)
    assert np.allclose(refined.values[-1], a.values.mean(axis=0))
    assert operator_norm(refined.values[0] - a.values[0]) == 0.0


# ===== refinement =====

def test_refinement_residuals_shrink():
    levels = refinement_residuals(levels=5)
    ratios = residual_ratios(levels)

    assert len(ratios) == 5
    assert all(level.decomposition_residual <= 1e-8 for level in levels)
    for r in range(1, 5):
        assert ratios[r] <= 0.6

"""
Rank witnesses, the single decomposition step, the truncated tower iteration
and the block two-commutator split.
"""

import numpy as np
import pytest

from fack.block_split import block_two_commutator_split
from fack.ramps import CUT, RAMP, SpectralRamp, apply_ramp, cuntz_rank
from fack.tower import (
    block_tower,
    count_bound,
    fack_iterate,
    random_block_tower,
    random_corner_element,
    regroup,
)
from fack.trapecio import trapecio_step, verify_trapecio
from fack.witness import cuntz_witness
from matcore.errors import InvalidInputError, PreconditionError
from matcore.linalg import commutator, operator_norm, random_hermitian
from matcore.verification import verify_decomposition


def step_model(rng, block_rank=4):
    tower = block_tower(block_rank=block_rank, blocks=2, epsilon=0.25)
    a, b = tower.elements[0], tower.cut(1)
    x = random_corner_element(tower, rng)
    return a, b, x


# ===== ramps =====

def test_ramp_values():
    ramp = SpectralRamp(0.5)
    assert np.allclose(ramp(np.array([0.0, 0.25, 0.375, 0.5, 2.0])), [0.0, 0.0, 0.5, 1.0, 1.0])
    assert np.allclose(ramp.cut(np.array([0.25, 1.0])), [0.0, 0.5])


def test_ramp_rejects_non_positive_epsilon():
    with pytest.raises(InvalidInputError):
        SpectralRamp(0.0)


def test_apply_ramp_requires_psd():
    with pytest.raises(InvalidInputError):
        apply_ramp(np.diag([1.0, -1.0]), 0.25)


def test_cut_and_ramp_ranks():
    a = np.diag([1.0, 0.2, 0.05, 0.0])
    assert cuntz_rank(apply_ramp(a, 0.5, RAMP)) == 1
    assert cuntz_rank(apply_ramp(a, 0.1, RAMP)) == 2
    assert cuntz_rank(apply_ramp(a, 0.1, CUT)) == 2


# ===== witness =====

@pytest.mark.parametrize("L,K", [(1, 1), (2, 1), (3, 2)])
def test_witness_contract(L, K):
    tower = block_tower(block_rank=3, blocks=2, epsilon=0.25)
    w = cuntz_witness(tower.elements[0], tower.cut(1), L, K, 0.25)
    assert w.V.shape == ((L + K - 1) * 6, L * 6)
    assert w.gram_defect() <= 1e-8
    assert w.range_defect() <= 1e-8


def test_witness_rank_condition_failure():
    a = np.diag([1.0, 1.0, 0.0, 0.0])
    b = np.diag([0.0, 0.0, 1.0, 0.0])
    with pytest.raises(PreconditionError, match="rank condition"):
        cuntz_witness(a, b, 1, 1, 0.25)


# ===== trapecio step =====

@pytest.mark.parametrize("L", [1, 2, 3])
@pytest.mark.parametrize("K", [1, 2, 3])
def test_trapecio_certificates(L, K):
    rng = np.random.default_rng(100 * L + K)
    a, b, x = step_model(rng)
    norm_x = operator_norm(x)

    result = trapecio_step(x, a, b, L, K, 0.25)

    assert result.commutator_count == L * (L + K - 1)
    assert operator_norm(result.z) <= K * norm_x + 1e-8
    for p, q in result.commutators:
        assert operator_norm(p) * operator_norm(q) <= norm_x + 1e-8

    total = sum(commutator(p, q) for p, q in result.commutators)
    assert operator_norm(x - total - result.z) <= 1e-8 * norm_x

    assert result.certificates.passed, result.certificates.failures
    assert verify_trapecio(x, result).passed


def test_trapecio_remainder_lives_in_b():
    rng = np.random.default_rng(5)
    a, b, x = step_model(rng)
    result = trapecio_step(x, a, b, 2, 1, 0.25)
    p = np.diag([0.0] * 4 + [1.0] * 4)
    assert operator_norm(result.z - p @ result.z @ p) <= 1e-8


def test_trapecio_rejects_x_outside_corner(rng):
    a, b, _ = step_model(rng)
    with pytest.raises(PreconditionError):
        trapecio_step(np.eye(8), a, b, 1, 1, 0.25)


# ===== tower iteration =====

@pytest.mark.parametrize("L,K,M", [(1, 1, 1), (2, 1, 1), (2, 2, 3)])
def test_fack_iterate_depth_four(L, K, M):
    rng = np.random.default_rng(11 * L + K)
    tower = random_block_tower(rng, block_rank=3, blocks=5, epsilon=0.25, L=L, K=K, M=M)
    z0 = random_corner_element(tower, rng)

    decomposition, records = fack_iterate(z0, tower, 4)
    per_step = L * (L + K - 1)

    assert len(records) == 4
    assert decomposition.commutator_count <= per_step + max(M, per_step)
    assert operator_norm(z0 - decomposition.reconstruct()) <= 2.0 ** -4

    report = verify_decomposition(z0, decomposition, {"consistency": 1e-8 * max(1.0, operator_norm(z0))})
    assert report.passed, report.failures


@pytest.mark.parametrize("L,K,M", [(1, 1, 1), (2, 1, 1)])
def test_fack_iterate_carries_remainder_through_every_stage(L, K, M):
    rng = np.random.default_rng(5 * L + K)
    tower = random_block_tower(rng, block_rank=3, blocks=5, epsilon=0.25, L=L, K=K, M=M)
    z0 = random_corner_element(tower, rng)

    decomposition, records = fack_iterate(z0, tower, 4, approximate_inner=True)
    per_step = L * (L + K - 1)
    scale = operator_norm(z0)

    for r in records[1:]:
        assert max(operator_norm(commutator(c, d)) for c, d in r.trapecio.commutators) > 1e-6 * scale
    for r in records:
        assert 0.0 < r.remainder_norm <= tower.delta(r.stage)

    bound = count_bound(tower, carried_past_first=True)
    assert bound == 2 * per_step + M
    assert decomposition.commutator_count <= bound
    assert operator_norm(decomposition.residual) <= tower.delta(4)

    report = verify_decomposition(z0, decomposition, {"consistency": 1e-8 * max(1.0, scale)})
    assert report.passed, report.failures


def test_regroup_merges_only_orthogonal_pairs():
    def unit(i, j):
        out = np.zeros((6, 6), dtype=complex)
        out[i, j] = 1.0
        return out

    pairs = [(unit(0, 1), unit(1, 0)), (unit(2, 3), unit(3, 2)), (unit(1, 2), unit(2, 1))]
    grouped = regroup(pairs, 6)

    assert len(grouped) == 2
    total = sum(commutator(c, d) for c, d in grouped)
    assert np.allclose(total, sum(commutator(c, d) for c, d in pairs))


def test_fack_iterate_rejects_mismatched_z0():
    tower = block_tower(block_rank=2, blocks=3)
    with pytest.raises(InvalidInputError) as e:
        fack_iterate(np.diag([1.0, -1.0]), tower, 1)
    assert e.value.path == "$.z0"


def test_tower_rejects_mismatched_elements():
    tower = block_tower(block_rank=2, blocks=3)
    elements = list(tower.elements)
    elements[1] = np.eye(4)
    broken = type(tower)(elements, tower.epsilons, tower.L, tower.K)
    with pytest.raises(InvalidInputError) as e:
        broken.validate()
    assert e.value.path == "$.elements[1]"


def test_fack_iterate_depth_zero_keeps_element(rng):
    tower = block_tower(block_rank=2, blocks=3)
    z0 = random_corner_element(tower, rng)
    decomposition, records = fack_iterate(z0, tower, 0)
    assert records == []
    assert decomposition.commutator_count == 0
    assert np.allclose(decomposition.residual, z0)


def test_fack_iterate_rejects_excess_depth(rng):
    tower = block_tower(block_rank=2, blocks=3)
    z0 = random_corner_element(tower, rng)
    with pytest.raises(InvalidInputError):
        fack_iterate(z0, tower, 3)


def test_tower_rejects_overlapping_elements():
    tower = block_tower(block_rank=2, blocks=3)
    elements = list(tower.elements)
    elements[2] = elements[1]
    broken = type(tower)(elements, tower.epsilons, tower.L, tower.K)
    with pytest.raises(PreconditionError, match="not orthogonal"):
        broken.validate()


def test_tower_json_codec(rng):
    tower = random_block_tower(rng, block_rank=2, blocks=3)
    back = type(tower).from_dict(tower.to_dict())
    assert back.depth == tower.depth
    assert all(np.allclose(p, q) for p, q in zip(back.elements, tower.elements))


# ===== block split =====

def block_instance(rng, n, m=2):
    pairs = [
        (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)),
         rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
        for _ in range(n)
    ]
    defects = [random_hermitian(m, rng) for _ in range(n - 1)]
    defects.append(-sum(defects) if defects else np.zeros((m, m)))

    b = rng.standard_normal((n * m, n * m)) + 1j * rng.standard_normal((n * m, n * m))
    for i, (x, y) in enumerate(pairs):
        b[i * m:(i + 1) * m, i * m:(i + 1) * m] = defects[i] + commutator(x, y)
    return b, pairs


def test_block_split_on_seeded_instances():
    rng = np.random.default_rng(52)
    for trial in range(100):
        n = 2 + trial % 5
        b, pairs = block_instance(rng, n)
        split = block_two_commutator_split(b, pairs, np.eye(2))

        assert operator_norm(b - split.b_doubleprime - commutator(split.S, split.E)) <= 1e-9 * operator_norm(b)
        assert split.report.passed, split.report.failures


def test_block_split_rejects_trace_condition(rng):
    b, pairs = block_instance(rng, 3)
    b[:2, :2] += np.eye(2)
    with pytest.raises(PreconditionError):
        block_two_commutator_split(b, pairs, np.eye(2))


def test_block_split_single_block():
    rng = np.random.default_rng(3)
    b, pairs = block_instance(rng, 1)
    split = block_two_commutator_split(b, pairs, np.eye(2))
    assert np.allclose(split.S, 0.0)

    b[0, 0] += 1.0
    with pytest.raises(PreconditionError, match="single block"):
        block_two_commutator_split(b, pairs, np.eye(2))


def test_block_split_shape_mismatch(rng):
    b, pairs = block_instance(rng, 2)
    with pytest.raises(InvalidInputError):
        block_two_commutator_split(b, pairs[:1], np.eye(2))


def test_block_split_flags_non_unit_ramp():
    rng = np.random.default_rng(8)
    b, pairs = block_instance(rng, 3)
    split = block_two_commutator_split(b, pairs, 0.5 * np.eye(2))
    assert "defect_blocks" in split.report.failures

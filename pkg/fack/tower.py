"""
tower.py
Truncated iteration over a tower of positive elements e_0, e_1, ..., e_T
(e_i orthogonal for i, j >= 1).

Stage i >= 1:
  S_i  trapecio step of the carried remainder from her((e_{i-1} - eps_{i-1})_+)
       into b = (e_i - eps_i)_+, leaving z_i in her(b)
  T_i  single commutator of z_i inside her(b): the tight decomposition of the
       compression of z_i to range(b), lifted back; nothing is carried over

  With approximate_inner the inner step leaves delta_i / 2 of z_i behind,
  so later stages get a nonzero carried remainder.

Regrouping: S_i touches the corners i-1 and i, T_i only corner i. Pairs that
fail the orthogonality relations are joined in a conflict graph, coloured
greedily in stage order; each colour class collapses to one commutator.
The count is at most N + max(M, N) when nothing is carried past stage 1,
and otherwise the largest clique over a corner, 2N + M (plus N when e_0
overlaps a later corner), with N = L(L+K-1).
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from constants import FACK_RUN, FACK_TOL, ORTHOGONALITY_TOL, RANK_THRESHOLD, TRACE_ZERO_TOL
from matcore.decomposition import (
    GENERAL_COMMUTATORS,
    ClaimedBound,
    CommutatorDecomposition,
    make_decomposition,
)
from matcore.errors import InvalidInputError, PreconditionError
from matcore.linalg import compression_defect, operator_norm, random_unitary, range_basis
from matcore.matrices import as_hermitian, matrix_from_json, matrix_to_json
from fack.ramps import CUT, RAMP, apply_ramp, cuntz_rank
from fack.trapecio import TrapecioResult, trapecio_step
from selfcomm.collapse import balance_pair, collapse_orthogonal, pairs_orthogonal
from selfcomm.decompose import tight_commutator_decompose

logger = logging.getLogger("fack")

Pair = Tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class TowerModel:
    elements: List[np.ndarray]
    epsilons: List[float]
    L: int
    K: int
    M: int = 1
    deltas: List[float] = field(default_factory=list)

    @property
    def size(self) -> int:
        return int(self.elements[0].shape[0])

    @property
    def depth(self) -> int:
        return len(self.elements) - 1

    def delta(self, i: int) -> float:
        if i < len(self.deltas):
            return float(self.deltas[i])
        return 2.0 ** (-i)

    def cut(self, i: int) -> np.ndarray:
        return apply_ramp(self.elements[i], self.epsilons[i], CUT, name=f"elements[{i}]")

    def validate(self, tol: float = ORTHOGONALITY_TOL, threshold: float = RANK_THRESHOLD) -> None:
        if len(self.epsilons) != len(self.elements):
            raise InvalidInputError(
                f"{len(self.elements)} elements but {len(self.epsilons)} thresholds", "$.epsilons"
            )
        if self.L < 1 or self.K < 1 or self.M < 1:
            raise InvalidInputError("L, K and M must be positive")

        shape = self.elements[0].shape
        for i, e in enumerate(self.elements):
            if e.ndim != 2 or e.shape != shape or shape[0] != shape[1]:
                raise InvalidInputError(
                    f"element {i} has shape {e.shape}, expected square {shape}",
                    f"$.elements[{i}]",
                )

        for i in range(1, len(self.elements)):
            for j in range(i + 1, len(self.elements)):
                overlap = operator_norm(self.elements[i] @ self.elements[j])
                if overlap > tol:
                    raise PreconditionError(
                        f"tower elements {i} and {j} are not orthogonal: {overlap:.3e}",
                        f"$.elements[{j}]",
                    )

        for i in range(len(self.elements) - 1):
            lhs = self.L * cuntz_rank(
                apply_ramp(self.elements[i], self.epsilons[i], RAMP), threshold
            )
            rhs = (self.L - 1) * cuntz_rank(self.cut(i), threshold) \
                + self.K * cuntz_rank(self.cut(i + 1), threshold)
            if lhs > rhs:
                raise PreconditionError(
                    f"stage {i}: rank condition fails ({lhs} > {rhs})", f"$.elements[{i}]"
                )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "elements": [matrix_to_json(e) for e in self.elements],
            "epsilons": [float(e) for e in self.epsilons],
            "L": self.L,
            "K": self.K,
            "M": self.M,
            "deltas": [self.delta(i) for i in range(len(self.elements))],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], path: str = "$.tower") -> "TowerModel":
        elements = [
            as_hermitian(matrix_from_json(m, f"{path}.elements[{i}]"), f"elements[{i}]")
            for i, m in enumerate(doc["elements"])
        ]
        return cls(
            elements=elements,
            epsilons=[float(e) for e in doc["epsilons"]],
            L=int(doc["L"]),
            K=int(doc["K"]),
            M=int(doc.get("M", 1)),
            deltas=[float(d) for d in doc.get("deltas", [])],
        )

# ================================
# CONSTRUCTORS
# ================================

def _block_embed(block: np.ndarray, index: int, rank: int, size: int) -> np.ndarray:
    out = np.zeros((size, size), dtype=np.complex128)
    lo = index * rank
    out[lo:lo + rank, lo:lo + rank] = block
    return out


def block_tower(block_rank: int = FACK_RUN["block_rank"], blocks: int = FACK_RUN["blocks"],
                epsilon: float = FACK_RUN["epsilon"], L: int = FACK_RUN["L"],
                K: int = FACK_RUN["K"], M: int = FACK_RUN["M"],
                size: Optional[int] = None) -> TowerModel:
    """Projections of equal rank on consecutive disjoint diagonal blocks."""
    size = size or block_rank * blocks
    if size < block_rank * blocks:
        raise InvalidInputError(f"size {size} cannot hold {blocks} blocks of rank {block_rank}")

    eye = np.eye(block_rank)
    elements = [_block_embed(eye, i, block_rank, size) for i in range(blocks)]

    return TowerModel(
        elements=elements,
        epsilons=[float(epsilon)] * blocks,
        L=L, K=K, M=M,
        deltas=[2.0 ** (-i) for i in range(blocks)],
    )


def random_block_tower(rng: np.random.Generator, block_rank: int = FACK_RUN["block_rank"],
                       blocks: int = FACK_RUN["blocks"], epsilon: float = FACK_RUN["epsilon"],
                       L: int = FACK_RUN["L"], K: int = FACK_RUN["K"],
                       M: int = FACK_RUN["M"]) -> TowerModel:
    """Random positive blocks with spectrum in [2 eps, 1]."""
    size = block_rank * blocks
    elements = []

    for i in range(blocks):
        u = random_unitary(block_rank, rng)
        spectrum = rng.uniform(2.0 * epsilon, 1.0, block_rank)
        elements.append(_block_embed((u * spectrum) @ u.conj().T, i, block_rank, size))

    return TowerModel(
        elements=elements,
        epsilons=[float(epsilon)] * blocks,
        L=L, K=K, M=M,
        deltas=[2.0 ** (-i) for i in range(blocks)],
    )


def random_corner_element(tower: TowerModel, rng: np.random.Generator) -> np.ndarray:
    """Seeded trace-zero Hermitian z_0 in her((e_0 - eps_0)_+)."""
    q = range_basis(tower.cut(0))
    r = q.shape[1]
    g = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    h = (g + g.conj().T) / 2.0
    h -= (np.trace(h).real / r) * np.eye(r)
    return q @ h @ q.conj().T

# ================================
# ITERATION
# ================================

@dataclass(frozen=True)
class StageRecord:
    stage: int
    trapecio: TrapecioResult
    inner: Pair
    remainder_norm: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "stage": self.stage,
            "trapecio": self.trapecio.to_dict(),
            "inner_product_norm": operator_norm(self.inner[0]) * operator_norm(self.inner[1]),
            "remainder_norm": self.remainder_norm,
        }


def _inner_step(z: np.ndarray, corner: np.ndarray, keep: float = 0.0) -> Pair:
    q = range_basis(corner)
    compressed = q.conj().T @ z @ q
    compressed = (1.0 - keep) * (compressed + compressed.conj().T) / 2.0

    tight = tight_commutator_decompose(compressed, tol=TRACE_ZERO_TOL)
    x, y = tight.factors[0]
    return q @ x @ q.conj().T, q @ y @ q.conj().T


def _kept_fraction(z: np.ndarray, delta: float) -> float:
    norm = operator_norm(z)
    if norm == 0.0:
        return 0.0
    return min(0.5, delta / (2.0 * norm))


def _nonzero(pairs: Sequence[Pair], scale: float, tol: float) -> bool:
    return any(
        operator_norm(c @ d - d @ c) > tol * scale
        for c, d in pairs
    )


def conflict_graph(pairs: Sequence[Pair], tol: float = ORTHOGONALITY_TOL) -> nx.Graph:
    """Nodes are pair indices; an edge means the two pairs cannot share a commutator."""
    g = nx.Graph()
    g.add_nodes_from(range(len(pairs)))
    for i, j in combinations(range(len(pairs)), 2):
        if not pairs_orthogonal(pairs[i], pairs[j], tol):
            g.add_edge(i, j)
    return g


def regroup(pairs: Sequence[Pair], size: int, tol: float = ORTHOGONALITY_TOL) -> List[Pair]:
    """Greedy colouring in list order; every colour class collapses to one pair."""
    balanced = [balance_pair(*p) for p in pairs]
    colors = nx.greedy_color(conflict_graph(balanced, tol), strategy=lambda g, _: sorted(g))

    classes: Dict[int, List[Pair]] = {}
    for i, pair in enumerate(balanced):
        classes.setdefault(colors[i], []).append(pair)

    return [collapse_orthogonal(classes[k], size=size, tol=tol) for k in sorted(classes)]


def count_bound(tower: TowerModel, carried_past_first: bool) -> int:
    per_step = tower.L * (tower.L + tower.K - 1)
    if not carried_past_first:
        return per_step + max(tower.M, per_step)

    bound = 2 * per_step + tower.M
    e0 = tower.elements[0]
    if any(operator_norm(e0 @ e) > ORTHOGONALITY_TOL for e in tower.elements[2:]):
        bound += per_step
    return bound


def fack_iterate(z0, tower: TowerModel, depth: int, tol: float = FACK_TOL,
                 approximate_inner: bool = False) -> Tuple[CommutatorDecomposition, List[StageRecord]]:
    z0 = as_hermitian(z0, "z0")
    tower.validate()

    if z0.shape != (tower.size, tower.size):
        raise InvalidInputError(
            f"z0 has shape {z0.shape}, tower elements are {tower.size}x{tower.size}", "$.z0"
        )
    if depth < 0:
        raise InvalidInputError(f"depth must be >= 0, got {depth}", "$.depth")
    if depth > tower.depth:
        raise InvalidInputError(
            f"depth {depth} exceeds tower depth {tower.depth}", "$.depth"
        )

    n = z0.shape[0]
    norm_z0 = operator_norm(z0)
    L, K = tower.L, tower.K

    trace = abs(np.trace(z0))
    if trace > TRACE_ZERO_TOL * n * max(norm_z0, 1e-300):
        raise InvalidInputError(f"z0: trace not zero ({trace:.3e})", "$.z0")

    corner0 = tower.cut(0)
    q0 = range_basis(corner0)
    if compression_defect(z0, q0 @ q0.conj().T) > tol * norm_z0:
        raise PreconditionError("z0 is not in her((e_0 - eps_0)_+)", "$.z0")

    if depth == 0:
        decomposition = make_decomposition(
            GENERAL_COMMUTATORS, [], z0,
            [
                ClaimedBound("commutator_count", 0.0, 0.0),
                ClaimedBound("remainder_norm", norm_z0, tol * max(1.0, norm_z0)),
            ],
        )
        return decomposition, []

    carried = z0
    records: List[StageRecord] = []

    for i in range(1, depth + 1):
        b = tower.cut(i)
        step = trapecio_step(carried, tower.elements[i - 1], b, L, K, tower.epsilons[i - 1], tol)

        keep = _kept_fraction(step.z, tower.delta(i)) if approximate_inner else 0.0
        inner = _inner_step(step.z, b, keep)
        leftover = step.z - (inner[0] @ inner[1] - inner[1] @ inner[0])

        # Compress onto the next corner so the next stage sees an exact hereditary input.
        q = range_basis(b)
        carried = q @ (q.conj().T @ leftover @ q) @ q.conj().T
        carried = (carried + carried.conj().T) / 2.0
        if operator_norm(carried) <= tol * norm_z0:
            carried = np.zeros_like(carried)

        records.append(StageRecord(i, step, inner, operator_norm(carried)))

        logger.info(
            f"[FACK] stage {i}: ||z_{i}||={operator_norm(step.z):.3e}, "
            f"carried {operator_norm(carried):.3e}"
        )

    scale = max(norm_z0, 1e-300)

    # Corner order: S_1, T_1, S_2, T_2, ...
    pairs: List[Pair] = []
    carried_past_first = False
    for r in records:
        if _nonzero(r.trapecio.commutators, scale, tol):
            pairs += r.trapecio.commutators
            carried_past_first = carried_past_first or r.stage >= 2
        if _nonzero([r.inner], scale, tol):
            pairs.append(r.inner)

    factors = regroup(pairs, n)

    residual = carried
    bound_count = count_bound(tower, carried_past_first)
    delta = tower.delta(depth)

    decomposition = make_decomposition(
        GENERAL_COMMUTATORS, factors, residual,
        [
            ClaimedBound("commutator_count", float(bound_count), 0.0),
            ClaimedBound("residual_norm", delta, tol * max(1.0, norm_z0)),
            ClaimedBound("factor_norm_product", K * norm_z0, tol * max(1.0, norm_z0)),
        ],
    )

    logger.info(
        f"[FACK] depth {depth}: {len(pairs)} pairs regrouped into "
        f"{decomposition.commutator_count} commutators (bound {bound_count}), "
        f"residual {operator_norm(residual):.3e} <= {delta:.3e}"
    )

    return decomposition, records

"""
complexes.py
Finite simplicial complexes, barycentric subdivision and vertex colorings.

A complex is stored through its maximal simplices; faces are derived. Vertex
positions are optional and only used for geometric targets (meshes,
refinement studies); subdivision places new vertices at barycenters.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from matcore.errors import InvalidInputError

logger = logging.getLogger("ozfield")

Simplex = Tuple[int, ...]


def _normalize(simplices: Sequence[Sequence[int]], vertex_count: int) -> Tuple[Simplex, ...]:
    cleaned = []

    for i, s in enumerate(simplices):
        ids = tuple(int(v) for v in s)
        if not ids:
            raise InvalidInputError("simplex must be non-empty", f"$.simplices[{i}]")
        if len(set(ids)) != len(ids):
            raise InvalidInputError(f"repeated vertex in simplex {list(ids)}", f"$.simplices[{i}]")
        if min(ids) < 0 or max(ids) >= vertex_count:
            raise InvalidInputError(
                f"vertex id out of range 0..{vertex_count - 1}", f"$.simplices[{i}]"
            )
        cleaned.append(tuple(sorted(ids)))

    unique = sorted(set(cleaned), key=lambda s: (len(s), s))

    # Drop simplices that are faces of larger ones.
    maximal = [
        s for s in unique
        if not any(len(t) > len(s) and set(s) <= set(t) for t in unique)
    ]
    return tuple(sorted(maximal))


@dataclass(frozen=True)
class SimplicialComplex:
    vertex_count: int
    maximal_simplices: Tuple[Simplex, ...]
    positions: Optional[np.ndarray] = None

    @classmethod
    def build(cls, vertex_count: int, simplices: Sequence[Sequence[int]],
              positions=None) -> "SimplicialComplex":
        if int(vertex_count) < 1:
            raise InvalidInputError("complex needs at least one vertex", "$.vertices")
        if not simplices:
            raise InvalidInputError("complex needs at least one simplex", "$.simplices")

        pos = None
        if positions is not None:
            pos = np.asarray(positions, dtype=float)
            if pos.ndim != 2 or pos.shape[0] != vertex_count:
                raise InvalidInputError(
                    f"positions must have one row per vertex, got shape {pos.shape}",
                    "$.positions",
                )

        return cls(int(vertex_count), _normalize(simplices, int(vertex_count)), pos)

    @property
    def dimension(self) -> int:
        return max(len(s) for s in self.maximal_simplices) - 1

    def faces(self) -> List[Simplex]:
        """Every face, ordered by (dimension, vertex tuple); all vertices come first."""
        found = {(v,) for v in range(self.vertex_count)}
        for s in self.maximal_simplices:
            for k in range(1, len(s) + 1):
                found.update(combinations(s, k))
        return sorted(found, key=lambda f: (len(f), f))

    def graph(self) -> nx.Graph:
        """1-skeleton; isolated vertices stay as nodes."""
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        for s in self.maximal_simplices:
            g.add_edges_from(combinations(s, 2))
        return g

    def edges(self) -> List[Tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.graph().edges)

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "vertices": self.vertex_count,
            "simplices": [list(s) for s in self.maximal_simplices],
        }
        if self.positions is not None:
            doc["positions"] = self.positions.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "SimplicialComplex":
        return cls.build(doc["vertices"], doc["simplices"], doc.get("positions"))


@dataclass(frozen=True)
class VertexColoring:
    colors: np.ndarray
    color_count: int

    def vertices_of(self, k: int) -> List[int]:
        if not 0 <= k < self.color_count:
            raise InvalidInputError(f"color {k} out of range 0..{self.color_count - 1}")
        return [int(v) for v in np.flatnonzero(self.colors == k)]

    def is_proper(self, c: SimplicialComplex) -> bool:
        if self.colors.size != c.vertex_count:
            return False
        return all(self.colors[u] != self.colors[v] for u, v in c.edges())

    def to_dict(self) -> Dict[str, Any]:
        return {"colors": [int(k) for k in self.colors], "color_count": self.color_count}

    @classmethod
    def from_list(cls, colors: Sequence[int]) -> "VertexColoring":
        arr = np.asarray(colors, dtype=int)
        if arr.size == 0 or arr.min() < 0:
            raise InvalidInputError("colors must be non-negative integers", "$.coloring")
        return cls(arr, int(arr.max()) + 1)


def barycentric_subdivide(c: SimplicialComplex) -> Tuple[SimplicialComplex, VertexColoring]:
    """
    Vertices of the result are the faces of c (original vertices keep their
    ids); maximal simplices are full flags. Coloring by face dimension is
    proper with dimension + 1 colors.
    """
    faces = c.faces()
    index = {f: i for i, f in enumerate(faces)}

    flags = set()
    for s in c.maximal_simplices:
        for perm in permutations(s):
            flags.add(tuple(sorted(index[tuple(sorted(perm[:k + 1]))] for k in range(len(s)))))

    positions = None
    if c.positions is not None:
        positions = np.array([c.positions[list(f)].mean(axis=0) for f in faces])

    sub = SimplicialComplex(len(faces), tuple(sorted(flags)), positions)
    coloring = VertexColoring(np.array([len(f) - 1 for f in faces], dtype=int), c.dimension + 1)

    logger.debug(
        f"[OZFIELD] subdivided {c.vertex_count} vertices / {len(c.maximal_simplices)} simplices "
        f"-> {sub.vertex_count} / {len(sub.maximal_simplices)}"
    )

    return sub, coloring


def greedy_coloring(c: SimplicialComplex) -> VertexColoring:
    """Smallest free color in vertex-id order; may exceed dimension + 1 colors."""
    assigned = nx.greedy_color(c.graph(), strategy=lambda g, colors: sorted(g))
    colors = np.array([assigned[v] for v in range(c.vertex_count)], dtype=int)

    coloring = VertexColoring(colors, int(colors.max()) + 1)

    if coloring.color_count > c.dimension + 1:
        logger.warning(
            f"[OZFIELD] greedy coloring used {coloring.color_count} colors "
            f"for a complex of dimension {c.dimension}"
        )

    return coloring

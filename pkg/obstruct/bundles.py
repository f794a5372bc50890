"""
bundles.py
Formal sums of line bundles over products of 2-spheres and their Euler
classes.

Variables are organised in groups: a group of k variables stands for k
sphere factors carrying one tensor power P^{(x)k}, whose first Chern class is
the sum of the group's variables. A summand is an integer vector over groups
with a multiplicity, so towers over millions of variables stay symbolic.
"""

import logging
from dataclasses import dataclass
from math import comb, factorial
from typing import Any, Dict, List, Optional, Sequence, Tuple

from constants import MAX_EXPLICIT_TERMS
from matcore.errors import InvalidInputError
from obstruct.ring import SquareFreeClass, sqfree_mul

logger = logging.getLogger("obstruct")

Vector = Tuple[int, ...]

# Factorials and binomials beyond this argument are reported symbolically.
MAX_LITERAL_ARGUMENT = 200


@dataclass(frozen=True)
class BundleExpr:
    group_sizes: Tuple[int, ...]
    summands: Tuple[Tuple[Vector, int], ...]

    def __post_init__(self):
        if any(g < 1 for g in self.group_sizes):
            raise InvalidInputError("group sizes must be positive", "$.group_sizes")
        for i, (vector, multiplicity) in enumerate(self.summands):
            if len(vector) != len(self.group_sizes):
                raise InvalidInputError(
                    f"summand {i} has {len(vector)} entries for {len(self.group_sizes)} groups",
                    f"$.summands[{i}]",
                )
            if multiplicity < 1:
                raise InvalidInputError(f"summand {i}: multiplicity must be positive",
                                        f"$.summands[{i}]")

    # ----- constructors -----

    @classmethod
    def line(cls, vector: Sequence[int], group_sizes: Optional[Sequence[int]] = None,
             multiplicity: int = 1) -> "BundleExpr":
        sizes = tuple(group_sizes) if group_sizes is not None else (1,) * len(vector)
        return cls(sizes, ((tuple(int(c) for c in vector), int(multiplicity)),))

    @classmethod
    def trivial(cls, variables: int, rank: int = 1) -> "BundleExpr":
        return cls.line([0] * variables, multiplicity=rank)

    # ----- structure -----

    @property
    def variable_count(self) -> int:
        return sum(self.group_sizes)

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.summands)

    def direct_sum(self, other: "BundleExpr") -> "BundleExpr":
        if self.group_sizes != other.group_sizes:
            raise InvalidInputError("direct sum needs identical variable groups")
        return BundleExpr(self.group_sizes, self.summands + other.summands)

    def multiple(self, n: int) -> "BundleExpr":
        """n-fold direct sum."""
        if n < 1:
            raise InvalidInputError(f"multiple must be positive, got {n}")
        return BundleExpr(self.group_sizes, tuple((v, m * n) for v, m in self.summands))

    def merged(self) -> Dict[Vector, int]:
        out: Dict[Vector, int] = {}
        for vector, multiplicity in self.summands:
            out[vector] = out.get(vector, 0) + multiplicity
        return out

    def variable_coefficients(self, vector: Vector) -> List[int]:
        out: List[int] = []
        for c, size in zip(vector, self.group_sizes):
            out.extend([c] * size)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group_sizes": [str(g) for g in self.group_sizes],
            "summands": [
                {"c": list(v), "multiplicity": str(m)} for v, m in self.summands
            ],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "BundleExpr":
        summands = tuple(
            (tuple(int(c) for c in s["c"]), int(s.get("multiplicity", 1)))
            for s in doc["summands"]
        )
        if "group_sizes" in doc:
            sizes = tuple(int(g) for g in doc["group_sizes"])
        else:
            sizes = (1,) * int(doc["variables"])
        return cls(sizes, summands)


def trivialization_rank(b: BundleExpr) -> int:
    """Rank of a trivial bundle containing b: each line with class sum c_i a_i sits in rank 2^{sum |c_i|}."""
    return sum(
        m * 2 ** sum(abs(c) * g for c, g in zip(v, b.group_sizes))
        for v, m in b.summands
    )

# ================================
# EULER CLASSES
# ================================

@dataclass(frozen=True)
class EulerFactor:
    vector: Vector
    exponent: int
    support_size: int

    @property
    def is_zero(self) -> bool:
        return self.exponent > self.support_size

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": list(self.vector),
            "exponent": str(self.exponent),
            "support_size": str(self.support_size),
            "coefficient": str(factorial(self.exponent))
            if self.exponent <= MAX_LITERAL_ARGUMENT else f"{self.exponent}!",
            "terms": str(comb(self.support_size, self.exponent))
            if self.support_size <= MAX_LITERAL_ARGUMENT
            else f"binomial({self.support_size}, {self.exponent})",
        }


@dataclass(frozen=True)
class FactoredEulerClass:
    """
    Product over distinct linear forms l with pairwise disjoint supports of
    l^e = e! * sum_{|T| = e} prod_{i in T} c_i a_T. A factor vanishes iff e
    exceeds the number of variables in its support, so the product is zero
    iff some factor is.
    """
    bundle: BundleExpr
    factors: Tuple[EulerFactor, ...]

    def is_zero(self) -> bool:
        return any(f.is_zero for f in self.factors)

    @property
    def degree(self) -> int:
        return sum(f.exponent for f in self.factors)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "form": "factored",
            "variables": str(self.bundle.variable_count),
            "degree": str(self.degree),
            "factors": [f.to_dict() for f in self.factors],
            "is_zero": self.is_zero(),
        }


def _support(vector: Vector) -> frozenset:
    return frozenset(i for i, c in enumerate(vector) if c)


def factored_euler_class(b: BundleExpr) -> FactoredEulerClass:
    merged = b.merged()
    supports = {v: _support(v) for v in merged}

    vectors = list(merged)
    for i, v in enumerate(vectors):
        for w in vectors[i + 1:]:
            if supports[v] & supports[w]:
                raise InvalidInputError(
                    f"summands {list(v)} and {list(w)} overlap; the class does not factor"
                )

    factors = tuple(
        EulerFactor(v, e, sum(b.group_sizes[g] for g in supports[v]))
        for v, e in merged.items()
    )
    return FactoredEulerClass(b, factors)


def _explicit_fits(m: int, rank: int, max_terms: int) -> bool:
    # Intermediate products peak at degree min(rank, m // 2).
    return m <= MAX_LITERAL_ARGUMENT and comb(m, min(rank, m // 2)) <= max_terms


def explicit_euler_class(b: BundleExpr, max_terms: int = MAX_EXPLICIT_TERMS) -> SquareFreeClass:
    m = b.variable_count

    if b.rank > m:
        return SquareFreeClass.zero(m)
    if not _explicit_fits(m, b.rank, max_terms):
        raise InvalidInputError(
            f"explicit Euler class of rank {b.rank} over {m} variables exceeds {max_terms} terms"
        )

    result = SquareFreeClass.unit(m)
    for vector, multiplicity in b.summands:
        form = SquareFreeClass.linear(b.variable_coefficients(vector))
        for _ in range(multiplicity):
            result = sqfree_mul(result, form)
            if result.is_zero():
                return result
    return result


def euler_class(b: BundleExpr, max_terms: int = MAX_EXPLICIT_TERMS):
    """
    Product of the summands' first Chern classes. Explicit when it fits in
    max_terms monomials, factored otherwise.
    """
    m = b.variable_count
    if b.rank > m or _explicit_fits(m, b.rank, max_terms):
        return explicit_euler_class(b, max_terms)

    logger.debug(f"[OBSTRUCT] factored Euler class: rank {b.rank} over {m} variables")
    return factored_euler_class(b)


def class_to_dict(e) -> Dict[str, Any]:
    doc = e.to_dict()
    if isinstance(e, SquareFreeClass):
        doc["form"] = "explicit"
    return doc

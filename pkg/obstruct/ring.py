"""
ring.py
Exact integer cohomology ring Z[a_1..a_m]/(a_i^2 = 0) of a product of m
2-spheres. A class maps square-free monomials (frozensets of 1-based variable
indices) to Python ints.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, Mapping, Sequence

from matcore.errors import InvalidInputError

Monomial = FrozenSet[int]


def _clean(coefficients: Mapping[Monomial, int], m: int) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}
    for key, value in coefficients.items():
        key = frozenset(key)
        if key and (min(key) < 1 or max(key) > m):
            raise InvalidInputError(f"monomial {sorted(key)} uses variables outside 1..{m}")
        if value:
            out[key] = out.get(key, 0) + int(value)
    return {k: v for k, v in out.items() if v}


def monomial_key(mono: Monomial) -> str:
    return ",".join(str(i) for i in sorted(mono))


def parse_monomial_key(key: str) -> Monomial:
    key = key.strip()
    return frozenset(int(p) for p in key.split(",")) if key else frozenset()


@dataclass(frozen=True)
class SquareFreeClass:
    variable_count: int
    coefficients: Dict[Monomial, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.variable_count < 0:
            raise InvalidInputError("variable count must be non-negative")
        object.__setattr__(self, "coefficients", _clean(self.coefficients, self.variable_count))

    # ----- constructors -----

    @classmethod
    def zero(cls, m: int) -> "SquareFreeClass":
        return cls(m, {})

    @classmethod
    def unit(cls, m: int) -> "SquareFreeClass":
        return cls(m, {frozenset(): 1})

    @classmethod
    def variable(cls, i: int, m: int) -> "SquareFreeClass":
        return cls(m, {frozenset([i]): 1})

    @classmethod
    def linear(cls, c: Sequence[int]) -> "SquareFreeClass":
        """sum_i c_i a_i over len(c) variables."""
        return cls(len(c), {frozenset([i + 1]): int(v) for i, v in enumerate(c) if v})

    # ----- arithmetic -----

    def _same_ring(self, other: "SquareFreeClass") -> None:
        if self.variable_count != other.variable_count:
            raise InvalidInputError(
                f"variable count mismatch: {self.variable_count} vs {other.variable_count}"
            )

    def __add__(self, other: "SquareFreeClass") -> "SquareFreeClass":
        self._same_ring(other)
        out = dict(self.coefficients)
        for key, value in other.coefficients.items():
            out[key] = out.get(key, 0) + value
        return SquareFreeClass(self.variable_count, out)

    def __neg__(self) -> "SquareFreeClass":
        return SquareFreeClass(self.variable_count, {k: -v for k, v in self.coefficients.items()})

    def __sub__(self, other: "SquareFreeClass") -> "SquareFreeClass":
        return self + (-other)

    def __mul__(self, other: "SquareFreeClass") -> "SquareFreeClass":
        return sqfree_mul(self, other)

    def __pow__(self, e: int) -> "SquareFreeClass":
        if e < 0:
            raise InvalidInputError("negative powers are undefined")
        # Any product of more than m positive-degree factors vanishes.
        if e > self.variable_count and frozenset() not in self.coefficients:
            return SquareFreeClass.zero(self.variable_count)
        result = SquareFreeClass.unit(self.variable_count)
        for _ in range(e):
            result = result * self
            if result.is_zero():
                break
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SquareFreeClass):
            return NotImplemented
        return self.variable_count == other.variable_count and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.variable_count, frozenset(self.coefficients.items())))

    # ----- queries -----

    def is_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, variables: Iterable[int]) -> int:
        return self.coefficients.get(frozenset(variables), 0)

    def top_coefficient(self) -> int:
        return self.coefficient(range(1, self.variable_count + 1))

    @property
    def term_count(self) -> int:
        return len(self.coefficients)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variables": self.variable_count,
            "terms": {
                monomial_key(k): v
                for k, v in sorted(self.coefficients.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            },
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "SquareFreeClass":
        return cls(
            int(doc["variables"]),
            {parse_monomial_key(k): int(v) for k, v in doc.get("terms", {}).items()},
        )


def sqfree_mul(a: SquareFreeClass, b: SquareFreeClass) -> SquareFreeClass:
    """Bilinear product; overlapping monomials vanish because a_i^2 = 0."""
    a._same_ring(b)
    out: Dict[Monomial, int] = {}
    for ka, va in a.coefficients.items():
        for kb, vb in b.coefficients.items():
            if ka & kb:
                continue
            key = ka | kb
            out[key] = out.get(key, 0) + va * vb
    return SquareFreeClass(a.variable_count, out)

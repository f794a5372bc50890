"""
certificates.py
Obstruction certificates from nonvanishing Euler classes.

  one_not_below_nq     e(q^{(+)n}) != 0  =>  [1_X] is not <= n[q]
  distance_lower_bound [p] <= n[1_X] and [1_X] not <= nm[q]  =>  the element
                       built from p and q is at distance >= 1 from every sum of
                       m self-commutators
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from matcore.errors import InvalidInputError
from obstruct.bundles import BundleExpr, class_to_dict, euler_class, trivialization_rank
from ozfield.fields import is_trace_zero_field
from ozfield.meshes import bott_difference_field, octahedron_sphere

logger = logging.getLogger("obstruct")

ONE_NOT_BELOW_NQ = "one_not_below_nq"
DISTANCE_LOWER_BOUND = "distance_lower_bound"

STATEMENTS = {
    ONE_NOT_BELOW_NQ: "[1_X] is not <= n[q]: q^(+n) has nonvanishing Euler class, "
                      "so it admits no nowhere-zero section",
    DISTANCE_LOWER_BOUND: "the element is not within distance < 1 of a sum of m self-commutators",
}

REFERENCES = {
    ONE_NOT_BELOW_NQ: "Euler class obstruction: [1_X] <= n[q] would give q^(+n) a nowhere-zero section",
    DISTANCE_LOWER_BOUND: "distance bound from [p] <= n[1_X] and [1_X] not <= nm[q]",
}

PP_REFERENCE = "diag(1_X, -p) in her(1_X (+) p) over (S^2)^m with p = P^(x)m"

EULER_COEFFICIENT_NOTE = (
    "the top class of (P^(x)m)^(+m) expands to m! a_1...a_m; the coefficient "
    "differs from the normalisation prod a_i but both are nonzero"
)


@dataclass(frozen=True)
class Hypothesis:
    name: str
    holds: bool
    detail: str

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "holds": self.holds, "detail": self.detail}


@dataclass(frozen=True)
class ObstructionCertificate:
    kind: str
    params: Dict[str, Any]
    euler_class: Any
    verdict: bool
    hypotheses: List[Hypothesis] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    reference: Optional[str] = None

    @property
    def failed_hypotheses(self) -> List[str]:
        return [h.name for h in self.hypotheses if not h.holds]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "params": self.params,
            "euler_class": class_to_dict(self.euler_class),
            "verdict": self.verdict,
            "paper_ref": self.reference or REFERENCES[self.kind],
            "statement": STATEMENTS[self.kind],
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "notes": list(self.notes),
        }


def obstruction_certificate(q: BundleExpr, n: int, params: Optional[Dict[str, Any]] = None) -> ObstructionCertificate:
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}", "$.n")

    e = euler_class(q.multiple(n))
    nonzero = not e.is_zero()

    logger.info(f"[OBSTRUCT] e(q^(+{n})) over {q.variable_count} variables: "
                f"{'nonzero' if nonzero else 'zero'}")

    return ObstructionCertificate(
        kind=ONE_NOT_BELOW_NQ,
        params={"n": str(n), "q": q.to_dict(), **(params or {})},
        euler_class=e,
        verdict=nonzero,
        hypotheses=[Hypothesis("euler_class_nonzero", nonzero, f"Euler class of q^(+{n})")],
    )


def pp_example(m: int) -> Tuple[Dict[str, Any], ObstructionCertificate]:
    """
    a = diag(1_X, -p) in her(1_X (+) p) over X = (S^2)^m with p = P^(x)m: trace
    zero but not within distance < 1 of a sum of m commutators. For m = 1 the
    description carries a sampled field over the octahedral sphere.
    """
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}", "$.m")

    p = BundleExpr.line([1] * m)
    cert = obstruction_certificate(p, m, {"m": str(m)})

    description: Dict[str, Any] = {
        "space": f"(S^2)^{m}",
        "p": f"P^(x){m}",
        "rank_p": 1,
        "element": "diag(1_X, -p) in her(1_X (+) p)",
        "commutators": m,
        "p_matrix_size": 2 ** m,
    }

    if m == 1:
        field_ = bott_difference_field(octahedron_sphere())
        description["field"] = field_.to_dict()
        description["field_trace_zero"] = is_trace_zero_field(field_)
        description["field_sup_norm"] = field_.sup_norm()

    cert = replace(cert, reference=PP_REFERENCE)
    if m > 1:
        cert = replace(cert, notes=[EULER_COEFFICIENT_NOTE])

    return description, cert


def distance_lower_bound_cert(p: BundleExpr, q: BundleExpr, n: Optional[int], m: int) -> ObstructionCertificate:
    if m < 1:
        raise InvalidInputError(f"m must be >= 1, got {m}", "$.m")
    if p.variable_count != q.variable_count:
        raise InvalidInputError("p and q live over different spaces", "$.q")

    needed = trivialization_rank(p)
    n = needed if n is None else int(n)

    first = Hypothesis(
        "p_below_n_trivial",
        n >= needed,
        f"[p] <= n[1_X] certified by trivialization rank {needed}",
    )

    e = euler_class(q.multiple(n * m))
    second = Hypothesis(
        "one_not_below_nm_q",
        not e.is_zero(),
        f"Euler class of q^(+{n * m})",
    )

    verdict = first.holds and second.holds
    if not verdict:
        logger.warning(f"[OBSTRUCT] distance certificate failed: "
                       f"{[h.name for h in (first, second) if not h.holds]}")

    return ObstructionCertificate(
        kind=DISTANCE_LOWER_BOUND,
        params={"n": str(n), "m": str(m), "p": p.to_dict(), "q": q.to_dict()},
        euler_class=e,
        verdict=verdict,
        hypotheses=[first, second],
    )

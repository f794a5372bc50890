"""
tower.py
Rank and Euler-class bookkeeping of the inductive tower over growing
products of spheres.

  l_1 = 1,  l_{n+1} = rank(p_n) = l_1 + ... + l_n
  M_m = sum_{i <= m} l_i 2^{k_i}        (P^(x)k_i sits in a trivial bundle of rank 2^{k_i})
  k_{m+1} = m M_m l_{m+1}               (default; overrides >= m M_m l_m accepted)

Stage m audits that the pushed-forward bundle
q_{m,n} = P_{m+1}^{(+)l_{m+1}} (+) ... (+) P_n^{(+)l_n} keeps a nonvanishing
Euler class after taking m M_m copies, i.e. m M_m l_i <= k_i for every i > m.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from constants import MAX_EXPONENT_BITS, TOWER_K1
from matcore.errors import InvalidInputError
from obstruct.bundles import BundleExpr
from obstruct.certificates import Hypothesis, ObstructionCertificate, obstruction_certificate

logger = logging.getLogger("obstruct")

L_CLOSED_FORM_NOTE = (
    "the recursion l_(n+1) = l_1 + ... + l_n with l_1 = 1 gives l_n = 2^(n-2) for n >= 2; "
    "the closed form 2^(n-1) is one shift off, the recursion is used"
)
K_CHOICE_NOTE = (
    "k_(m+1) defaults to m*M_m*l_(m+1) so that the summand P_(m+1)^(+l_(m+1)) survives m*M_m copies; "
    "this satisfies k_(m+1) >= m*M_m*l_m"
)


@dataclass(frozen=True)
class TowerSpec:
    m_max: int
    k: List[int]
    l: List[int]
    M: List[int]
    stages: List[ObstructionCertificate] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    overrides: Dict[int, int] = field(default_factory=dict)

    def k_at(self, n: int) -> int:
        return self.k[n - 1]

    def l_at(self, n: int) -> int:
        return self.l[n - 1]

    def M_at(self, m: int) -> int:
        return self.M[m - 1]

    @property
    def all_verdicts(self) -> bool:
        return all(s.verdict for s in self.stages)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m_max": self.m_max,
            "k": [str(v) for v in self.k],
            "l": [str(v) for v in self.l],
            "M": [str(v) for v in self.M],
            "k_overrides": {str(n): str(v) for n, v in sorted(self.overrides.items())},
            "stages": [s.to_dict() for s in self.stages],
            "all_verdicts": self.all_verdicts,
            "notes": list(self.notes),
        }


def l_sequence(count: int) -> List[int]:
    l = [1]
    while len(l) < count:
        l.append(sum(l))
    return l


def _stage_certificate(m: int, k: List[int], l: List[int], M_m: int) -> ObstructionCertificate:
    top = len(k)
    multiplier = m * M_m

    groups = tuple(k[i - 1] for i in range(m + 1, top + 1))
    summands = tuple(
        (tuple(1 if j == idx else 0 for j in range(len(groups))), l[i - 1])
        for idx, i in enumerate(range(m + 1, top + 1))
    )
    q = BundleExpr(groups, summands)

    cert = obstruction_certificate(
        q, multiplier, {"m": str(m), "n": str(top), "multiplier": str(multiplier)}
    )

    exponents = [
        Hypothesis(
            f"exponent_{i}",
            multiplier * l[i - 1] <= k[i - 1],
            f"m*M_m*l_{i} = {multiplier * l[i - 1]} <= k_{i} = {k[i - 1]}",
        )
        for i in range(m + 1, top + 1)
    ]

    verdict = cert.verdict and all(h.holds for h in exponents)
    return ObstructionCertificate(
        cert.kind, cert.params, cert.euler_class, verdict, cert.hypotheses + exponents,
        reference=f"tower stage {m}: Euler class obstruction with m*M_m*l_i <= k_i for i > {m}",
    )


def villadsen_tower(m_max: int, k_overrides: Optional[Dict[int, int]] = None,
                    k1: int = TOWER_K1,
                    max_exponent_bits: int = MAX_EXPONENT_BITS) -> TowerSpec:
    if m_max < 1:
        raise InvalidInputError(f"m_max must be >= 1, got {m_max}", "$.m_max")

    overrides = {int(n): int(v) for n, v in (k_overrides or {}).items()}
    l = l_sequence(m_max + 1)
    k = [int(k1)]
    M: List[int] = []

    for m in range(1, m_max + 1):
        if k[m - 1] > max_exponent_bits:
            raise InvalidInputError(
                f"stage {m}: 2^{k[m - 1]} exceeds the materialization limit 2^{max_exponent_bits}",
                "$.m_max",
            )

        M_m = sum(l[i] * 2 ** k[i] for i in range(m))
        M.append(M_m)

        minimal = m * M_m * l[m - 1]
        chosen = overrides.get(m + 1, m * M_m * l[m])
        if chosen < minimal:
            raise InvalidInputError(
                f"k_{m + 1} = {chosen} is below m*M_m*l_m = {minimal}",
                f"$.k_overrides.{m + 1}",
            )
        k.append(chosen)

        logger.info(f"[OBSTRUCT] stage {m}: M_{m} = {M_m}, k_{m + 1} = {chosen}")

    stages = [_stage_certificate(m, k, l, M[m - 1]) for m in range(1, m_max + 1)]

    return TowerSpec(m_max, k, l, M, stages, [K_CHOICE_NOTE, L_CLOSED_FORM_NOTE], overrides)

# pipeline/command_registry.py
# Command name -> handler. Every handler takes (input document, RunConfig)
# and returns the result document together with its VerificationReport.

from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Callable, Dict, List

import numpy as np

from constants import FACK_RUN, FACK_TOL, GRID_ORDER, GRID_TOL, RESIDUAL_TOL, VERTEX_WORKERS
from fack.block_split import block_two_commutator_split
from fack.tower import TowerModel, fack_iterate
from fack.trapecio import trapecio_step, verify_trapecio
from matcore.decomposition import CommutatorDecomposition
from matcore.errors import InvalidInputError
from matcore.linalg import commutator, operator_norm
from matcore.matrices import matrix_from_json, matrix_to_json
from matcore.verification import BoundCheck, VerificationReport, report_from_checks, verify_decomposition
from obstruct.bundles import BundleExpr
from obstruct.certificates import ObstructionCertificate, distance_lower_bound_cert, obstruction_certificate, pp_example
from obstruct.tower import villadsen_tower
from ozfield.complexes import VertexColoring, greedy_coloring
from ozfield.factorization import SqrtWeightedFactor, decompose_field, measure_field_decomposition
from ozfield.fields import SimplicialField
from pipeline.demo_models import build_demo, demo_element
from pipeline.run_config import RunConfig
from selfcomm.decompose import self_commutator_decompose, tight_commutator_decompose


@dataclass(frozen=True)
class CommandOutcome:
    result: Dict[str, Any]
    report: VerificationReport


Handler = Callable[[Dict[str, Any], RunConfig], CommandOutcome]


@contextmanager
def located(path: str):
    """Errors raised with the root path are re-anchored under `path`."""
    try:
        yield
    except InvalidInputError as e:
        if e.path == "$":
            e.path = path
        raise


def matrix_tolerances(a: np.ndarray, tol: float) -> Dict[str, float]:
    slack = tol * max(1.0, operator_norm(a))
    return {"residual_norm": slack, "consistency": slack}


def fack_tolerances(a: np.ndarray) -> Dict[str, float]:
    return {"consistency": FACK_TOL * max(1.0, operator_norm(a))}


def certificate_report(cert: ObstructionCertificate, prefix: str = "") -> VerificationReport:
    """Each hypothesis is a 0/1 check; the verdict itself is the last one."""
    checks = [
        BoundCheck(f"{prefix}{h.name}", 0.0, 0.0 if h.holds else 1.0, 0.0)
        for h in cert.hypotheses
    ]
    checks.append(BoundCheck(f"{prefix}verdict", 0.0, 0.0 if cert.verdict else 1.0, 0.0))
    return report_from_checks(checks)

# ================================
# MATRIX MODELS
# ================================

def run_decompose(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    a = matrix_from_json(doc["matrix"], "$.matrix")
    with located("$.matrix"):
        decomposition = self_commutator_decompose(a)
    report = verify_decomposition(a, decomposition, matrix_tolerances(a, config.tol))
    return CommandOutcome({"decomposition": decomposition.to_dict()}, report)


def run_decompose_tight(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    a = matrix_from_json(doc["matrix"], "$.matrix")
    with located("$.matrix"):
        decomposition = tight_commutator_decompose(a)
    report = verify_decomposition(a, decomposition, matrix_tolerances(a, config.tol))
    return CommandOutcome({"decomposition": decomposition.to_dict()}, report)


def run_block_split(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    b = matrix_from_json(doc["b"], "$.b")
    e = matrix_from_json(doc["e"], "$.e")
    pairs = [
        (
            matrix_from_json(p["x"], f"$.pairs[{i}].x"),
            matrix_from_json(p["y"], f"$.pairs[{i}].y"),
        )
        for i, p in enumerate(doc["pairs"])
    ]
    split = block_two_commutator_split(b, pairs, e, tol=config.tol)
    return CommandOutcome({"split": split.to_dict()}, split.report)

# ================================
# FIELDS
# ================================

def run_decompose_field(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    field = SimplicialField.from_dict(doc["field"], "$.field")

    if config.refine > 0:
        for _ in range(config.refine):
            field, coloring = field.subdivide()
    elif "coloring" in doc:
        coloring = VertexColoring.from_list(doc["coloring"])
    else:
        coloring = greedy_coloring(field.complex)

    order = int(doc.get("grid_order", GRID_ORDER))
    decomposition = decompose_field(field, coloring, order, GRID_TOL, VERTEX_WORKERS)

    result = {
        "field": field.to_dict(),
        "refinements": config.refine,
        "decomposition": decomposition.to_dict(),
    }
    return CommandOutcome(result, decomposition.report)

# ================================
# FACK
# ================================

def _run_trapecio(spec: Dict[str, Any]) -> CommandOutcome:
    a = matrix_from_json(spec["a"], "$.trapecio.a")
    b = matrix_from_json(spec["b"], "$.trapecio.b")
    x = matrix_from_json(spec["x"], "$.trapecio.x")

    step = trapecio_step(x, a, b, int(spec["L"]), int(spec["K"]), float(spec["epsilon"]))
    report = verify_trapecio(x, step).merge(step.certificates, "trapecio.")

    result = {
        "mode": "trapecio",
        "x": matrix_to_json(x),
        "decomposition": step.as_decomposition(x).to_dict(),
        "trapecio": step.to_dict(),
    }
    return CommandOutcome(result, report)


def run_fack(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    if "trapecio" in doc:
        return _run_trapecio(doc["trapecio"])

    rng = np.random.default_rng(config.seed)

    if "tower" in doc:
        tower = TowerModel.from_dict(doc["tower"])
        demo = None
    else:
        tower, demo = build_demo(rng, doc.get("demo"))

    if "z0" in doc:
        z0 = matrix_from_json(doc["z0"], "$.z0")
    else:
        z0 = demo_element(tower, rng)

    if config.depth is not None:
        depth = config.depth
    else:
        depth = int(doc.get("depth", min(FACK_RUN["depth"], tower.depth)))

    decomposition, records = fack_iterate(
        z0, tower, depth, approximate_inner=bool(doc.get("approximate_inner", False))
    )

    report = verify_decomposition(z0, decomposition, fack_tolerances(z0))
    for record in records:
        report = report.merge(record.trapecio.certificates, f"stage{record.stage}.")

    result = {
        "mode": "iterate",
        "tower": tower.to_dict(),
        "demo": demo,
        "z0": matrix_to_json(z0),
        "depth": depth,
        "approximate_inner": bool(doc.get("approximate_inner", False)),
        "decomposition": decomposition.to_dict(),
        "stages": [r.to_dict() for r in records],
    }
    return CommandOutcome(result, report)

# ================================
# OBSTRUCTIONS
# ================================

def run_obstruct(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    with located("$.q"):
        q = BundleExpr.from_dict(doc["q"])

    if "p" in doc:
        with located("$.p"):
            p = BundleExpr.from_dict(doc["p"])
        n = int(doc["n"]) if "n" in doc else None
        cert = distance_lower_bound_cert(p, q, n, int(doc["m"]))
    else:
        cert = obstruction_certificate(q, int(doc["n"]))

    return CommandOutcome({"certificate": cert.to_dict()}, certificate_report(cert))


def run_pp_example(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    description, cert = pp_example(int(doc["m"]))
    result = {"description": description, "certificate": cert.to_dict()}
    return CommandOutcome(result, certificate_report(cert))


def run_tower(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    overrides = {int(n): int(v) for n, v in (doc.get("k_overrides") or {}).items()}
    spec = villadsen_tower(int(doc["m_max"]), overrides)

    checks: List[BoundCheck] = []
    for m, stage in enumerate(spec.stages, start=1):
        checks += certificate_report(stage, f"stage{m}.").bound_checks

    return CommandOutcome({"tower": spec.to_dict()}, report_from_checks(checks))

# ================================
# RE-MEASUREMENT (verify)
# ================================

def remeasure_matrix(output: Dict[str, Any]) -> VerificationReport:
    a = matrix_from_json(output["input"]["matrix"], "$.input.matrix")
    decomposition = CommutatorDecomposition.from_dict(
        output["result"]["decomposition"], "$.result.decomposition"
    )
    return verify_decomposition(a, decomposition, matrix_tolerances(a, output["config"]["tol"]))


def remeasure_field(output: Dict[str, Any]) -> VerificationReport:
    result = output["result"]
    field = SimplicialField.from_dict(result["field"], "$.result.field")
    stored = result["decomposition"]
    factors = [
        SqrtWeightedFactor.from_dict(f, field.matrix_size, f"$.result.decomposition.factors[{i}]")
        for i, f in enumerate(stored["factors"])
    ]
    color_count = stored["coloring"]["color_count"] if stored.get("coloring") else None
    return measure_field_decomposition(field, factors, int(stored["grid_order"]), GRID_TOL, color_count)


def remeasure_fack(output: Dict[str, Any]) -> VerificationReport:
    result = output["result"]
    key = "x" if result["mode"] == "trapecio" else "z0"
    element = matrix_from_json(result[key], f"$.result.{key}")
    decomposition = CommutatorDecomposition.from_dict(
        result["decomposition"], "$.result.decomposition"
    )
    return verify_decomposition(element, decomposition, fack_tolerances(element))


def remeasure_block_split(output: Dict[str, Any]) -> VerificationReport:
    doc, split = output["input"], output["result"]["split"]
    b = matrix_from_json(doc["b"], "$.input.b")
    s = matrix_from_json(split["S"], "$.result.split.S")
    e = matrix_from_json(split["E"], "$.result.split.E")
    rest = matrix_from_json(split["b_doubleprime"], "$.result.split.b_doubleprime")
    m = int(split["block_size"])
    scale = max(1.0, operator_norm(b))
    tol = output["config"]["tol"] * scale

    b_prime = commutator(s, e)
    carried = diagonal = 0.0
    for i, p in enumerate(doc["pairs"]):
        x = matrix_from_json(p["x"], f"$.input.pairs[{i}].x")
        y = matrix_from_json(p["y"], f"$.input.pairs[{i}].y")
        window = slice(i * m, (i + 1) * m)
        defect = b[window, window] - commutator(x, y)
        carried = max(carried, operator_norm(b_prime[window, window] - defect))
        diagonal = max(diagonal, operator_norm(rest[window, window] - commutator(x, y)))

    stored = operator_norm(b - b_prime - rest)
    return report_from_checks(
        [
            BoundCheck("defect_blocks", 0.0, carried, tol),
            BoundCheck("diagonal_commutators", 0.0, diagonal, tol),
            BoundCheck("stored_doubleprime", 0.0, stored, RESIDUAL_TOL * scale),
        ],
        residual_norm=carried,
        commutator_count=1,
    )


REMEASURE: Dict[str, Callable[[Dict[str, Any]], VerificationReport]] = {
    "decompose": remeasure_matrix,
    "decompose-tight": remeasure_matrix,
    "decompose-field": remeasure_field,
    "fack-run": remeasure_fack,
    "block-split": remeasure_block_split,
}

# ================================
# REGISTRY
# ================================

class CommandRegistry:
    def __init__(self):
        self.registry: Dict[str, Handler] = {
            "decompose": run_decompose,
            "decompose-tight": run_decompose_tight,
            "decompose-field": run_decompose_field,
            "fack-run": run_fack,
            "block-split": run_block_split,
            "obstruct": run_obstruct,
            "pp-example": run_pp_example,
            "tower": run_tower,
        }

    def register(self, name: str, handler: Handler) -> None:
        self.registry[name] = handler

    def get(self, name: str) -> Handler:
        if name not in self.registry:
            raise InvalidInputError(
                f"unknown command '{name}', expected one of {', '.join(self.names())}", "$.command"
            )
        return self.registry[name]

    def names(self) -> List[str]:
        return sorted(self.registry)

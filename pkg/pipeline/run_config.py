# pipeline/run_config.py

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from constants import DEFAULT_CLI_TOL, DEFAULT_REFINE, DEFAULT_SEED
from matcore.errors import InvalidInputError

COMMANDS = (
    "decompose",
    "decompose-tight",
    "decompose-field",
    "fack-run",
    "block-split",
    "obstruct",
    "pp-example",
    "tower",
    "verify",
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    tol: float = DEFAULT_CLI_TOL
    seed: int = DEFAULT_SEED
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    refine: int = DEFAULT_REFINE
    depth: Optional[int] = None
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command '{self.command}'", "$.command")
        if not self.tol > 0:
            raise InvalidInputError(f"--tol must be positive, got {self.tol}", "$.tol")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidInputError(f"--seed must be an unsigned 64-bit integer, got {self.seed}", "$.seed")
        if self.refine < 0:
            raise InvalidInputError(f"--refine must be >= 0, got {self.refine}", "$.refine")
        if self.depth is not None and self.depth < 0:
            raise InvalidInputError(f"--depth must be >= 0, got {self.depth}", "$.depth")
        if self.format != "json":
            raise InvalidInputError(f"unsupported format '{self.format}'", "$.format")

    def replay_fields(self) -> Dict[str, Any]:
        """The settings a later `verify` needs to recompute the output."""
        fields = asdict(self)
        return {k: fields[k] for k in ("tol", "seed", "refine", "depth")}

# pipeline/serialization.py
# Single-document JSON in and out: stdin/stdout unless a path is given.

import json
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

from matcore.errors import InvalidInputError


def _default(obj: Any):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dump_document(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_default) + "\n"


def normalize(doc: Any) -> Any:
    """The document exactly as it reads back from its JSON text."""
    return json.loads(dump_document(doc))


def load_document(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"input is not valid JSON: {e.msg} (line {e.lineno})", "$")


def read_input(path: Optional[str]) -> Any:
    if path is None or path == "-":
        return load_document(sys.stdin.read())

    source = Path(path)
    if not source.exists():
        raise InvalidInputError(f"input file not found: {path}", "$")
    return load_document(source.read_text(encoding="utf-8"))


def write_output(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return

    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")

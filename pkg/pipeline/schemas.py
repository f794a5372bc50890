# pipeline/schemas.py
# Input documents are validated against docs/schemas/<command>.schema.json.

import json
from functools import lru_cache
from typing import Any, Dict

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from constants import SCHEMA_DIR
from matcore.errors import InvalidInputError


@lru_cache(maxsize=None)
def load_schema(command: str) -> Dict[str, Any]:
    path = SCHEMA_DIR / f"{command}.schema.json"
    if not path.exists():
        raise InvalidInputError(f"no schema published for command '{command}'", "$")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_input(command: str, doc: Any) -> None:
    validator = Draft202012Validator(load_schema(command))
    error = best_match(validator.iter_errors(doc))
    if error is not None:
        raise InvalidInputError(error.message, error.json_path)

"""
matrices.py
Canonical matrix contract: validation of complex / Hermitian matrices and the
row-major JSON codec shared by every command.
"""

from typing import Any, Dict, List

import numpy as np

from constants import HERMITIAN_TOL
from matcore.errors import InvalidInputError

# Dense complex128 arrays carry every matrix; these aliases name the contract.
ComplexMatrix = np.ndarray
HermitianMatrix = np.ndarray


def as_complex_matrix(a, name: str = "matrix") -> ComplexMatrix:
    arr = np.asarray(a, dtype=np.complex128)

    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(
            f"{name}: expected a non-empty 2-d array, got shape {arr.shape}"
        )

    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: entries must be finite (no NaN/Inf)")

    return arr


def as_square_matrix(a, name: str = "matrix") -> ComplexMatrix:
    arr = as_complex_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name}: expected a square matrix, got shape {arr.shape}")
    return arr


def hermitian_defect(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    return hermitian_defect(arr) <= tol * (1.0 + float(np.max(np.abs(arr))))


def as_hermitian(a, name: str = "matrix", tol: float = HERMITIAN_TOL) -> HermitianMatrix:
    arr = as_square_matrix(a, name)

    if not is_hermitian(arr, tol):
        raise InvalidInputError(
            f"{name}: not Hermitian (defect {hermitian_defect(arr):.3e})"
        )

    # Exact symmetrization; the defect is within tolerance already.
    return (arr + arr.conj().T) / 2.0


def require_same_square(x: np.ndarray, y: np.ndarray, what: str = "operands") -> None:
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise InvalidInputError(
            f"{what}: dimension mismatch {x.shape} vs {y.shape}"
        )

# ================================
# JSON CODEC
# ================================

def matrix_to_json(a: np.ndarray) -> Dict[str, Any]:
    arr = np.asarray(a, dtype=np.complex128)
    return {
        "n": int(arr.shape[0]),
        "entries": [
            [[float(z.real), float(z.imag)] for z in row]
            for row in arr
        ],
    }


def matrix_from_json(doc: Dict[str, Any], path: str = "$") -> ComplexMatrix:
    if not isinstance(doc, dict) or "entries" not in doc:
        raise InvalidInputError("matrix object requires 'entries'", path)

    rows: List = doc["entries"]
    n = doc.get("n", len(rows))

    if len(rows) != n:
        raise InvalidInputError(
            f"expected {n} rows, found {len(rows)}", f"{path}.entries"
        )

    out = np.zeros((n, n), dtype=np.complex128)

    for i, row in enumerate(rows):
        if len(row) != n:
            raise InvalidInputError(
                f"row {i}: expected {n} entries, found {len(row)}",
                f"{path}.entries[{i}]",
            )
        for j, pair in enumerate(row):
            if isinstance(pair, (int, float)):
                out[i, j] = float(pair)
            elif len(pair) == 2:
                out[i, j] = complex(float(pair[0]), float(pair[1]))
            else:
                raise InvalidInputError(
                    "entry must be [re, im]", f"{path}.entries[{i}][{j}]"
                )

    return as_complex_matrix(out)

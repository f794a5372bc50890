# conftest.py
# Shared fixtures; the repository root goes on sys.path so the flat engine
# directories import the same way they do from commutator_cli.py.

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from matcore.linalg import random_trace_zero_hermitian  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def trace_zero(rng):
    def make(n: int) -> np.ndarray:
        return random_trace_zero_hermitian(n, rng)
    return make


def matrix_doc(a) -> dict:
    arr = np.asarray(a, dtype=np.complex128)
    return {
        "n": int(arr.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in arr],
    }


@pytest.fixture
def as_doc():
    return matrix_doc

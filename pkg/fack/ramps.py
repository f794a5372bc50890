# fack/ramps.py
# Spectral ramps g_{eps/2} and cut-downs (a - eps)_+ of positive matrices.

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from constants import PSD_TOL, RANK_THRESHOLD
from matcore.errors import InvalidInputError
from matcore.linalg import EigenSystem, hermitian_eig, rank, spectral_apply
from matcore.matrices import as_hermitian

RAMP = "ramp"
CUT = "cut"


@dataclass(frozen=True)
class SpectralRamp:
    """t -> clip((t - eps/2) / (eps/2), 0, 1): 0 on [0, eps/2], 1 on [eps, inf)."""
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidInputError(f"epsilon must be positive, got {self.epsilon}", "$.epsilon")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        half = self.epsilon / 2.0
        return np.clip((np.asarray(t, dtype=float) - half) / half, 0.0, 1.0)

    def cut(self, t: np.ndarray) -> np.ndarray:
        return np.maximum(np.asarray(t, dtype=float) - self.epsilon, 0.0)


def require_psd(a, name: str = "a", tol: float = PSD_TOL) -> Tuple[np.ndarray, EigenSystem]:
    h = as_hermitian(a, name)
    eig = hermitian_eig(h)
    lowest = float(eig.eigenvalues[0])
    if lowest < -tol * max(1.0, float(np.max(np.abs(eig.eigenvalues)))):
        raise InvalidInputError(
            f"{name}: not positive semidefinite (lowest eigenvalue {lowest:.3e})", f"$.{name}"
        )
    return h, eig


def apply_ramp(a, epsilon: float, mode: str = RAMP, tol: float = PSD_TOL,
               name: str = "a") -> np.ndarray:
    ramp = SpectralRamp(float(epsilon))
    h, eig = require_psd(a, name, tol)

    if mode == RAMP:
        return spectral_apply(h, ramp, eig)
    if mode == CUT:
        return spectral_apply(h, ramp.cut, eig)

    raise InvalidInputError(f"unknown ramp mode '{mode}'", "$.mode")


def cuntz_rank(a, threshold: float = RANK_THRESHOLD) -> int:
    """In M_n Cuntz comparison of positives is rank comparison."""
    return rank(a, threshold)

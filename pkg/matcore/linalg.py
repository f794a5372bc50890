"""
linalg.py
Numerical substrate: commutators, norms, the deterministic Hermitian
eigensolver, spectral calculus and seeded random instances.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg as sla

from constants import (
    HERMITIAN_TOL,
    PHASE_THRESHOLD,
    RANK_THRESHOLD,
    RECONSTRUCTION_TOL,
    UNITARY_TOL,
)
from matcore.matrices import as_hermitian, as_square_matrix, require_same_square


def commutator(x, y) -> np.ndarray:
    """[x, y] = xy - yx for square matrices of equal size."""
    x = as_square_matrix(x, "x")
    y = as_square_matrix(y, "y")
    require_same_square(x, y, "commutator")
    return x @ y - y @ x


def self_commutator(x) -> np.ndarray:
    """[x*, x] = x*x - xx*."""
    x = as_square_matrix(x, "x")
    xh = x.conj().T
    return xh @ x - x @ xh


def operator_norm(a) -> float:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


def stacked_operator_norms(stack: np.ndarray) -> np.ndarray:
    """Operator norms of a (k, n, n) stack."""
    if stack.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.norm(stack, ord=2, axis=(1, 2))

# ================================
# EIGENSTRUCTURE
# ================================

@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    unitary: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.unitary
        return (u * self.eigenvalues) @ u.conj().T

    def unitary_defect(self) -> float:
        u = self.unitary
        return operator_norm(u @ u.conj().T - np.eye(u.shape[0]))

    def validate(self, a, tol_unitary: float = UNITARY_TOL,
                 tol_recon: float = RECONSTRUCTION_TOL) -> bool:
        scale = max(1.0, operator_norm(a))
        return (
            self.unitary_defect() <= tol_unitary
            and operator_norm(np.asarray(a) - self.reconstruct()) <= tol_recon * scale
            and bool(np.all(np.diff(self.eigenvalues) >= 0))
        )


def _fix_phases(u: np.ndarray) -> np.ndarray:
    # First component above threshold of each eigenvector is made real positive.
    u = u.copy()
    for j in range(u.shape[1]):
        column = u[:, j]
        idx = np.flatnonzero(np.abs(column) > PHASE_THRESHOLD)
        if idx.size == 0:
            continue
        c = column[idx[0]]
        u[:, j] = column * (np.conj(c) / abs(c))
    return u


def hermitian_eig(a, tol: float = HERMITIAN_TOL) -> EigenSystem:
    h = as_hermitian(a, "a", tol)

    if not np.any(h - np.diag(np.diag(h))):
        # Diagonal input keeps the standard basis; equal eigenvalues stay in index order.
        w = np.diag(h).real
        order = np.argsort(w, kind="stable")
        return EigenSystem(eigenvalues=w[order], unitary=np.eye(h.shape[0], dtype=np.complex128)[:, order])

    w, v = sla.eigh(h)
    return EigenSystem(eigenvalues=np.asarray(w, dtype=float), unitary=_fix_phases(v))


def spectral_apply(a, fn: Callable[[np.ndarray], np.ndarray],
                   eig: Optional[EigenSystem] = None) -> np.ndarray:
    """Functional calculus fn(a) for Hermitian a."""
    eig = eig or hermitian_eig(a)
    u = eig.unitary
    values = np.asarray(fn(eig.eigenvalues), dtype=float)
    return (u * values) @ u.conj().T

# ================================
# RANGES AND RANKS
# ================================

def rank(a, threshold: float = RANK_THRESHOLD) -> int:
    arr = np.asarray(a, dtype=np.complex128)
    s = sla.svdvals(arr)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > threshold * s[0]))


def range_basis(a, threshold: float = RANK_THRESHOLD) -> np.ndarray:
    """Orthonormal basis (columns, ascending eigenvalue order) of range(a), a Hermitian."""
    eig = hermitian_eig(a)
    scale = float(np.max(np.abs(eig.eigenvalues))) if eig.eigenvalues.size else 0.0
    if scale == 0.0:
        return np.zeros((eig.unitary.shape[0], 0), dtype=np.complex128)
    keep = np.abs(eig.eigenvalues) > threshold * scale
    return eig.unitary[:, keep]


def range_projection(a, threshold: float = RANK_THRESHOLD) -> np.ndarray:
    q = range_basis(a, threshold)
    return q @ q.conj().T


def compression_defect(x, projection: np.ndarray) -> float:
    """||x - P x P||: how far x is from the hereditary corner of P."""
    x = np.asarray(x, dtype=np.complex128)
    return operator_norm(x - projection @ x @ projection)

# ================================
# SEEDED INSTANCES
# ================================

def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2.0


def random_trace_zero_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    h = random_hermitian(n, rng)
    return h - (np.trace(h).real / n) * np.eye(n)

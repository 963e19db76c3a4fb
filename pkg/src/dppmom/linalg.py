"""Dense symmetric-matrix numerics.

Matrices are plain ``numpy.ndarray`` objects; :func:`as_symmetric` is the
gatekeeper that enforces the symmetric, square, finite invariants.
Determinants go through LAPACK's partially pivoted LU (``numpy.linalg.det``),
the eigensolver is a cyclic Jacobi written here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InputError, NumericError

__all__ = [
    "ASYMMETRY_TOL",
    "EigenDecomposition",
    "as_symmetric",
    "principal_submatrix",
    "determinant",
    "batched_determinant",
    "eig_sym",
    "is_valid_kernel",
]

ASYMMETRY_TOL = 1e-9
JACOBI_MAX_SWEEPS = 50
JACOBI_TOL = 1e-12


def as_symmetric(a, tol: float = ASYMMETRY_TOL) -> np.ndarray:
    """Return a float copy of ``a`` with its two triangles averaged.

    Raises :class:`InputError` if ``a`` is not square, is empty, holds
    non-finite values or is asymmetric by more than ``tol``.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise InputError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.T))
    if asym > tol:
        raise InputError(f"matrix is not symmetric (max |a_ij - a_ji| = {asym:.3g})")
    return (a + a.T) / 2


def _index_list(S: Iterable[int], n: int) -> list[int]:
    idx = sorted(int(i) for i in S)
    if len(set(idx)) != len(idx):
        raise InputError(f"repeated index in {idx}")
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise InputError(f"index set {idx} out of range for dimension {n}")
    return idx


def principal_submatrix(A: np.ndarray, S: Iterable[int]) -> np.ndarray:
    """Rows and columns of ``A`` indexed by ``S`` (0-based), ascending order.

    An empty ``S`` gives a 0x0 matrix, whose determinant is 1.
    """
    idx = _index_list(S, A.shape[0])
    return A[np.ix_(idx, idx)]


def determinant(A: np.ndarray) -> float:
    if A.shape == (0, 0):
        return 1.0
    return float(np.linalg.det(A))


def batched_determinant(stack: np.ndarray, chunk: int = 1 << 14) -> np.ndarray:
    """Determinants of a ``(k, d, d)`` stack, evaluated in memory-bounded chunks."""
    k, d = stack.shape[0], stack.shape[-1]
    if d == 0:
        return np.ones(k)
    out = np.empty(k)
    for start in range(0, k, chunk):
        out[start:start + chunk] = np.linalg.det(stack[start:start + chunk])
    return out


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray   # descending
    vectors: np.ndarray  # columns are orthonormal eigenvectors

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))  # not ||A||^2 - ||diag||^2: that cancels near 1e-8
    return float(np.sqrt(np.sum(off * off)))


def eig_sym(A: np.ndarray, tol: float = JACOBI_TOL,
            max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over all (p, q) pairs, annihilating each off-diagonal entry with a
    plane rotation (Golub & Van Loan, Alg. 8.5.2), until the off-diagonal
    Frobenius mass drops below ``tol * max(1, ||A||_F)``.
    """
    a = as_symmetric(A)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) + 100.0 * abs(apq) == abs(diff):
                    t = apq / diff  # tau would overflow; t ~ 1/(2 tau)
                else:
                    tau = diff / (2.0 * apq)
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        if _off_norm(a) > threshold:
            raise NumericError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(values[order], v[:, order])


def is_valid_kernel(A: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff every eigenvalue of ``A`` lies in ``[-tol, 1 + tol]``."""
    values = eig_sym(A).values
    return bool(values[-1] >= -tol and values[0] <= 1 + tol)

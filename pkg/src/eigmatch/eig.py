"""Eigenvalue computation contracts used by every experiment.

Thin wrappers around LAPACK (via scipy) fixing the package-wide conventions:
ascending order, Hermiticity validated on input, and a tridiagonal path that
never densifies (the n = 10^4 finite-difference tables are the binding size).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = ["Spectrum", "NotPositiveDefiniteError", "eig_sym", "eig_sym_tridiag", "eig_gen_sym_def"]

_HERM_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of a matrix, ascending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1).copy()
        if np.any(np.diff(v) < 0):
            raise ValueError("spectrum values must be ascending")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


class NotPositiveDefiniteError(ValueError):
    """The mass matrix of a generalized problem failed its Cholesky check."""


def eig_sym(A) -> Spectrum:
    """Eigenvalues of a real symmetric or complex Hermitian matrix, ascending."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(A - A.conj().T)) > _HERM_TOL:
        raise ValueError("matrix is not Hermitian within 1e-10 entrywise")
    if np.iscomplexobj(A) and np.max(np.abs(A.imag)) <= 1e-13 * max(1.0, np.max(np.abs(A.real))):
        A = A.real  # real symmetric solver is faster and the result identical
    return Spectrum(scipy.linalg.eigh(A, eigvals_only=True))


def eig_sym_tridiag(diag, offdiag) -> Spectrum:
    """Eigenvalues of a symmetric tridiagonal matrix, ascending.

    Stays in band storage; intended for sizes up to 1e4 and beyond.
    """
    d = np.asarray(diag, dtype=float).reshape(-1)
    e = np.asarray(offdiag, dtype=float).reshape(-1)
    if d.size == 0 or e.size != d.size - 1:
        raise ValueError(f"inconsistent lengths: diag {d.size}, offdiag {e.size}")
    if d.size == 1:
        return Spectrum(d.copy())
    return Spectrum(scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=True))


def eig_gen_sym_def(K, M) -> Spectrum:
    """Eigenvalues of the pencil (K, M) with M symmetric positive definite.

    Solved by Cholesky reduction of M followed by a symmetric solve (LAPACK's
    *sygv path); all eigenvalues are real and returned ascending.
    """
    K = np.asarray(K)
    M = np.asarray(M)
    if K.shape != M.shape or K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("K and M must be square matrices of the same size")
    for name, X in (("K", K), ("M", M)):
        if np.max(np.abs(X - X.conj().T)) > _HERM_TOL:
            raise ValueError(f"{name} is not Hermitian within 1e-10 entrywise")
    try:
        vals = scipy.linalg.eigh(K, M, eigvals_only=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"mass matrix is not positive definite: {exc}") from exc
    return Spectrum(vals)

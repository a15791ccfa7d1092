"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The hermitian
eigensolver is LAPACK (through :func:`numpy.linalg.eigh`); on top of it the
eigenvectors of every degenerate cluster are re-orthonormalized by
Gram-Schmidt on the cluster projector applied to the standard basis in
order, so identical inputs always give identical eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonHermitianInput, NotPSD, ShapeMismatch

ZERO_TOL = 1e-12
PSD_TOL = 1e-9
HERM_TOL = 1e-9

# eigenvalues closer than this (relative to the spectral scale) share a cluster
_CLUSTER_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {m.shape}")
    return m


def is_square(a: np.ndarray) -> bool:
    return a.ndim == 2 and a.shape[0] == a.shape[1]


def is_hermitian(a, tol: float = HERM_TOL) -> bool:
    a = np.asarray(a)
    if not is_square(a):
        return False
    if a.size == 0:
        return True
    return float(np.max(np.abs(a - a.conj().T))) <= tol


def _require_hermitian(a) -> np.ndarray:
    m = as_matrix(a)
    if not is_hermitian(m):
        raise NonHermitianInput("matrix is not hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def matrix_unit(i: int, j: int, rows: int, cols: int | None = None) -> np.ndarray:
    """E_ij with a single 1 at row i, column j."""
    e = np.zeros((rows, rows if cols is None else cols), dtype=complex)
    e[i, j] = 1.0
    return e


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(a, dim_left: int, dim_right: int, which: str = "left") -> np.ndarray:
    """Trace out one factor of a matrix on C^dim_left (x) C^dim_right.

    ``which="left"`` traces the first factor and returns a dim_right square
    matrix; ``which="right"`` traces the second one.
    """
    m = as_matrix(a)
    n = dim_left * dim_right
    if m.shape != (n, n):
        raise ShapeMismatch(f"matrix of shape {m.shape} does not split as {dim_left}x{dim_right}")
    t = m.reshape(dim_left, dim_right, dim_left, dim_right)
    if which == "left":
        return np.einsum("iaib->ab", t)
    if which == "right":
        return np.einsum("iaja->ij", t)
    raise ValueError(f"unknown factor selector {which!r}")


@dataclass(frozen=True)
class HermEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _clusters(w: np.ndarray) -> list[tuple[int, int]]:
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    out = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > _CLUSTER_TOL * scale:
            out.append((start, k))
            start = k
    return out


def _canonical_basis(vecs: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(vecs) obtained by Gram-Schmidt on P e_1, P e_2, ..."""
    n, d = vecs.shape
    proj = vecs @ vecs.conj().T
    basis: list[np.ndarray] = []
    for k in range(n):
        if len(basis) == d:
            break
        u = proj[:, k].copy()
        for _ in range(2):
            for b in basis:
                u -= (b.conj() @ u) * b
        nrm = np.linalg.norm(u)
        if nrm > 1e-4:
            basis.append(u / nrm)
    if len(basis) < d:
        # cannot happen for an exact projector; fall back to the solver's vectors
        return vecs
    return np.column_stack(basis)


def herm_eigen(a) -> HermEigen:
    """Ascending eigenvalues and a deterministic orthonormal eigenbasis."""
    m = _require_hermitian(a)
    w, v = np.linalg.eigh(m)
    v = v.astype(complex)
    for lo, hi in _clusters(w):
        v[:, lo:hi] = _canonical_basis(v[:, lo:hi])
    return HermEigen(w, v)


def herm_func(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """V f(Lambda) V^dagger, with ``f`` applied elementwise to the eigenvalues."""
    eig = herm_eigen(a)
    fw = np.asarray(f(eig.eigenvalues), dtype=complex)
    v = eig.eigenvectors
    return (v * fw) @ v.conj().T


def spectrum(a) -> np.ndarray:
    return herm_eigen(a).eigenvalues


def pseudo_power(w: np.ndarray, p: float) -> np.ndarray:
    """Elementwise power of non-negative eigenvalues: x^0 = 1 and 0^p = 0 for p > 0."""
    w = np.asarray(w, dtype=float)
    if p == 0:
        return np.ones_like(w)
    out = np.zeros_like(w)
    pos = w > ZERO_TOL
    out[pos] = w[pos] ** p
    return out


def psd_power(a, p: float) -> np.ndarray:
    """Power of a positive semidefinite matrix; ``p = 0`` gives the identity."""
    eig = herm_eigen(a)
    if eig.eigenvalues.size and eig.eigenvalues[0] < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {eig.eigenvalues[0]:.3e} is negative")
    v = eig.eigenvectors
    return (v * pseudo_power(eig.eigenvalues, p)) @ v.conj().T


def psd_inverse_sqrt(a) -> np.ndarray:
    """Moore-Penrose inverse square root of a PSD matrix."""
    eig = herm_eigen(a)
    if eig.eigenvalues.size and eig.eigenvalues[0] < -PSD_TOL:
        raise NotPSD(f"smallest eigenvalue {eig.eigenvalues[0]:.3e} is negative")
    w = eig.eigenvalues
    inv = np.zeros_like(w)
    pos = w > ZERO_TOL
    inv[pos] = w[pos] ** -0.5
    v = eig.eigenvectors
    return (v * inv) @ v.conj().T


def kernel_projector(a) -> np.ndarray:
    """Projector onto the eigenvectors of ``a`` with eigenvalue at most ZERO_TOL."""
    eig = herm_eigen(a)
    v = eig.eigenvectors[:, eig.eigenvalues <= ZERO_TOL]
    return v @ v.conj().T


def is_psd(a, tol: float = PSD_TOL) -> bool:
    if not is_hermitian(a):
        return False
    w = spectrum(a)
    return bool(w.size == 0 or w[0] >= -tol)


def trace_norm_herm(a) -> float:
    """Sum of absolute eigenvalues of a hermitian matrix."""
    return float(np.sum(np.abs(spectrum(a))))


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T

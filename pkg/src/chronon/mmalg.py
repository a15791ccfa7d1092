"""Multi-matrix algebras and their elements.

An algebra is a direct sum of full matrix algebras, described by the list
of block dimensions.  A commutative algebra C^X is the special case of
``|X|`` blocks of size one.  Tensor products of two algebras carry their
factors so that marginals and the swap can be taken; their blocks are the
pairs (x, y) in lexicographic order with x outer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from . import linalg
from .errors import ShapeMismatch


@dataclass(frozen=True)
class AlgebraShape:
    blocks: tuple[int, ...]
    factors: tuple["AlgebraShape", "AlgebraShape"] | None = field(default=None, compare=False)
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ShapeMismatch(f"invalid block dimensions {self.blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def total_dim(self) -> int:
        return sum(self.blocks)

    @property
    def vec_dim(self) -> int:
        return sum(b * b for b in self.blocks)

    @property
    def is_tensor(self) -> bool:
        return self.factors is not None

    def __len__(self) -> int:
        return len(self.blocks)

    def offsets(self) -> list[int]:
        """Start index of each block inside the vectorized element."""
        out, acc = [], 0
        for b in self.blocks:
            out.append(acc)
            acc += b * b
        return out

    def matrix_units(self) -> Iterable[tuple[int, int, int]]:
        """(block, i, j) for every matrix unit, in vectorization order."""
        for x, m in enumerate(self.blocks):
            for i in range(m):
                for j in range(m):
                    yield x, i, j


def matrix_algebra(n: int) -> AlgebraShape:
    return AlgebraShape((n,))


def classical_algebra(k: int) -> AlgebraShape:
    return AlgebraShape((1,) * k)


def tensor_shape(a: AlgebraShape, b: AlgebraShape) -> AlgebraShape:
    blocks = tuple(m * n for m in a.blocks for n in b.blocks)
    return AlgebraShape(blocks, factors=(a, b))


def _pair_index(shape: AlgebraShape, x: int, y: int) -> int:
    return x * len(shape.factors[1]) + y


class AlgElement:
    """An element of a multi-matrix algebra, stored block by block."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape, blocks: Sequence):
        if len(blocks) != len(shape.blocks):
            raise ShapeMismatch(f"{len(blocks)} blocks given for a shape with {len(shape.blocks)}")
        mats = []
        for m, b in zip(shape.blocks, blocks):
            arr = np.array(b, dtype=complex).reshape(m, m) if np.size(b) == m * m else None
            if arr is None:
                raise ShapeMismatch(f"block of size {np.shape(b)} does not match dimension {m}")
            arr.setflags(write=False)
            mats.append(arr)
        self.shape = shape
        self.blocks = tuple(mats)

    # construction helpers
    @classmethod
    def from_matrix(cls, a) -> "AlgElement":
        a = linalg.as_matrix(a)
        return cls(matrix_algebra(a.shape[0]), [a])

    @classmethod
    def from_dist(cls, p) -> "AlgElement":
        p = np.asarray(p, dtype=complex).ravel()
        return cls(classical_algebra(len(p)), [[v] for v in p])

    @classmethod
    def zeros(cls, shape: AlgebraShape) -> "AlgElement":
        return cls(shape, [np.zeros((m, m)) for m in shape.blocks])

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "AlgElement":
        return cls(shape, [np.eye(m) for m in shape.blocks])

    @classmethod
    def unit(cls, shape: AlgebraShape, x: int, i: int, j: int) -> "AlgElement":
        blocks = [np.zeros((m, m)) for m in shape.blocks]
        blocks[x][i, j] = 1.0
        return cls(shape, blocks)

    @classmethod
    def from_vec(cls, shape: AlgebraShape, v) -> "AlgElement":
        v = np.asarray(v, dtype=complex)
        if v.shape != (shape.vec_dim,):
            raise ShapeMismatch(f"vector of length {v.shape} for vec_dim {shape.vec_dim}")
        blocks = []
        for off, m in zip(shape.offsets(), shape.blocks):
            blocks.append(v[off:off + m * m].reshape(m, m))
        return cls(shape, blocks)

    @classmethod
    def from_bloc(cls, shape: AlgebraShape, a) -> "AlgElement":
        """Compress a total_dim square matrix onto the diagonal blocks of ``shape``."""
        a = linalg.as_matrix(a)
        if a.shape != (shape.total_dim, shape.total_dim):
            raise ShapeMismatch(f"matrix {a.shape} does not fit total dimension {shape.total_dim}")
        blocks, s = [], 0
        for m in shape.blocks:
            blocks.append(a[s:s + m, s:s + m])
            s += m
        return cls(shape, blocks)

    # views
    def vec(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks])

    def bloc(self) -> np.ndarray:
        return scipy.linalg.block_diag(*self.blocks).astype(complex)

    def block(self, x: int, y: int | None = None) -> np.ndarray:
        if y is None:
            return self.blocks[x]
        if not self.shape.is_tensor:
            raise ShapeMismatch("pair indexing needs a tensor shape")
        return self.blocks[_pair_index(self.shape, x, y)]

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.blocks))

    def dagger(self) -> "AlgElement":
        return AlgElement(self.shape, [b.conj().T for b in self.blocks])

    def spectrum(self) -> np.ndarray:
        """Multispectrum: union of the block spectra, ascending."""
        return np.sort(np.concatenate([linalg.spectrum(b) for b in self.blocks]))

    def is_hermitian(self, tol: float = linalg.HERM_TOL) -> bool:
        return all(linalg.is_hermitian(b, tol) for b in self.blocks)

    def is_quasi_state(self, tol: float = 1e-9) -> bool:
        return self.is_hermitian() and abs(self.trace() - 1) <= tol

    def is_state(self, tol: float = 1e-9) -> bool:
        return self.is_quasi_state(tol) and all(linalg.is_psd(b) for b in self.blocks)

    def to_dist(self) -> np.ndarray:
        """Real diagonal entries, for elements of a commutative algebra."""
        return np.concatenate([np.real(np.diag(b)) for b in self.blocks])

    # arithmetic
    def _check(self, other: "AlgElement"):
        if self.shape.blocks != other.shape.blocks:
            raise ShapeMismatch(f"shapes {self.shape.blocks} and {other.shape.blocks} differ")

    def __add__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgElement":
        return AlgElement(self.shape, [-a for a in self.blocks])

    def __mul__(self, c) -> "AlgElement":
        return AlgElement(self.shape, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgElement") -> "AlgElement":
        self._check(other)
        return AlgElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def map_blocks(self, f) -> "AlgElement":
        return AlgElement(self.shape, [f(b) for b in self.blocks])

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in self.blocks)))

    def max_abs_diff(self, other: "AlgElement") -> float:
        self._check(other)
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.blocks, other.blocks))

    def __repr__(self) -> str:
        return f"AlgElement(blocks={self.shape.blocks})"


def bloc(a: AlgElement) -> np.ndarray:
    return a.bloc()


def direct_sum(*elems: AlgElement) -> AlgElement:
    blocks = [b for e in elems for b in e.blocks]
    return AlgElement(AlgebraShape(tuple(b.shape[0] for b in blocks)), blocks)


def tensor_elem(a: AlgElement, b: AlgElement) -> AlgElement:
    shape = tensor_shape(a.shape, b.shape)
    return AlgElement(shape, [np.kron(x, y) for x in a.blocks for y in b.blocks])


def ptrace_factor(a: AlgElement, which: str = "left") -> AlgElement:
    """Marginal of an element of a tensor product; ``left`` traces the first factor."""
    if not a.shape.is_tensor:
        raise ShapeMismatch("element does not live on a tensor product")
    left, right = a.shape.factors
    if which == "left":
        out = [np.zeros((n, n), dtype=complex) for n in right.blocks]
        for x, m in enumerate(left.blocks):
            for y, n in enumerate(right.blocks):
                out[y] += linalg.partial_trace(a.block(x, y), m, n, "left")
        return AlgElement(right, out)
    if which == "right":
        out = [np.zeros((m, m), dtype=complex) for m in left.blocks]
        for x, m in enumerate(left.blocks):
            for y, n in enumerate(right.blocks):
                out[x] += linalg.partial_trace(a.block(x, y), m, n, "right")
        return AlgElement(left, out)
    raise ValueError(f"unknown factor selector {which!r}")


def swap_matrix(m: int, n: int) -> np.ndarray:
    """Permutation W with W (a kron b) = b kron a for a in C^m, b in C^n."""
    w = np.zeros((m * n, m * n), dtype=complex)
    for i in range(m):
        for k in range(n):
            w[k * m + i, i * n + k] = 1.0
    return w


def swap_gamma(a: AlgElement) -> AlgElement:
    """The swap isomorphism from A (x) B to B (x) A."""
    if not a.shape.is_tensor:
        raise ShapeMismatch("element does not live on a tensor product")
    left, right = a.shape.factors
    flipped = tensor_shape(right, left)
    blocks = []
    for y, n in enumerate(right.blocks):
        for x, m in enumerate(left.blocks):
            w = swap_matrix(m, n)
            blocks.append(w @ a.block(x, y) @ w.T)
    return AlgElement(flipped, blocks)


def mult_adjoint(rho) -> np.ndarray:
    """Hilbert-Schmidt adjoint of multiplication on M_n, evaluated at ``rho``.

    Equals the sum over i, j of (rho E_ij) kron E_ji, i.e. (rho kron 1) times
    the swap operator.
    """
    rho = linalg.as_matrix(rho)
    n = rho.shape[0]
    return np.kron(rho, np.eye(n)) @ swap_matrix(n, n)


def mult_adjoint_elem(rho: AlgElement) -> AlgElement:
    """Blockwise version on a multi-matrix algebra; off-diagonal pair blocks vanish."""
    shape = tensor_shape(rho.shape, rho.shape)
    blocks = []
    for x, m in enumerate(rho.shape.blocks):
        for y, n in enumerate(rho.shape.blocks):
            blocks.append(mult_adjoint(rho.blocks[x]) if x == y else np.zeros((m * n, m * n)))
    return AlgElement(shape, blocks)


def to_json(a: AlgElement) -> dict:
    return {"blocks": [{"dim": int(b.shape[0]), "re": np.real(b).tolist(), "im": np.imag(b).tolist()}
                       for b in a.blocks]}


def from_json(obj: dict) -> AlgElement:
    blocks, dims = [], []
    for entry in obj["blocks"]:
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
        d = int(entry.get("dim", re.shape[0]))
        blocks.append((re + 1j * im).reshape(d, d))
        dims.append(d)
    return AlgElement(AlgebraShape(tuple(dims)), blocks)

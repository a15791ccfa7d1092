"""Entropy of hermitian matrices and quasi-probability distributions.

The extended entropy of a hermitian A is -sum lambda log|lambda| over its
multispectrum.  It agrees with the von Neumann entropy on density matrices
and stays odd in lambda, so negative eigenvalues of a quasi-state pull in
the opposite direction.  Eigenvalues with |lambda| <= ZERO_TOL contribute 0.
Logarithms default to base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import NonHermitianInput, NotOrthogonal, ShapeMismatch
from .mmalg import AlgElement

DEFAULT_BASE = 2.0


def parse_log_base(text: str) -> float:
    text = str(text).strip().lower()
    if text == "2":
        return 2.0
    if text == "e":
        return math.e
    raise ValueError(f"log base must be 2 or e, got {text!r}")


def _log(x: np.ndarray, base: float) -> np.ndarray:
    return np.log(x) / math.log(base)


def _spectrum(a) -> np.ndarray:
    if isinstance(a, AlgElement):
        if not a.is_hermitian():
            raise NonHermitianInput("element is not hermitian")
        return a.spectrum()
    m = linalg.as_matrix(a)
    if not linalg.is_hermitian(m):
        raise NonHermitianInput("matrix is not hermitian")
    return linalg.spectrum(m)


def qdist_entropy(p: Sequence[float], base: float = DEFAULT_BASE) -> float:
    """H(p) = -sum p_x log|p_x| for a (quasi-)probability vector."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[np.abs(p) > linalg.ZERO_TOL]
    return float(-np.sum(p * _log(np.abs(p), base))) + 0.0  # no -0.0


def even_qdist_entropy(p: Sequence[float], base: float = DEFAULT_BASE) -> float:
    p = np.abs(np.asarray(p, dtype=float).ravel())
    p = p[p > linalg.ZERO_TOL]
    return float(-np.sum(p * _log(p, base))) + 0.0


def ext_entropy(a, base: float = DEFAULT_BASE) -> float:
    """Extended entropy -tr(A log|A|) of a hermitian matrix or algebra element."""
    return qdist_entropy(_spectrum(a), base)


def even_entropy(a, base: float = DEFAULT_BASE) -> float:
    """-tr(|A| log|A|), the even extension kept for comparison."""
    return even_qdist_entropy(_spectrum(a), base)


def _as_matrix(a) -> np.ndarray:
    return a.bloc() if isinstance(a, AlgElement) else linalg.as_matrix(a)


def orthogonal_affinity_check(p: Sequence[float], parts: Sequence, base: float = DEFAULT_BASE) -> float:
    """|S(sum p_x A_x) - H(p) - sum p_x S(A_x)| for mutually orthogonal A_x."""
    mats = [_as_matrix(a) for a in parts]
    p = np.asarray(p, dtype=float)
    if len(mats) != len(p):
        raise ShapeMismatch("one weight per part is required")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.linalg.norm(mats[i] @ mats[j]) > 1e-9:
                raise NotOrthogonal(f"parts {i} and {j} are not orthogonal")
    mix = sum(px * m for px, m in zip(p, mats))
    lhs = ext_entropy(mix, base)
    rhs = qdist_entropy(p, base) + sum(px * ext_entropy(m, base) for px, m in zip(p, mats))
    return abs(lhs - rhs)


@dataclass(frozen=True)
class FannesRecord:
    applicable: bool
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return (not self.applicable) or self.lhs <= self.rhs + 1e-12


def fannes_check(a, b, base: float = DEFAULT_BASE) -> FannesRecord:
    """Continuity bound |S(a) - S(b)| <= T log n + eta(T), T = ||a - b||_1.

    It applies when the sorted spectra pair up with matching signs and
    T <= 1/e.
    """
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ShapeMismatch("fannes_check needs matrices of the same size")
    la, lb = linalg.spectrum(ma), linalg.spectrum(mb)
    t = linalg.trace_norm_herm(ma - mb)
    same_sign = bool(np.all(la * lb >= 0))
    applicable = same_sign and t <= 1 / math.e
    n = ma.shape[0]
    eta = 0.0 if t <= linalg.ZERO_TOL else -t * math.log(t) / math.log(base)
    rhs = t * math.log(n) / math.log(base) + eta
    lhs = abs(ext_entropy(ma, base) - ext_entropy(mb, base))
    return FannesRecord(applicable, lhs, rhs)


def causality_monotone(a) -> float:
    """||A||_1 - 1 for a hermitian unit-trace A; zero exactly on states."""
    return float(np.sum(np.abs(_spectrum(a)))) - 1.0

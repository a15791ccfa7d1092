"""States over time for processes (rho, E).

Every construction here starts from the channel state J[E] on A (x) B and
multiplies it by functions of rho (x) 1.  The kinds related to the
(p, q, r)-family are::

    p-bloom        (rho^p (x) 1) J (rho^(1-p) (x) 1)
    (p, q, r)      r * p-bloom(p) + (1 - r) * p-bloom(q)
    symmetric p    the (p, 1 - p, 1/2) member
    right / left   p-bloom with p = 1 / p = 0
    symmetric      Jordan product (1/2){rho (x) 1, J}
    LS             p-bloom with p = 1/2

with the convention rho^0 = 1.  The compound state is built from the
spectral projections of rho instead.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import Channel, jamiolkowski
from .errors import InvalidState, NotCPTP, PreconditionViolated, ShapeMismatch
from .mmalg import AlgElement, ptrace_factor

COMPOUND_GAP = 1e-8
MARGINAL_TOL = 1e-9


@dataclass(frozen=True)
class SotKind:
    name: str
    p: float | None = None
    q: float | None = None
    r: float | None = None

    NAMES = ("right", "left", "sym-bloom", "p-bloom", "sym-p-bloom", "pqr", "ls", "compound")

    def __post_init__(self):
        if self.name not in self.NAMES:
            raise ValueError(f"unknown state over time {self.name!r}")
        for v in (self.p, self.q, self.r):
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"parameter {v} outside [0, 1]")
        needs = {"p-bloom": 1, "sym-p-bloom": 1, "pqr": 3}.get(self.name, 0)
        given = sum(v is not None for v in (self.p, self.q, self.r))
        if given != needs:
            raise ValueError(f"{self.name} takes {needs} parameter(s)")

    @classmethod
    def parse(cls, text: str) -> "SotKind":
        text = text.strip()
        name, _, args = text.partition(":")
        vals = [float(v) for v in re.split(r"\s*,\s*", args)] if args else []
        if name == "pqr" and len(vals) == 3:
            return cls(name, *vals)
        if name in ("p-bloom", "sym-p-bloom") and len(vals) == 1:
            return cls(name, vals[0])
        if not vals:
            return cls(name)
        raise ValueError(f"cannot parse state over time {text!r}")

    def __str__(self) -> str:
        if self.name == "pqr":
            return f"pqr:{self.p:g},{self.q:g},{self.r:g}"
        if self.p is not None:
            return f"{self.name}:{self.p:g}"
        return self.name

    def pqr(self) -> tuple[float, float, float] | None:
        """Parameters of the equivalent (p, q, r)-family member, if any."""
        return {
            "right": (1.0, 1.0, 1.0),
            "left": (0.0, 0.0, 1.0),
            "sym-bloom": (1.0, 0.0, 0.5),
            "ls": (0.5, 0.5, 1.0),
            "p-bloom": (self.p, self.p, 1.0),
            "sym-p-bloom": (self.p, 1.0 - self.p if self.p is not None else None, 0.5),
            "pqr": (self.p, self.q, self.r),
        }.get(self.name)

    @property
    def is_hermitian(self) -> bool:
        """Whether the kind always produces hermitian states over time."""
        if self.name == "compound":
            return True
        p, q, r = self.pqr()
        if r == 0.5 and math.isclose(p + q, 1.0):
            return True
        return math.isclose(p, 0.5) and math.isclose(q, 0.5)

    @property
    def is_state_linear(self) -> bool:
        """Linear in rho: only members built from rho^1 and rho^0."""
        if self.name == "compound":
            return False
        p, q, r = self.pqr()
        used = [p] if r == 1 else [q] if r == 0 else [p, q]
        return all(v in (0.0, 1.0) for v in used)


RIGHT = SotKind("right")
LEFT = SotKind("left")
SYM_BLOOM = SotKind("sym-bloom")
LS = SotKind("ls")
COMPOUND = SotKind("compound")


def p_bloom(p: float) -> SotKind:
    return SotKind("p-bloom", p)


def sym_p_bloom(p: float) -> SotKind:
    return SotKind("sym-p-bloom", p)


def pqr_kind(p: float, q: float, r: float) -> SotKind:
    return SotKind("pqr", p, q, r)


@dataclass(frozen=True)
class Process:
    rho: AlgElement
    channel: Channel
    validate: bool = True

    def __post_init__(self):
        if self.rho.shape.blocks != self.channel.dom.blocks:
            raise ShapeMismatch("state and channel domain differ")
        if self.validate:
            if not self.rho.is_state():
                raise InvalidState("rho must be positive with unit trace")
            if not self.channel.is_cptp():
                raise NotCPTP("channel must be completely positive and trace preserving")

    @property
    def output(self) -> AlgElement:
        return self.channel.apply(self.rho)


@dataclass(frozen=True)
class StateOverTime:
    value: AlgElement
    kind: SotKind
    input_residual: float
    output_residual: float

    @property
    def marginals_ok(self) -> bool:
        return max(self.input_residual, self.output_residual) < MARGINAL_TOL


def _power(block: np.ndarray, p: float) -> np.ndarray:
    # rho^1 and rho^0 need no positivity, which keeps linear kinds linear on quasi-states
    if p == 1:
        return block
    if p == 0:
        return np.eye(block.shape[0], dtype=complex)
    return linalg.psd_power(block, p)


def _left_right(rho: AlgElement, j: AlgElement, left_pow: float, right_pow: float) -> AlgElement:
    cod = j.shape.factors[1]
    blocks = []
    for x, b in enumerate(rho.blocks):
        lp, rp = _power(b, left_pow), _power(b, right_pow)
        for y, n in enumerate(cod.blocks):
            eye = np.eye(n)
            blocks.append(np.kron(lp, eye) @ j.block(x, y) @ np.kron(rp, eye))
    return AlgElement(j.shape, blocks)


def _compound(rho: AlgElement, e: Channel, j: AlgElement) -> AlgElement:
    cod = e.cod
    blocks = []
    for x, b in enumerate(rho.blocks):
        m = b.shape[0]
        eig = linalg.herm_eigen(b)
        acc = [np.zeros((m * n, m * n), dtype=complex) for n in cod.blocks]
        for lam, proj in spectral_clusters(eig):
            if abs(lam) <= linalg.ZERO_TOL:
                continue
            embedded = [np.zeros((k, k), dtype=complex) for k in rho.shape.blocks]
            embedded[x] = proj / np.real(np.trace(proj))
            out = e.apply(AlgElement(rho.shape, embedded))
            for y in range(len(cod.blocks)):
                acc[y] += lam * np.kron(proj, out.blocks[y])
        blocks.extend(acc)
    return AlgElement(j.shape, blocks)


def spectral_clusters(eig: linalg.HermEigen, gap: float = COMPOUND_GAP):
    """(eigenvalue, projector) pairs, grouping eigenvalues within a relative gap."""
    w, v = eig.eigenvalues, eig.eigenvectors
    groups: list[list[int]] = []
    for k in range(len(w)):
        if groups:
            prev = w[groups[-1][-1]]
            if abs(w[k] - prev) <= gap * max(abs(w[k]), abs(prev)) + linalg.ZERO_TOL:
                groups[-1].append(k)
                continue
        groups.append([k])
    out = []
    for g in groups:
        vecs = v[:, g]
        out.append((float(np.mean(w[g])), vecs @ vecs.conj().T))
    return out


def sot_value(kind: SotKind, rho: AlgElement, e: Channel) -> AlgElement:
    """The element psi(rho, E) without any validation of rho or E."""
    if rho.shape.blocks != e.dom.blocks:
        raise ShapeMismatch("state and channel domain differ")
    j = jamiolkowski(e)
    if kind.name == "compound":
        return _compound(rho, e, j)
    p, q, r = kind.pqr()
    out = _left_right(rho, j, p, 1 - p)
    if r != 1:
        out = r * out + (1 - r) * _left_right(rho, j, q, 1 - q)
    return out


def sot(kind: SotKind, proc: Process) -> StateOverTime:
    value = sot_value(kind, proc.rho, proc.channel)
    in_res = ptrace_factor(value, "right").max_abs_diff(proc.rho)
    out_res = ptrace_factor(value, "left").max_abs_diff(proc.output)
    return StateOverTime(value, kind, in_res, out_res)


@dataclass(frozen=True)
class ReducibilityReport:
    commutes: bool
    commutator_norm: float
    max_deviation: float

    @property
    def ok(self) -> bool:
        return (not self.commutes) or self.max_deviation < 1e-9


REDUCIBLE_KINDS = (RIGHT, LEFT, SYM_BLOOM, sym_p_bloom(0.3), LS)


def classical_reducibility_check(kind: SotKind | None, proc: Process) -> ReducibilityReport:
    """If rho (x) 1 commutes with J[E], every listed kind must equal the right bloom.

    ``kind=None`` checks all of Right, Left, SymBloom, a SymPBloom member and LS.
    """
    j = jamiolkowski(proc.channel)
    right = _left_right(proc.rho, j, 1, 0)
    left = _left_right(proc.rho, j, 0, 1)
    comm = (right - left).norm()
    commutes = comm < 1e-9
    dev = 0.0
    if commutes:
        kinds = REDUCIBLE_KINDS if kind is None else (kind,)
        for k in kinds:
            dev = max(dev, sot_value(k, proc.rho, proc.channel).max_abs_diff(right))
    return ReducibilityReport(commutes, comm, dev)


def _coefficients(lam: np.ndarray, p: float, q: float, r: float) -> np.ndarray:
    lp, l1p = linalg.pseudo_power(lam, p), linalg.pseudo_power(lam, 1 - p)
    lq, l1q = linalg.pseudo_power(lam, q), linalg.pseudo_power(lam, 1 - q)
    return r * np.outer(lp, l1p) + (1 - r) * np.outer(lq, l1q)


def unitary_process_mspec(p: float, q: float, r: float, rho) -> np.ndarray:
    """Multispectrum of psi_pqr(rho, Ad_U), which does not depend on U.

    It is mspec(rho) together with +-sqrt(a_ij a_ji) over pairs i < j, where
    a_ij = r l_i^p l_j^(1-p) + (1 - r) l_i^q l_j^(1-q).
    """
    mat = rho.blocks[0] if isinstance(rho, AlgElement) else linalg.as_matrix(rho)
    lam = np.clip(linalg.spectrum(mat), 0.0, None)
    a = _coefficients(lam, p, q, r)
    vals = list(np.diag(a))
    m = len(lam)
    for i in range(m):
        for j in range(i + 1, m):
            s = math.sqrt(max(a[i, j] * a[j, i], 0.0))
            vals.extend((s, -s))
    return np.sort(np.array(vals))


def structured_matrix(a) -> np.ndarray:
    """sum_ij E_ij (x) a_ij E_ji."""
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    out = np.zeros((m * m, m * m))
    for i in range(m):
        for j in range(m):
            # E_ij (x) E_ji maps e_j (x) e_i to e_i (x) e_j
            out[i * m + j, j * m + i] = a[i, j]
    return out


@dataclass(frozen=True)
class StructuredEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_residual: float

    @property
    def ok(self) -> bool:
        return self.max_residual < 1e-10


def structured_eigen_check(a) -> StructuredEigen:
    """Eigenvectors of sum E_ij (x) a_ij E_ji built explicitly, with their residuals.

    Uses e_i (x) e_i with eigenvalue a_ii and
    sqrt(a_ij) e_i (x) e_j +- sqrt(a_ji) e_j (x) e_i with eigenvalue +-sqrt(a_ij a_ji).
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if np.any(a < 0):
        raise PreconditionViolated("coefficients must be non-negative")
    for i in range(m):
        for j in range(m):
            if (a[i, j] <= linalg.ZERO_TOL) != (a[j, i] <= linalg.ZERO_TOL):
                raise PreconditionViolated(f"a[{i},{j}] and a[{j},{i}] must vanish together")
    big = structured_matrix(a)
    basis = np.eye(m * m)
    vals, vecs = [], []
    for i in range(m):
        vals.append(a[i, i])
        vecs.append(basis[i * m + i])
        for j in range(i + 1, m):
            eij, eji = basis[i * m + j], basis[j * m + i]
            if a[i, j] <= linalg.ZERO_TOL:
                vals.extend((0.0, 0.0))
                vecs.extend((eij, eji))
                continue
            s = math.sqrt(a[i, j] * a[j, i])
            vals.extend((s, -s))
            vecs.append(math.sqrt(a[i, j]) * eij + math.sqrt(a[j, i]) * eji)
            vecs.append(math.sqrt(a[i, j]) * eij - math.sqrt(a[j, i]) * eji)
    vecs_arr = np.column_stack(vecs)
    vals_arr = np.array(vals)
    res = float(np.max(np.abs(big @ vecs_arr - vecs_arr * vals_arr)))
    return StructuredEigen(vals_arr, vecs_arr, res)


def diagonal_p_bloom(sigma_diag, p: float) -> np.ndarray:
    """Closed form of psi_p(sigma, id) for diagonal sigma: sum E_ij (x) s_i^p s_j^(1-p) E_ji."""
    s = np.asarray(sigma_diag, dtype=float)
    a = np.outer(linalg.pseudo_power(s, p), linalg.pseudo_power(s, 1 - p))
    return structured_matrix(a).astype(complex)

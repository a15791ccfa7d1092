"""Linear maps between multi-matrix algebras.

A channel is stored as a dense superoperator acting on block-vectorized
elements (each block flattened row-major, blocks concatenated).  Kraus,
Choi and Jamiolkowski forms are derived from it on demand.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import InvalidEffects, InvalidState, NotStochastic, ParseError, ShapeMismatch
from .mmalg import (AlgebraShape, AlgElement, classical_algebra, matrix_algebra,
                    tensor_shape)

FLAG_TOL = 1e-9


class Channel:
    """A linear map dom -> cod.

    The three structural flags (trace preserving, dagger preserving,
    completely positive) start unchecked and are computed on first use.
    Computing them twice gives the same answer, so a plain dict assignment
    is enough to publish them safely between threads.
    """

    def __init__(self, dom: AlgebraShape, cod: AlgebraShape, superop):
        s = np.array(superop, dtype=complex)
        if s.shape != (cod.vec_dim, dom.vec_dim):
            raise ShapeMismatch(f"superoperator {s.shape} does not match {cod.vec_dim}x{dom.vec_dim}")
        s.setflags(write=False)
        self.dom = dom
        self.cod = cod
        self.superop = s
        self._flags: dict[str, bool] = {}

    @classmethod
    def from_function(cls, dom: AlgebraShape, cod: AlgebraShape,
                      f: Callable[[AlgElement], AlgElement]) -> "Channel":
        cols = []
        for x, i, j in dom.matrix_units():
            out = f(AlgElement.unit(dom, x, i, j))
            if out.shape.blocks != cod.blocks:
                raise ShapeMismatch(f"map returned blocks {out.shape.blocks}, expected {cod.blocks}")
            cols.append(out.vec())
        return cls(dom, cod, np.column_stack(cols))

    def apply(self, a: AlgElement) -> AlgElement:
        if a.shape.blocks != self.dom.blocks:
            raise ShapeMismatch(f"input blocks {a.shape.blocks} do not match domain {self.dom.blocks}")
        return AlgElement.from_vec(self.cod, self.superop @ a.vec())

    __call__ = apply

    def apply_unit(self, x: int, i: int, j: int) -> AlgElement:
        col = self.dom.offsets()[x] + i * self.dom.blocks[x] + j
        return AlgElement.from_vec(self.cod, self.superop[:, col])

    def __matmul__(self, other: "Channel") -> "Channel":
        return compose(self, other)

    def __add__(self, other: "Channel") -> "Channel":
        return Channel(self.dom, self.cod, self.superop + other.superop)

    def __sub__(self, other: "Channel") -> "Channel":
        return Channel(self.dom, self.cod, self.superop - other.superop)

    def __mul__(self, c) -> "Channel":
        return Channel(self.dom, self.cod, c * self.superop)

    __rmul__ = __mul__

    # structural checks
    def _flag(self, name: str, compute: Callable[[], bool]) -> bool:
        val = self._flags.get(name)
        if val is None:
            val = bool(compute())
            self._flags[name] = val
        return val

    def flag_state(self, name: str) -> bool | None:
        """True/False once checked, None while unchecked."""
        return self._flags.get(name)

    def is_tp(self) -> bool:
        return self._flag("trace_preserving", lambda: _check_tp(self))

    def is_dagger_preserving(self) -> bool:
        return self._flag("dagger_preserving", lambda: _check_dagger(self))

    def is_cp(self) -> bool:
        return self._flag("completely_positive", lambda: linalg.is_psd(choi(self)))

    def is_cptp(self) -> bool:
        return self.is_tp() and self.is_cp()

    def __repr__(self) -> str:
        return f"Channel({self.dom.blocks} -> {self.cod.blocks})"


def _trace_row(shape: AlgebraShape) -> np.ndarray:
    row = np.zeros(shape.vec_dim, dtype=complex)
    for off, m in zip(shape.offsets(), shape.blocks):
        row[off + np.arange(m) * (m + 1)] = 1.0
    return row


def _check_tp(e: Channel) -> bool:
    lhs = _trace_row(e.cod) @ e.superop
    return float(np.max(np.abs(lhs - _trace_row(e.dom)))) <= FLAG_TOL


def _check_dagger(e: Channel) -> bool:
    for x, i, j in e.dom.matrix_units():
        if j < i:
            continue
        a = e.apply_unit(x, i, j)
        b = e.apply_unit(x, j, i)
        if a.dagger().max_abs_diff(b) > FLAG_TOL:
            return False
    return True


def compose(second: Channel, first: Channel) -> Channel:
    """second after first."""
    if first.cod.blocks != second.dom.blocks:
        raise ShapeMismatch(f"cannot compose {first} with {second}")
    return Channel(first.dom, second.cod, second.superop @ first.superop)


def hs_adjoint(e: Channel) -> Channel:
    """Hilbert-Schmidt adjoint; block vectorization makes it the conjugate transpose."""
    return Channel(e.cod, e.dom, e.superop.conj().T)


def identity_channel(shape: AlgebraShape) -> Channel:
    return Channel(shape, shape, np.eye(shape.vec_dim))


def from_kraus(dom: AlgebraShape, cod: AlgebraShape, kraus_plus: Sequence,
               kraus_minus: Sequence = ()) -> Channel:
    """A -> sum V bloc(A) V^dagger - sum W bloc(A) W^dagger, compressed onto cod.

    Kraus operators are cod.total_dim x dom.total_dim matrices.
    """
    plus = [linalg.as_matrix(v) for v in kraus_plus]
    minus = [linalg.as_matrix(w) for w in kraus_minus]
    for k in plus + minus:
        if k.shape != (cod.total_dim, dom.total_dim):
            raise ShapeMismatch(f"Kraus operator {k.shape} does not map {dom.total_dim} -> {cod.total_dim}")

    def f(a: AlgElement) -> AlgElement:
        x = a.bloc()
        out = sum((v @ x @ v.conj().T for v in plus), np.zeros((cod.total_dim,) * 2, dtype=complex))
        for w in minus:
            out = out - w @ x @ w.conj().T
        return AlgElement.from_bloc(cod, out)

    return Channel.from_function(dom, cod, f)


def from_unitary(u) -> Channel:
    u = linalg.as_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n) or not np.allclose(u.conj().T @ u, np.eye(n), atol=1e-9):
        raise ShapeMismatch("from_unitary needs a square unitary matrix")
    shape = matrix_algebra(n)
    return from_kraus(shape, shape, [u])


def star_isomorphism(dom: AlgebraShape, unitaries: Sequence, perm: Sequence[int]) -> Channel:
    """Block x goes to block perm[x] of the codomain after conjugation by unitaries[x]."""
    if sorted(perm) != list(range(len(dom))):
        raise ShapeMismatch("perm must be a permutation of the blocks")
    cod_blocks = [0] * len(dom)
    for x, m in enumerate(dom.blocks):
        cod_blocks[perm[x]] = m
    cod = AlgebraShape(tuple(cod_blocks))
    us = [linalg.as_matrix(u) for u in unitaries]

    def f(a: AlgElement) -> AlgElement:
        out = [None] * len(dom)
        for x, b in enumerate(a.blocks):
            out[perm[x]] = us[x] @ b @ us[x].conj().T
        return AlgElement(cod, out)

    return Channel.from_function(dom, cod, f)


def ptrace_channel(p: int, n: int, which: str = "left") -> Channel:
    """Partial trace on M_p (x) M_n; ``left`` discards the M_p factor."""
    dom = matrix_algebra(p * n)
    cod = matrix_algebra(n if which == "left" else p)
    return Channel.from_function(
        dom, cod, lambda a: AlgElement(cod, [linalg.partial_trace(a.blocks[0], p, n, which)]))


def _check_effects(effects, projective: bool) -> list[np.ndarray]:
    mats = [linalg.as_matrix(e) for e in effects]
    if not mats:
        raise InvalidEffects("empty family")
    n = mats[0].shape[0]
    for e in mats:
        if e.shape != (n, n):
            raise InvalidEffects("effects must be square matrices of a common size")
        if not linalg.is_psd(e):
            raise InvalidEffects("effects must be positive semidefinite")
        if projective and np.max(np.abs(e @ e - e)) > 1e-9:
            raise InvalidEffects("projectors must be idempotent")
    if np.max(np.abs(sum(mats) - np.eye(n))) > 1e-9:
        raise InvalidEffects("effects do not sum to the identity")
    if projective:
        for a in range(len(mats)):
            for b in range(a + 1, len(mats)):
                if np.max(np.abs(mats[a] @ mats[b])) > 1e-9:
                    raise InvalidEffects("projectors must be mutually orthogonal")
    return mats


def _measurement(mats: list[np.ndarray]) -> Channel:
    n = mats[0].shape[0]
    dom, cod = matrix_algebra(n), classical_algebra(len(mats))
    return Channel.from_function(
        dom, cod, lambda a: AlgElement.from_dist([np.trace(a.blocks[0] @ e) for e in mats]))


def povm_channel(effects) -> Channel:
    """A -> sum_y tr(A E_y) delta_y."""
    return _measurement(_check_effects(effects, projective=False))


def pvm_channel(projectors) -> Channel:
    return _measurement(_check_effects(projectors, projective=True))


def preparation_channel(states) -> Channel:
    """delta_x -> rho^x."""
    mats = [linalg.as_matrix(s) for s in states]
    n = mats[0].shape[0]
    for s in mats:
        if s.shape != (n, n) or not AlgElement.from_matrix(s).is_state():
            raise InvalidState("preparation needs density matrices of a common size")
    dom, cod = classical_algebra(len(mats)), matrix_algebra(n)
    return Channel.from_function(dom, cod, lambda a: AlgElement(cod, [sum(
        a.blocks[x][0, 0] * mats[x] for x in range(len(mats)))]))


def discard_and_prepare(dom: AlgebraShape, sigma: AlgElement) -> Channel:
    """A -> tr(A) sigma."""
    return Channel.from_function(dom, sigma.shape, lambda a: a.trace() * sigma)


def classical_channel(f) -> Channel:
    """Stochastic matrix f[y, x] (columns sum to one) acting on C^X -> C^Y."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or np.any(f < -1e-12) or np.max(np.abs(f.sum(axis=0) - 1)) > 1e-9:
        raise NotStochastic("expected a non-negative matrix with unit column sums")
    ny, nx = f.shape
    dom, cod = classical_algebra(nx), classical_algebra(ny)
    return Channel.from_function(dom, cod, lambda a: AlgElement.from_dist(f @ a.to_dist()))


def instrument_channel(families: Sequence[Sequence]) -> Channel:
    """A -> direct sum over y of sum_k K_yk A K_yk^dagger."""
    fams = [[linalg.as_matrix(k) for k in fam] for fam in families]
    n = fams[0][0].shape[1]
    dom = matrix_algebra(n)
    cod = AlgebraShape(tuple(fam[0].shape[0] for fam in fams))
    total = sum(k.conj().T @ k for fam in fams for k in fam)
    if np.max(np.abs(total - np.eye(n))) > 1e-9:
        raise InvalidEffects("instrument is not trace preserving")
    return Channel.from_function(dom, cod, lambda a: AlgElement(
        cod, [sum(k @ a.blocks[0] @ k.conj().T for k in fam) for fam in fams]))


def bitflip(lam: float) -> Channel:
    """lam id + (1 - lam) Ad_X on a qubit."""
    sx = np.array([[0, 1], [1, 0]])
    return from_kraus(matrix_algebra(2), matrix_algebra(2),
                      [np.sqrt(lam) * np.eye(2), np.sqrt(1 - lam) * sx])


def amplitude_damping(p: float) -> Channel:
    """Decay of the excited level |1> into |0> with probability p."""
    a1 = np.array([[1, 0], [0, np.sqrt(1 - p)]])
    a2 = np.array([[0, np.sqrt(p)], [0, 0]])
    return from_kraus(matrix_algebra(2), matrix_algebra(2), [a1, a2])


def jamiolkowski(e: Channel) -> AlgElement:
    """Channel state: block (x, y) is sum_ij E_ij kron E(E_ji)_y."""
    shape = tensor_shape(e.dom, e.cod)
    blocks = []
    for x, m in enumerate(e.dom.blocks):
        outs = {(i, j): e.apply_unit(x, j, i) for i in range(m) for j in range(m)}
        for y, n in enumerate(e.cod.blocks):
            b = np.zeros((m * n, m * n), dtype=complex)
            for i in range(m):
                for j in range(m):
                    b[i * n:(i + 1) * n, j * n:(j + 1) * n] = outs[i, j].blocks[y]
            blocks.append(b)
    return AlgElement(shape, blocks)


def channel_from_jamiolkowski(j: AlgElement, dom: AlgebraShape) -> Channel:
    """Inverse of :func:`jamiolkowski`: E(Y) = tr_first((Y kron 1) J)."""
    if not j.shape.is_tensor or j.shape.factors[0].blocks != dom.blocks:
        raise ShapeMismatch("channel state does not live on dom (x) cod")
    cod = j.shape.factors[1]

    def f(a: AlgElement) -> AlgElement:
        out = []
        for y, n in enumerate(cod.blocks):
            acc = np.zeros((n, n), dtype=complex)
            for x, m in enumerate(dom.blocks):
                acc += linalg.partial_trace(np.kron(a.blocks[x], np.eye(n)) @ j.block(x, y), m, n, "left")
            out.append(acc)
        return AlgElement(cod, out)

    return Channel.from_function(dom, cod, f)


def kraus_channel_state(e: Channel) -> AlgElement:
    """Channel state of a dagger-preserving map between matrix algebras via the adjoint.

    Uses J = sum_kl E*(E_kl) kron E_lk with units of the codomain.
    """
    if len(e.dom) != 1 or len(e.cod) != 1:
        raise ShapeMismatch("only defined here for matrix algebras")
    adj = hs_adjoint(e)
    n = e.cod.blocks[0]
    acc = 0
    for k in range(n):
        for l in range(n):
            acc = acc + np.kron(adj.apply_unit(0, k, l).blocks[0], linalg.matrix_unit(l, k, n))
    return AlgElement(tensor_shape(e.dom, e.cod), [acc])


def choi(e: Channel) -> np.ndarray:
    """Choi matrix sum_ij E_ij kron E~(E_ij) of the map extended to full matrix algebras.

    E~(X) = bloc(E(compress(X))); compression is CP, so E is CP iff this is PSD.
    """
    big_n, big_m = e.dom.total_dim, e.cod.total_dim
    c = np.zeros((big_n * big_m, big_n * big_m), dtype=complex)
    starts = np.cumsum((0,) + e.dom.blocks[:-1])
    for x, m in enumerate(e.dom.blocks):
        s = starts[x]
        for i in range(m):
            for j in range(m):
                out = e.apply_unit(x, i, j).bloc()
                r, q = s + i, s + j
                c[r * big_m:(r + 1) * big_m, q * big_m:(q + 1) * big_m] = out
    return c


def is_cp(e: Channel) -> bool:
    return e.is_cp()


def is_tp(e: Channel) -> bool:
    return e.is_tp()


def is_dagger_preserving(e: Channel) -> bool:
    return e.is_dagger_preserving()


def _mat(obj) -> np.ndarray:
    if isinstance(obj, dict):
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        return re + 1j * im
    return np.asarray(obj, dtype=complex)


def channel_from_json(obj: dict) -> Channel:
    """Build a channel from its tagged JSON description."""
    from .mmalg import from_json as elem_from_json

    kind = obj.get("kind")
    if kind == "kraus":
        plus = [_mat(k) for k in obj["kraus"]]
        minus = [_mat(k) for k in obj.get("kraus_minus", [])]
        dom = AlgebraShape(tuple(obj.get("dom", [plus[0].shape[1]])))
        cod = AlgebraShape(tuple(obj.get("cod", [plus[0].shape[0]])))
        return from_kraus(dom, cod, plus, minus)
    if kind == "unitary":
        return from_unitary(_mat(obj["U"]))
    if kind == "ptrace":
        return ptrace_channel(int(obj["p"]), int(obj["n"]), obj.get("which", "left"))
    if kind == "povm":
        return povm_channel([_mat(e) for e in obj["effects"]])
    if kind == "pvm":
        return pvm_channel([_mat(e) for e in obj.get("projectors", obj.get("effects", []))])
    if kind == "preparation":
        return preparation_channel([_mat(s) for s in obj["states"]])
    if kind == "stochastic":
        return classical_channel(np.asarray(obj["matrix"], dtype=float))
    if kind == "discard_prepare":
        return discard_and_prepare(AlgebraShape(tuple(obj["dom"])), elem_from_json(obj["sigma"]))
    raise ParseError(f"unknown channel kind {kind!r}")

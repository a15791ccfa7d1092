"""Bayes maps: reverse channels that reproduce a state over time after the swap.

A reverse map F: B -> A is a Bayes map for (rho, E) with respect to psi when
psi(rho, E) = gamma(psi(E(rho), F)); it need not be completely positive.
Outside the support of sigma = E(rho) both constructions below send the
kernel projector's weight to rho, which keeps them trace preserving and
leaves the Bayes condition untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import (Channel, channel_from_jamiolkowski, classical_channel, compose,
                      from_kraus, hs_adjoint)
from .entropy import DEFAULT_BASE
from .errors import NotDaggerPreserving, NotTP, SolveFailed
from .measures import measures_of
from .mmalg import AlgElement, matrix_algebra, swap_gamma
from .sot import LS, SYM_BLOOM, Process, SotKind, sot_value

BAYES_TOL = 1e-8


@dataclass(frozen=True)
class BayesResult:
    reverse: Channel
    bayes_residual: float
    tp_ok: bool
    dagger_ok: bool
    cp_ok: bool
    kernel_completed: bool


def is_bayes_map(kind: SotKind, proc: Process, candidate: Channel) -> float:
    """Frobenius norm of psi(rho, E) - gamma(psi(sigma, candidate))."""
    if not candidate.is_dagger_preserving():
        raise NotDaggerPreserving("candidate does not commute with the adjoint")
    if not candidate.is_tp():
        raise NotTP("candidate is not trace preserving")
    forward = sot_value(kind, proc.rho, proc.channel)
    backward = sot_value(kind, proc.output, candidate)
    return (forward - swap_gamma(backward)).norm()


def _kernel(sigma: AlgElement) -> AlgElement:
    return sigma.map_blocks(linalg.kernel_projector)


def _result(kind: SotKind, proc: Process, reverse: Channel, completed: bool) -> BayesResult:
    res = is_bayes_map(kind, proc, reverse)
    return BayesResult(reverse, res, reverse.is_tp(), reverse.is_dagger_preserving(),
                       reverse.is_cp(), completed)


def petz_map(proc: Process) -> BayesResult:
    """B -> sqrt(rho) E*(sigma^-1/2 B sigma^-1/2) sqrt(rho) + tr(Q B) rho."""
    rho, sigma = proc.rho, proc.output
    sqrt_rho = rho.map_blocks(lambda b: linalg.psd_power(b, 0.5))
    inv_sqrt = sigma.map_blocks(linalg.psd_inverse_sqrt)
    q = _kernel(sigma)
    adj = hs_adjoint(proc.channel)

    def f(b: AlgElement) -> AlgElement:
        inner = adj.apply(inv_sqrt @ b @ inv_sqrt)
        return sqrt_rho @ inner @ sqrt_rho + (q @ b).trace() * rho

    reverse = Channel.from_function(proc.channel.cod, proc.channel.dom, f)
    return _result(LS, proc, reverse, q.norm() > 0)


def sym_bloom_bayes_map(proc: Process) -> BayesResult:
    """Solve the Jordan equation {sigma (x) 1, J} = 2 gamma(psi_S(rho, E)) for the reverse channel state.

    In the eigenbasis of sigma the equation is diagonal: the (k, l) component
    of J is the right-hand side divided by s_k + s_l.
    """
    rho, sigma = proc.rho, proc.output
    target = 2 * swap_gamma(sot_value(SYM_BLOOM, rho, proc.channel))
    dom_b, cod_a = proc.channel.cod, proc.channel.dom
    q = _kernel(sigma)
    blocks = []
    for y, sb in enumerate(sigma.blocks):
        eig = linalg.herm_eigen(sb)
        s, w = eig.eigenvalues, eig.eigenvectors
        for x, m in enumerate(cod_a.blocks):
            t = np.kron(w, np.eye(m))
            rhs = t.conj().T @ target.block(y, x) @ t
            denom = np.add.outer(np.repeat(s, m), np.repeat(s, m))
            sol = np.zeros_like(rhs)
            mask = denom > linalg.ZERO_TOL
            sol[mask] = rhs[mask] / denom[mask]
            blocks.append(t @ sol @ t.conj().T + np.kron(q.blocks[y], rho.blocks[x]))
    j = AlgElement(target.shape, blocks)
    reverse = channel_from_jamiolkowski(j, dom_b)
    result = _result(SYM_BLOOM, proc, reverse, q.norm() > 0)
    if result.bayes_residual >= BAYES_TOL:
        raise SolveFailed(f"Jordan solve residual {result.bayes_residual:.3e}")
    return result


def bayes_map(kind: SotKind, proc: Process) -> BayesResult:
    if kind == LS:
        return petz_map(proc)
    if kind == SYM_BLOOM:
        return sym_bloom_bayes_map(proc)
    raise ValueError(f"no Bayes map construction for {kind}")


def classical_bayes_inverse(p, f) -> np.ndarray:
    """Reverse stochastic matrix g[x, y] = p_x f[y, x] / q_y; columns with q_y = 0 are set to p."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    q = f @ p
    g = np.empty((len(p), len(q)))
    for y, qy in enumerate(q):
        g[:, y] = p * f[y] / qy if qy > linalg.ZERO_TOL else p
    return g


def classical_bayes_channel(p, f) -> Channel:
    return classical_channel(classical_bayes_inverse(p, f))


@dataclass(frozen=True)
class EntropicBayesRecord:
    lhs: float
    rhs: float
    residual: float
    bayes_residual: float


def entropic_bayes_check(kind: SotKind, proc: Process, base: float = DEFAULT_BASE,
                         reverse: Channel | None = None) -> EntropicBayesRecord:
    """Compare H(rho, E) + S(rho) with H(sigma, F) + S(sigma) for a Bayes map F."""
    if reverse is None:
        result = bayes_map(kind, proc)
        reverse, bres = result.reverse, result.bayes_residual
    else:
        bres = is_bayes_map(kind, proc, reverse)
    fwd = measures_of(kind, proc.rho, proc.channel, base)
    bwd = measures_of(kind, proc.output, reverse, base)
    lhs = fwd.h_psi + fwd.s_in
    rhs = bwd.h_psi + bwd.s_in
    return EntropicBayesRecord(lhs, rhs, abs(lhs - rhs), bres)


def disintegration_reverse(tau, u, n: int) -> Channel:
    """Ad_{U^dagger} after A -> tau (x) A, the reverse of tr_first after Ad_U."""
    tau = linalg.as_matrix(tau)
    u = linalg.as_matrix(u)
    p = tau.shape[0]
    prep = Channel.from_function(matrix_algebra(n), matrix_algebra(p * n),
                                 lambda a: AlgElement.from_matrix(np.kron(tau, a.blocks[0])))
    back = from_kraus(matrix_algebra(p * n), matrix_algebra(p * n), [u.conj().T])
    return compose(back, prep)

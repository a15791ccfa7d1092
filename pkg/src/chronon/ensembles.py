"""Seeded random matrices, states and channels.

All samplers take either an integer seed or a ``numpy.random.Generator``.
Batch experiments derive one generator per sample index with
:func:`sample_rng`, i.e. PCG64 seeded from ``SeedSequence(seed,
spawn_key=(index,))``; sample i is therefore the same no matter how the
batch is split across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import Channel
from .mmalg import AlgElement, matrix_algebra


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.PCG64(rng))


@dataclass(frozen=True)
class SampleSpec:
    m: int = 2
    d1: int = 1
    d2: int = 1
    d3: int = 2
    seed: int = 0
    count: int = 1000

    def __post_init__(self):
        if min(self.m, self.d1, self.d2, self.d3) < 1 or self.count < 0:
            raise ValueError("dimensions must be positive and count non-negative")


def ginibre(rows: int, cols: int, rng) -> np.ndarray:
    """Complex Gaussian matrix with independent real and imaginary parts of variance 1/2."""
    g = _gen(rng)
    return (g.standard_normal((rows, cols)) + 1j * g.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar unitary from the QR decomposition of a Ginibre matrix, with R's diagonal phases removed."""
    q, r = np.linalg.qr(ginibre(n, n, rng))
    d = np.diag(r)
    ph = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * ph


def haar_state(d: int, rng) -> np.ndarray:
    v = ginibre(d, 1, rng)[:, 0]
    return v / np.linalg.norm(v)


def random_density(m: int, d_env: int, rng) -> np.ndarray:
    """Reduced state of a Haar pure state on C^m (x) C^d_env."""
    v = haar_state(m * d_env, rng).reshape(m, d_env)
    rho = v @ v.conj().T
    return 0.5 * (rho + rho.conj().T)


def random_hermitian(n: int, rng, scale: float = 1.0) -> np.ndarray:
    g = ginibre(n, n, rng)
    return scale * (g + g.conj().T) / 2


def random_quasi_state(n: int, rng, scale: float = 1.0) -> np.ndarray:
    """Random hermitian matrix shifted to unit trace; usually has negative eigenvalues."""
    h = random_hermitian(n, rng, scale)
    return h + (1 - np.real(np.trace(h))) / n * np.eye(n)


def random_channel(m: int, d3: int, rng, d2: int = 1) -> Channel:
    """sigma -> tr_env(U (sigma (x) rho_env) U^dagger).

    rho_env is the reduced state on C^d3 of a Haar pure state on
    C^d3 (x) C^d2 and U is Haar on C^m (x) C^d3.
    """
    g = _gen(rng)
    rho_env = random_density(d3, d2, g)
    u = haar_unitary(m * d3, g)
    shape = matrix_algebra(m)

    def f(a: AlgElement) -> AlgElement:
        big = u @ np.kron(a.blocks[0], rho_env) @ u.conj().T
        return AlgElement(shape, [linalg.partial_trace(big, m, d3, "right")])

    return Channel.from_function(shape, shape, f)


def random_unital_channel(m: int, k: int, rng) -> Channel:
    """Mixture of k Haar unitary conjugations."""
    g = _gen(rng)
    w = g.dirichlet(np.ones(k))
    us = [haar_unitary(m, g) for _ in range(k)]
    shape = matrix_algebra(m)
    return Channel.from_function(shape, shape, lambda a: AlgElement(
        shape, [sum(wi * u @ a.blocks[0] @ u.conj().T for wi, u in zip(w, us))]))


def random_povm(n: int, k: int, rng) -> list[np.ndarray]:
    """k effects S^-1/2 A_y S^-1/2 from random positive A_y with sum S."""
    g = _gen(rng)
    parts = []
    for _ in range(k):
        x = ginibre(n, n, g)
        parts.append(x @ x.conj().T)
    s_inv = linalg.psd_inverse_sqrt(sum(parts))
    return [0.5 * ((s_inv @ a @ s_inv) + (s_inv @ a @ s_inv).conj().T) for a in parts]


def random_pvm(n: int, rng, ranks: list[int] | None = None) -> list[np.ndarray]:
    """Projectors onto consecutive groups of columns of a Haar unitary (rank one by default)."""
    u = haar_unitary(n, rng)
    ranks = ranks or [1] * n
    out, start = [], 0
    for r in ranks:
        v = u[:, start:start + r]
        out.append(v @ v.conj().T)
        start += r
    return out


def random_traceless_marginal_hermitian(n_a: int, n_b: int, scale: float, rng) -> np.ndarray:
    """Hermitian tau on C^n_a (x) C^n_b with tr_A tau = 0 and tr_B tau = 0.

    For (2, 2), in the product basis 00, 01, 10, 11 (0-indexed entries t_ij),
    the free parameters are drawn first, in this order:
    t_00 uniform in [-scale, scale], then t_01, t_02, t_03, t_12 uniform in the
    complex square of side 2 scale centred at 0.  The remaining upper
    entries then follow from the marginal constraints:
    t_11 = t_22 = -t_00, t_33 = t_00, t_13 = -t_02, t_23 = -t_01,
    and the lower triangle is the conjugate transpose.

    Other sizes project a random hermitian matrix:
    tau = H - tr_B(H) (x) 1/n_b - 1/n_a (x) tr_A(H) + tr(H) 1/(n_a n_b).
    """
    g = _gen(rng)
    if (n_a, n_b) == (2, 2):
        def cplx():
            return g.uniform(-scale, scale) + 1j * g.uniform(-scale, scale)

        t = np.zeros((4, 4), dtype=complex)
        t00 = g.uniform(-scale, scale)
        t01, t02, t03, t12 = cplx(), cplx(), cplx(), cplx()
        t[0, 0], t[0, 1], t[0, 2], t[0, 3], t[1, 2] = t00, t01, t02, t03, t12
        t[1, 1] = t[2, 2] = -t00
        t[3, 3] = t00
        t[1, 3] = -t02
        t[2, 3] = -t01
        upper = np.triu(t, 1)
        return np.diag(np.real(np.diag(t))).astype(complex) + upper + upper.conj().T
    h = random_hermitian(n_a * n_b, g, scale)
    h_a = linalg.partial_trace(h, n_a, n_b, "right")
    h_b = linalg.partial_trace(h, n_a, n_b, "left")
    return (h - np.kron(h_a, np.eye(n_b)) / n_b - np.kron(np.eye(n_a), h_b) / n_a
            + np.trace(h) * np.eye(n_a * n_b) / (n_a * n_b))

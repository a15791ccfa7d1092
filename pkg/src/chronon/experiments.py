"""Batch computations behind the CLI: scans, scatters and sampled theorem checks.

Each sample index gets its own generator, and results are always returned
in index order, so output is identical for any number of worker threads.
The worker count is os.cpu_count(), capped by the CHRONON_THREADS
environment variable.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .bayes import bayes_map, entropic_bayes_check
from .channel import bitflip, povm_channel
from .ensembles import (SampleSpec, haar_state, random_channel, random_density, random_povm,
                        random_pvm, random_traceless_marginal_hermitian, sample_rng)
from .entropy import DEFAULT_BASE, ext_entropy
from .measures import all_measures, disturbance_theorem_check, povm_closed_form
from .mmalg import AlgElement
from .sot import SYM_BLOOM, Process, SotKind, sym_p_bloom

VIOLATION_TOL = 1e-9


def thread_count() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("CHRONON_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def ordered_map(fn: Callable[[int], object], count: int) -> list:
    workers = thread_count()
    if workers <= 1 or count < 2:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(count)))


def scan_bitflip(grid_n: int, kind: SotKind = SYM_BLOOM, base: float = DEFAULT_BASE) -> list[tuple]:
    """Rows (r, lam, S, H, I, K) for rho_r = diag(r, 1 - r) under the bit flip E_lam."""
    if grid_n < 2:
        raise ValueError("grid must have at least two points")
    grid = np.linspace(0.0, 1.0, grid_n)

    def cell(idx: int):
        r, lam = grid[idx // grid_n], grid[idx % grid_n]
        rho = AlgElement.from_matrix(np.diag([r, 1 - r]))
        rep = all_measures(kind, Process(rho, bitflip(lam)), base)
        return (float(r), float(lam)) + rep.values()

    return ordered_map(cell, grid_n * grid_n)


@dataclass(frozen=True)
class ScatterResult:
    rows: list  # (index, s_joint, s_marginals)
    subadditivity_violations: int
    bound_violations: int
    bound: float | None


def scatter_quasi(n_a: int, n_b: int, count: int, seed: int, scale: float = 3.0,
                  d_env: int | None = None, base: float = DEFAULT_BASE) -> ScatterResult:
    """S(sigma) against S(A) + S(B) for sigma = rho + tau with traceless-marginal tau."""
    d_env = d_env or n_a * n_b

    def one(i: int):
        g = sample_rng(seed, i)
        rho = random_density(n_a * n_b, d_env, g)
        tau = random_traceless_marginal_hermitian(n_a, n_b, scale, g)
        sigma = rho + tau
        s_joint = ext_entropy(sigma, base)
        s_marg = (ext_entropy(linalg.partial_trace(rho, n_a, n_b, "right"), base)
                  + ext_entropy(linalg.partial_trace(rho, n_a, n_b, "left"), base))
        return (i, s_joint, s_marg)

    rows = ordered_map(one, count)
    viol = sum(1 for _, sj, sm in rows if sj > sm + VIOLATION_TOL)
    return ScatterResult(rows, viol, 0, None)


def scatter_sot(spec: SampleSpec, kind: SotKind = SYM_BLOOM, base: float = DEFAULT_BASE) -> ScatterResult:
    """S(psi) against S(rho) + S(E(rho)) over random processes, with violation counts of 0 <= I <= 2 log m."""
    bound = 2 * math.log(spec.m) / math.log(base)

    def one(i: int):
        g = sample_rng(spec.seed, i)
        rho = AlgElement.from_matrix(random_density(spec.m, spec.d1, g))
        e = random_channel(spec.m, spec.d3, g, d2=spec.d2)
        rep = all_measures(kind, Process(rho, e, validate=False), base)
        return (i, rep.s_psi, rep.s_in + rep.s_out)

    rows = ordered_map(one, spec.count)
    sub = sum(1 for _, sj, sm in rows if sm - sj < -VIOLATION_TOL)
    bnd = sum(1 for _, sj, sm in rows
              if sm - sj < -VIOLATION_TOL or sm - sj > bound + VIOLATION_TOL)
    return ScatterResult(rows, sub, bnd, bound)


def random_faithful_process(g: np.random.Generator, m: int) -> Process:
    rho = AlgElement.from_matrix(random_density(m, m + 1, g))
    return Process(rho, random_channel(m, 2, g, d2=1))


def bayes_rows(kind: SotKind, count: int, seed: int, base: float = DEFAULT_BASE) -> list[tuple]:
    """Rows (index, m, bayes_residual, entropic_residual, tp, dagger, cp) over random faithful processes."""
    def one(i: int):
        g = sample_rng(seed, i)
        m = 2 + i % 2
        proc = random_faithful_process(g, m)
        res = bayes_map(kind, proc)
        ent = entropic_bayes_check(kind, proc, base, reverse=res.reverse)
        return (i, m, res.bayes_residual, ent.residual, res.tp_ok, res.dagger_ok, res.cp_ok)

    return ordered_map(one, count)


def povm_rows(count: int, seed: int, base: float = DEFAULT_BASE) -> list[tuple]:
    """Sampled checks of the POVM closed form and of the disturbance theorem.

    Rows (index, n, p, closed_form_gap, clause, label, holds).  Each index
    uses a random mixed state with a random POVM for the closed form, and a
    pure state with a PVM for the theorem.  Disturbing cases use a Haar state;
    every third index instead takes a PVM eigenvector, which is non-disturbing.
    """
    def one(i: int):
        g = sample_rng(seed, i)
        n = 2 + i % 2
        p = float(g.uniform(0.05, 0.95)) if i % 2 else 1.0
        rho = random_density(n, n, g)
        effects = random_povm(n, 3, g)
        closed = povm_closed_form(p, rho, effects, base).report
        direct = all_measures(sym_p_bloom(p), Process(AlgElement.from_matrix(rho), povm_channel(effects)), base)
        gap = max(abs(a - b) for a, b in zip(closed.values(), direct.values()))
        pvm = random_pvm(n, g)
        if i % 3 == 0:
            v = np.linalg.eigh(pvm[0])[1][:, -1]
        else:
            v = haar_state(n, g)
        pure = np.outer(v, v.conj())
        chk = disturbance_theorem_check(p if i % 2 else 1.0, pure, pvm, base)
        return (i, n, p, gap, chk.clause, chk.label, chk.holds)

    return ordered_map(one, count)

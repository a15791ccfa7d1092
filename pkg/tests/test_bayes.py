import math

import numpy as np
import pytest

from chronon.bayes import (bayes_map, classical_bayes_channel, classical_bayes_inverse,
                           disintegration_reverse, entropic_bayes_check, is_bayes_map, petz_map,
                           sym_bloom_bayes_map)
from chronon.channel import (Channel, amplitude_damping, classical_channel, compose, from_unitary,
                             ptrace_channel)
from chronon.ensembles import haar_unitary, random_density
from chronon.errors import NotDaggerPreserving, NotTP
from chronon.experiments import random_faithful_process
from chronon.mmalg import AlgElement, matrix_algebra
from chronon.sot import COMPOUND, LS, SYM_BLOOM, Process, sym_p_bloom


def H(p):
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


@pytest.mark.parametrize("kind", [LS, SYM_BLOOM])
def test_random_faithful_processes(rng, kind):
    for i in range(20):
        proc = random_faithful_process(rng, 2 + i % 2)
        res = bayes_map(kind, proc)
        assert res.bayes_residual < 1e-8
        assert res.tp_ok and res.dagger_ok
        ent = entropic_bayes_check(kind, proc, reverse=res.reverse)
        assert ent.residual < 1e-8


def test_petz_is_cp_and_sym_bloom_need_not_be(rng):
    flags = []
    for _ in range(10):
        proc = random_faithful_process(rng, 2)
        assert petz_map(proc).cp_ok
        flags.append(sym_bloom_bayes_map(proc).cp_ok)
    assert not all(flags)


def test_classical_bayes_inverse_formula():
    p = np.array([0.25, 0.75])
    f = np.array([[0.9, 0.4], [0.1, 0.6]])
    g = classical_bayes_inverse(p, f)
    q = f @ p
    for x in range(2):
        for y in range(2):
            assert g[x, y] == pytest.approx(p[x] * f[y, x] / q[y], abs=1e-15)
    assert np.allclose(g.sum(axis=0), 1)


def test_classical_zero_outcome_column():
    g = classical_bayes_inverse([0.5, 0.5], [[1, 1], [0, 0]])
    assert np.allclose(g[:, 1], [0.5, 0.5])


@pytest.mark.parametrize("kind", [LS, SYM_BLOOM])
def test_classical_process_gives_classical_bayes(kind):
    p = np.array([0.2, 0.3, 0.5])
    f = np.array([[0.7, 0.1, 0.4], [0.3, 0.9, 0.6]])
    proc = Process(AlgElement.from_dist(p), classical_channel(f))
    res = bayes_map(kind, proc)
    expected = classical_bayes_channel(p, f)
    assert np.max(np.abs(res.reverse.superop - expected.superop)) < 1e-10
    assert is_bayes_map(kind, proc, expected) < 1e-12


def test_classical_entropic_bayes_rule():
    p = np.array([0.2, 0.3, 0.5])
    f = np.array([[0.7, 0.1, 0.4], [0.3, 0.9, 0.6]])
    joint = f * p[None, :]
    q = f @ p
    h_y_given_x = H(joint) - H(p)
    h_x_given_y = H(joint) - H(q)
    assert h_y_given_x + H(p) == pytest.approx(h_x_given_y + H(q), abs=1e-12)
    rec = entropic_bayes_check(SYM_BLOOM, Process(AlgElement.from_dist(p), classical_channel(f)))
    assert rec.lhs == pytest.approx(h_y_given_x + H(p), abs=1e-12)
    assert rec.rhs == pytest.approx(h_x_given_y + H(q), abs=1e-12)


@pytest.mark.parametrize("kind", [LS, SYM_BLOOM, COMPOUND, sym_p_bloom(0.3)])
def test_unitary_process_reversed_by_inverse(rng, kind):
    u = haar_unitary(3, rng)
    proc = Process(AlgElement.from_matrix(random_density(3, 3, rng)), from_unitary(u))
    assert is_bayes_map(kind, proc, from_unitary(u.conj().T)) < 1e-12


def test_unitary_entropic_both_sides(rng):
    u = haar_unitary(2, rng)
    rho = random_density(2, 2, rng)
    rec = entropic_bayes_check(LS, Process(AlgElement.from_matrix(rho), from_unitary(u)))
    s = -sum(w * math.log2(w) for w in np.linalg.eigvalsh(rho))
    assert rec.lhs == pytest.approx(s, abs=1e-9) and rec.rhs == pytest.approx(s, abs=1e-9)


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3)])
def test_disintegration_reverse(rng, p, n):
    tau = random_density(p, p, rng)
    sigma = random_density(n, n, rng)
    u = haar_unitary(p * n, rng)
    rho = AlgElement.from_matrix(u.conj().T @ np.kron(tau, sigma) @ u)
    proc = Process(rho, compose(ptrace_channel(p, n, "left"), from_unitary(u)))
    rev = disintegration_reverse(tau, u, n)
    assert rev.is_cptp()
    assert is_bayes_map(SYM_BLOOM, proc, rev) < 1e-8
    solved = sym_bloom_bayes_map(proc).reverse
    assert np.max(np.abs(solved.superop - rev.superop)) < 1e-8


def test_kernel_completion_keeps_tp():
    rho = AlgElement.from_matrix(np.diag([1.0, 0.0]))
    proc = Process(rho, amplitude_damping(0.5))
    for kind in (LS, SYM_BLOOM):
        res = bayes_map(kind, proc)
        assert res.kernel_completed and res.tp_ok and res.bayes_residual < 1e-8


def test_candidate_validation(rng):
    proc = random_faithful_process(rng, 2)
    bad_tp = Channel(matrix_algebra(2), matrix_algebra(2), 2 * np.eye(4))
    with pytest.raises(NotTP):
        is_bayes_map(LS, proc, bad_tp)
    nondagger = Channel.from_function(matrix_algebra(2), matrix_algebra(2),
                                      lambda a: AlgElement.from_matrix(a.blocks[0] + 1j * a.blocks[0][0, 1] * np.diag([1, -1])))
    with pytest.raises(NotDaggerPreserving):
        is_bayes_map(LS, proc, nondagger)


def test_unsupported_kind(rng):
    with pytest.raises(ValueError):
        bayes_map(COMPOUND, random_faithful_process(rng, 2))

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chronon import linalg
from chronon.channel import (bitflip, classical_channel, discard_and_prepare, from_unitary,
                             identity_channel, ptrace_channel, star_isomorphism)
from chronon.ensembles import haar_unitary, random_channel, random_density
from chronon.entropy import ext_entropy
from chronon.errors import InvalidState, NotCPTP, PreconditionViolated
from chronon.mmalg import AlgElement, AlgebraShape, mult_adjoint, ptrace_factor
from chronon.sot import (COMPOUND, LEFT, LS, RIGHT, SYM_BLOOM, Process, SotKind,
                         classical_reducibility_check, diagonal_p_bloom, p_bloom, pqr_kind, sot,
                         sot_value, structured_eigen_check, structured_matrix, sym_p_bloom,
                         unitary_process_mspec)
from conftest import epr, rand_herm, rand_state

PSI_R_EPR = np.array([
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, -1, 0],
    [0, -1, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
]) / 2

PSI_S_EPR = np.array([
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, -1, 0, 0, 0],
    [0, 1, 0, 0, -1, 0, 0, 0],
    [0, 0, 0, 2, 0, -1, -1, 0],
    [0, -1, -1, 0, 2, 0, 0, 0],
    [0, 0, 0, -1, 0, 0, 1, 0],
    [0, 0, 0, -1, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
]) / 4

ALL_KINDS = [RIGHT, LEFT, SYM_BLOOM, LS, COMPOUND, p_bloom(0.3), sym_p_bloom(0.2), pqr_kind(0.1, 0.7, 0.4)]


def epr_process():
    return Process(AlgElement.from_matrix(epr()), ptrace_channel(2, 2, "left"))


def test_parse_roundtrip():
    for text in ["sym-bloom", "ls", "right", "left", "compound", "p-bloom:0.25", "sym-p-bloom:0.75",
                 "pqr:0.1,0.2,0.3"]:
        assert str(SotKind.parse(text)) == text
    with pytest.raises(ValueError):
        SotKind.parse("p-bloom:1.5")
    with pytest.raises(ValueError):
        SotKind.parse("bloomy")


def test_hermitian_flags():
    assert SYM_BLOOM.is_hermitian and LS.is_hermitian and COMPOUND.is_hermitian
    assert not RIGHT.is_hermitian and not p_bloom(0.3).is_hermitian
    assert sym_p_bloom(0.3).is_hermitian


def test_process_validation():
    with pytest.raises(InvalidState):
        Process(AlgElement.from_matrix(np.diag([1.5, -0.5])), identity_channel(AlgebraShape((2,))))
    t = from_unitary(np.eye(2))
    bad = type(t)(t.dom, t.cod, 2 * t.superop)
    with pytest.raises(NotCPTP):
        Process(AlgElement.from_matrix(np.eye(2) / 2), bad)


def test_epr_right_bloom():
    assert np.allclose(sot_value(RIGHT, *_pair(epr_process())).blocks[0], PSI_R_EPR, atol=1e-15)
    assert np.allclose(sot_value(LEFT, *_pair(epr_process())).blocks[0], PSI_R_EPR.T, atol=1e-15)


def _pair(proc):
    return proc.rho, proc.channel


def test_epr_symmetric_bloom():
    psi = sot(SYM_BLOOM, epr_process())
    assert np.allclose(psi.value.blocks[0], PSI_S_EPR, atol=1e-15)
    assert psi.marginals_ok
    assert np.allclose(psi.value.spectrum(), [-0.25, -0.25, 0, 0, 0, 0, 0.75, 0.75], atol=1e-9)


@pytest.mark.parametrize("kind", [LS, COMPOUND])
def test_epr_ls_and_compound_are_product(kind):
    psi = sot_value(kind, *_pair(epr_process()))
    assert np.allclose(psi.blocks[0], np.kron(epr(), np.eye(2) / 2), atol=1e-12)


def test_classical_joint_distribution():
    p = np.array([0.3, 0.7])
    f = np.array([[0.9, 0.2], [0.1, 0.8]])
    proc = Process(AlgElement.from_dist(p), classical_channel(f))
    joint = np.array([p[x] * f[y, x] for x in range(2) for y in range(2)])
    for kind in ALL_KINDS:
        psi = sot_value(kind, *_pair(proc))
        assert np.allclose(np.concatenate([b.ravel() for b in psi.blocks]).real, joint, atol=1e-12)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_marginals_for_every_kind(rng, kind):
    for m, d3 in [(2, 2), (3, 2)]:
        proc = Process(rand_state(m, rng), random_channel(m, d3, rng))
        res = sot(kind, proc)
        assert res.marginals_ok
        assert abs(res.value.trace() - 1) < 1e-12
        if kind.is_hermitian:
            assert res.value.is_hermitian()


def test_marginals_on_block_algebra(rng):
    dom = AlgebraShape((2, 1))
    rho = AlgElement(dom, [0.6 * random_density(2, 2, rng), np.array([[0.4]])])
    e = star_isomorphism(dom, [haar_unitary(2, rng), np.eye(1)], [1, 0])
    for kind in ALL_KINDS:
        assert sot(kind, Process(rho, e)).marginals_ok


def test_kind_identities(rng):
    rho, e = rand_state(3, rng), random_channel(3, 2, rng)
    val = lambda k: sot_value(k, rho, e)
    assert val(SYM_BLOOM).max_abs_diff(val(sym_p_bloom(1))) < 1e-12
    assert val(SYM_BLOOM).max_abs_diff(val(sym_p_bloom(0))) < 1e-12
    assert val(LS).max_abs_diff(val(p_bloom(0.5))) < 1e-12
    assert val(LS).max_abs_diff(val(sym_p_bloom(0.5))) < 1e-12
    assert val(p_bloom(0.3)).dagger().max_abs_diff(val(p_bloom(0.7))) < 1e-12
    assert val(sym_p_bloom(0.3)).max_abs_diff(val(sym_p_bloom(0.7))) < 1e-12


def test_reducibility_classical_and_discard():
    proc = Process(AlgElement.from_dist([0.3, 0.7]), classical_channel([[0.9, 0.2], [0.1, 0.8]]))
    rep = classical_reducibility_check(None, proc)
    assert rep.commutes and rep.ok
    sigma = AlgElement.from_matrix(np.diag([0.2, 0.8]))
    rho = AlgElement.from_matrix(np.array([[0.5, 0.3], [0.3, 0.5]]))
    rep = classical_reducibility_check(None, Process(rho, discard_and_prepare(rho.shape, sigma)))
    assert rep.commutes and rep.ok


def test_reducibility_noncommuting(rng):
    rep = classical_reducibility_check(SYM_BLOOM, Process(rand_state(2, rng), random_channel(2, 2, rng)))
    assert not rep.commutes and rep.commutator_norm > 1e-3


def test_unitary_mspec_pure_qubit_symmetric():
    assert np.allclose(unitary_process_mspec(1, 0, 0.5, np.diag([1.0, 0.0])), [-0.5, 0, 0.5, 1])


def test_unitary_mspec_maximally_mixed():
    # eigenvalues (1/2, 1/2): a_ij = 1/2 for every pair
    assert np.allclose(unitary_process_mspec(0.3, 0.8, 0.4, np.eye(2) / 2), [-0.5, 0.5, 0.5, 0.5])


def test_unitary_mspec_matches_numeric_spectrum(rng):
    for _ in range(10):
        m = int(rng.integers(2, 4))
        p = float(rng.uniform())
        rho = random_density(m, m, rng)
        psi = sot_value(sym_p_bloom(p), AlgElement.from_matrix(rho), from_unitary(haar_unitary(m, rng)))
        assert np.allclose(psi.spectrum(), unitary_process_mspec(p, 1 - p, 0.5, rho), atol=1e-9)


def test_unitary_mspec_entropy_is_input_entropy(rng):
    for _ in range(20):
        m = int(rng.integers(2, 5))
        p, q, r = rng.uniform(size=3)
        rho = random_density(m, m, rng)
        assert abs(ext_entropy(np.diag(unitary_process_mspec(p, q, r, rho))) - ext_entropy(rho)) < 1e-9


def test_structured_eigen_example():
    res = structured_eigen_check([[1, 2], [3, 4]])
    assert res.ok
    assert np.allclose(np.sort(res.eigenvalues), np.sort([1, 4, np.sqrt(6), -np.sqrt(6)]))
    assert np.allclose(np.sort(np.linalg.eigvals(structured_matrix([[1, 2], [3, 4]])).real),
                       np.sort([1, 4, np.sqrt(6), -np.sqrt(6)]))


def test_structured_eigen_zero_and_diagonal():
    res = structured_eigen_check([[1, 0], [0, 2]])
    assert res.ok and np.allclose(np.sort(res.eigenvalues), [0, 0, 1, 2])
    with pytest.raises(PreconditionViolated):
        structured_eigen_check([[1, 1], [0, 1]])


def test_structured_eigen_random(rng):
    for m in (2, 3, 4):
        a = rng.uniform(0.1, 2, size=(m, m))
        assert structured_eigen_check(a).max_residual < 1e-10


def test_diagonal_p_bloom_formula(rng):
    for _ in range(5):
        s = rng.dirichlet(np.ones(3))
        p = float(rng.uniform())
        psi = sot_value(p_bloom(p), AlgElement.from_matrix(np.diag(s)), identity_channel(AlgebraShape((3,))))
        assert np.max(np.abs(psi.blocks[0] - diagonal_p_bloom(s, p))) < 1e-10


def test_right_bloom_of_identity_is_mult_adjoint(rng):
    sigma = random_density(3, 3, rng)
    psi = sot_value(RIGHT, AlgElement.from_matrix(sigma), identity_channel(AlgebraShape((3,))))
    assert np.max(np.abs(psi.blocks[0] - mult_adjoint(sigma))) < 1e-12


def test_pure_qubit_identity_spectrum(rng):
    v = np.array([1, 1j]) / np.sqrt(2)
    psi = sot_value(SYM_BLOOM, AlgElement.from_matrix(np.outer(v, v.conj())), identity_channel(AlgebraShape((2,))))
    assert np.allclose(psi.spectrum(), [-0.5, 0, 0.5, 1], atol=1e-12)


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (3, 2)])
def test_right_bloom_of_partial_trace(rng, p, n):
    tau, sigma = rand_herm(p, rng), random_density(n, n, rng)
    rho = AlgElement.from_matrix(np.kron(tau, sigma))
    e = ptrace_channel(p, n, "left")
    right = sot_value(RIGHT, rho, e).blocks[0]
    assert np.max(np.abs(right - np.kron(tau, mult_adjoint(sigma)))) < 1e-10
    sym = sot_value(SYM_BLOOM, rho, e).blocks[0]
    psi_id = sot_value(SYM_BLOOM, AlgElement.from_matrix(sigma), identity_channel(AlgebraShape((n,)))).blocks[0]
    assert np.max(np.abs(sym - np.kron(tau, psi_id))) < 1e-10


def test_unitary_naturality(rng):
    for p in (0.0, 0.3, 0.5, 1.0):
        w = rng.dirichlet(np.ones(3))
        v = haar_unitary(3, rng)
        u = haar_unitary(3, rng)
        rho = v @ np.diag(w) @ v.conj().T
        lhs = sot_value(p_bloom(p), AlgElement.from_matrix(rho), from_unitary(u)).blocks[0]
        base = sot_value(p_bloom(p), AlgElement.from_matrix(np.diag(w)), identity_channel(AlgebraShape((3,)))).blocks[0]
        big = np.kron(v, u @ v)
        assert np.max(np.abs(lhs - big @ base @ big.conj().T)) < 1e-10


def test_star_isomorphism_entropy_invariance(rng):
    dom = AlgebraShape((2, 3))
    e = star_isomorphism(dom, [haar_unitary(2, rng), haar_unitary(3, rng)], [1, 0])
    rho = AlgElement(dom, [0.4 * random_density(2, 2, rng), 0.6 * random_density(3, 3, rng)])
    for _ in range(5):
        p, q, r = rng.uniform(size=3)
        kind = sym_p_bloom(p) if r < 0.5 else pqr_kind(p, 1 - p, 0.5)
        assert abs(ext_entropy(sot_value(kind, rho, e)) - ext_entropy(rho)) < 1e-9


def test_compound_handles_degenerate_spectrum(rng):
    rho = AlgElement.from_matrix(np.diag([0.25, 0.25, 0.5]))
    res = sot(COMPOUND, Process(rho, random_channel(3, 2, rng)))
    assert res.marginals_ok and res.value.is_state()


def test_linear_kinds_accept_quasi_states(rng):
    q = AlgElement.from_matrix(np.diag([1.5, -0.5]))
    psi = sot_value(SYM_BLOOM, q, bitflip(0.3))
    assert abs(ptrace_factor(psi, "right").max_abs_diff(q)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_p_bloom_dagger_relation(p, seed):
    g = np.random.default_rng(seed)
    rho, e = rand_state(2, g), random_channel(2, 2, g)
    a = sot_value(p_bloom(p), rho, e)
    b = sot_value(p_bloom(1 - p), rho, e)
    assert a.dagger().max_abs_diff(b) < 1e-10

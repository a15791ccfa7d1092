import json

import numpy as np
import pytest

from chronon import linalg
from chronon.channel import (Channel, amplitude_damping, bitflip, channel_from_jamiolkowski,
                             channel_from_json, choi, classical_channel, compose, discard_and_prepare,
                             from_kraus, from_unitary, hs_adjoint, identity_channel, instrument_channel,
                             jamiolkowski, kraus_channel_state, povm_channel, preparation_channel,
                             ptrace_channel, pvm_channel, star_isomorphism)
from chronon.ensembles import haar_unitary, random_channel, random_povm
from chronon.errors import InvalidEffects, ParseError, InvalidState, NotStochastic, ShapeMismatch
from chronon.mmalg import AlgElement, AlgebraShape, classical_algebra, matrix_algebra, swap_matrix
from conftest import rand_herm

R2 = np.sqrt(2)


def rand_elem(shape, rng, herm=False):
    if herm:
        return AlgElement(shape, [rand_herm(m, rng) for m in shape.blocks])
    return AlgElement(shape, [rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
                              for m in shape.blocks])


def hs(a, b):
    return sum(np.trace(x.conj().T @ y) for x, y in zip(a.blocks, b.blocks))


def test_identity_channel():
    e = identity_channel(AlgebraShape((2, 1)))
    assert np.array_equal(e.superop, np.eye(5))
    assert e.is_cptp()


def test_superop_shape_checked():
    with pytest.raises(ShapeMismatch):
        Channel(matrix_algebra(2), matrix_algebra(2), np.eye(3))


def test_linearity(rng):
    e = random_channel(3, 2, rng)
    a, b = rand_elem(e.dom, rng), rand_elem(e.dom, rng)
    lhs = e(a * 0.3 + b * (-1.7j))
    rhs = e(a) * 0.3 + e(b) * (-1.7j)
    assert lhs.max_abs_diff(rhs) < 1e-9


def test_bitflip_on_diagonal():
    r, lam = 0.2, 0.7
    out = bitflip(lam)(AlgElement.from_matrix(np.diag([r, 1 - r])))
    expected = np.diag([lam * r + (1 - lam) * (1 - r), lam * (1 - r) + (1 - lam) * r])
    assert np.allclose(out.blocks[0], expected, atol=1e-15)


def test_amplitude_damping_outputs():
    e = amplitude_damping(0.5)
    rho2 = AlgElement.from_matrix(0.5 * np.array([[1, -1], [-1, 1]]))
    # hand expansion of the two Kraus terms at p = 1/2
    assert np.allclose(e(rho2).blocks[0], np.array([[3, -R2], [-R2, 1]]) / 4, atol=1e-15)
    assert np.allclose(e(AlgElement.from_matrix(np.eye(2) / 2)).blocks[0], np.diag([0.75, 0.25]), atol=1e-15)
    assert e.is_cptp()


def test_compose_matches_sequential(rng):
    e1, e2 = random_channel(2, 2, rng), random_channel(2, 3, rng)
    a = rand_elem(e1.dom, rng)
    assert compose(e2, e1)(a).max_abs_diff(e2(e1(a))) < 1e-12
    assert (e2 @ e1)(a).max_abs_diff(e2(e1(a))) < 1e-12


def test_adjoint_of_unitary(rng):
    u = haar_unitary(3, rng)
    assert np.allclose(hs_adjoint(from_unitary(u)).superop, from_unitary(u.conj().T).superop, atol=1e-12)


def test_adjoint_defining_identity(rng):
    shape_a, shape_b = AlgebraShape((2, 1)), AlgebraShape((1, 3))
    e = Channel(shape_a, shape_b, rng.standard_normal((shape_b.vec_dim, shape_a.vec_dim)))
    adj = hs_adjoint(e)
    for _ in range(5):
        a, b = rand_elem(shape_a, rng), rand_elem(shape_b, rng)
        assert abs(hs(b, e(a)) - hs(adj(b), a)) < 1e-10
    assert np.array_equal(hs_adjoint(adj).superop, e.superop)


@pytest.mark.parametrize("m,n", [(2, 3), (3, 2), (2, 2)])
def test_swap_lemma(rng, m, n):
    b = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    c = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    lhs = sum(np.kron(linalg.matrix_unit(i, j, m), c @ linalg.matrix_unit(j, i, m) @ b)
              for i in range(m) for j in range(m))
    rhs = sum(np.kron(b @ linalg.matrix_unit(p, q, n) @ c, linalg.matrix_unit(q, p, n))
              for p in range(n) for q in range(n))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_adjoint_of_partial_trace_on_units():
    adj = hs_adjoint(ptrace_channel(2, 3, "left"))
    for i in range(3):
        for j in range(3):
            out = adj.apply_unit(0, i, j).blocks[0]
            assert np.allclose(out, np.kron(np.eye(2), linalg.matrix_unit(i, j, 3)))


def test_single_kraus_is_unitary_conjugation(rng):
    u = haar_unitary(2, rng)
    assert np.allclose(from_kraus(matrix_algebra(2), matrix_algebra(2), [u]).superop, from_unitary(u).superop)


def test_tp_criterion_matches_kraus_sum(rng):
    v = [rng.standard_normal((2, 2)) for _ in range(2)]
    w = [0.3 * rng.standard_normal((2, 2))]
    e = from_kraus(matrix_algebra(2), matrix_algebra(2), v, w)
    gram = sum(x.conj().T @ x for x in v) - sum(x.conj().T @ x for x in w)
    assert e.is_tp() == bool(np.max(np.abs(gram - np.eye(2))) <= 1e-9)
    assert not e.is_tp()
    # normalize so that the signed Gram sum is the identity
    g = linalg.psd_inverse_sqrt(sum(x.conj().T @ x for x in v))
    v2 = [x @ g for x in v]
    assert from_kraus(matrix_algebra(2), matrix_algebra(2), v2).is_tp()


def test_pvm_on_maximally_mixed():
    e = pvm_channel([np.diag([1, 0]), np.diag([0, 1])])
    assert np.allclose(e(AlgElement.from_matrix(np.eye(2) / 2)).to_dist(), [0.5, 0.5])


def test_povm_validation():
    with pytest.raises(InvalidEffects):
        povm_channel([np.diag([1, 0]), np.diag([0, 0.5])])
    with pytest.raises(InvalidEffects):
        pvm_channel([np.eye(2) / 2, np.eye(2) / 2])
    with pytest.raises(InvalidEffects):
        povm_channel([np.array([[1.5, 0], [0, 0]]), np.array([[-0.5, 0], [0, 1]])])


def test_povm_channel_is_cptp(rng):
    e = povm_channel(random_povm(3, 4, rng))
    assert e.is_cptp()
    assert np.min(np.linalg.eigvalsh(choi(e))) > -1e-10


def test_classical_channel_on_point_mass():
    f = np.array([[0.2, 0.5], [0.8, 0.5]])
    e = classical_channel(f)
    assert np.allclose(e(AlgElement.from_dist([1, 0])).to_dist(), f[:, 0])
    with pytest.raises(NotStochastic):
        classical_channel([[0.5, 1.0], [0.6, 0.0]])


def test_preparation_channel_validation():
    with pytest.raises(InvalidState):
        preparation_channel([np.diag([1.5, -0.5])])
    e = preparation_channel([np.diag([1, 0]), np.eye(2) / 2])
    assert np.allclose(e(AlgElement.from_dist([0.5, 0.5])).blocks[0], np.diag([0.75, 0.25]))


def test_star_isomorphism_is_cptp(rng):
    dom = AlgebraShape((2, 3))
    e = star_isomorphism(dom, [haar_unitary(2, rng), haar_unitary(3, rng)], [1, 0])
    assert e.cod.blocks == (3, 2) and e.is_cptp()


def test_instrument():
    k0, k1 = np.diag([1, 0]), np.diag([0, 1])
    e = instrument_channel([[k0], [k1]])
    assert e.cod.blocks == (2, 2) and e.is_cptp()


def test_jamiolkowski_of_identity_is_swap():
    j = jamiolkowski(identity_channel(matrix_algebra(2)))
    assert np.array_equal(j.blocks[0], swap_matrix(2, 2))


def test_jamiolkowski_of_discard_prepare(rng):
    sigma = AlgElement.from_matrix(np.diag([0.3, 0.7]))
    j = jamiolkowski(discard_and_prepare(matrix_algebra(3), sigma))
    assert np.allclose(j.blocks[0], np.kron(np.eye(3), sigma.blocks[0]))


def test_jamiolkowski_two_formulas_agree(rng):
    for _ in range(5):
        e = random_channel(2, 3, rng)
        assert jamiolkowski(e).max_abs_diff(kraus_channel_state(e)) < 1e-12


def test_jamiolkowski_marginal_reproduces_output(rng):
    e = random_channel(3, 2, rng)
    j = jamiolkowski(e)
    for x, i, k in e.dom.matrix_units():
        a = AlgElement.unit(e.dom, x, i, k)
        out = linalg.partial_trace(np.kron(a.blocks[0], np.eye(3)) @ j.blocks[0], 3, 3, "left")
        assert np.allclose(out, e(a).blocks[0], atol=1e-12)


@pytest.mark.parametrize("make", [
    lambda g: from_unitary(haar_unitary(2, g)),
    lambda g: random_channel(2, 3, g),
    lambda g: bitflip(0.3),
    lambda g: Channel(AlgebraShape((2, 1)), AlgebraShape((1, 2)), g.standard_normal((5, 5))),
])
def test_jamiolkowski_roundtrip(rng, make):
    e = make(rng)
    back = channel_from_jamiolkowski(jamiolkowski(e), e.dom)
    assert np.max(np.abs(back.superop - e.superop)) < 1e-12


def test_choi_is_partial_transpose_of_jamiolkowski(rng):
    e = random_channel(2, 2, rng)
    j = jamiolkowski(e).blocks[0].reshape(2, 2, 2, 2)
    assert np.allclose(choi(e), j.transpose(2, 1, 0, 3).reshape(4, 4), atol=1e-12)


def test_choi_of_identity():
    c = choi(identity_channel(matrix_algebra(2)))
    v = np.array([1, 0, 0, 1])
    assert np.array_equal(c, np.outer(v, v))


def test_flags_on_counterexample(rng):
    sigma = np.diag([0.4, 0.6])
    pert = np.array([[0, 1], [1, 0]])

    def f(a):
        return AlgElement.from_matrix(a.trace() * sigma + a.blocks[0][0, 1] * pert)

    e = Channel.from_function(matrix_algebra(2), matrix_algebra(2), f)
    assert not e.is_dagger_preserving()
    shifted = Channel.from_function(matrix_algebra(2), matrix_algebra(2),
                                    lambda a: AlgElement.from_matrix(a.trace() * sigma + a.blocks[0][0, 0] * np.eye(2)))
    assert not shifted.is_tp() and shifted.is_dagger_preserving()


def test_transpose_is_positive_but_not_cp():
    t = Channel.from_function(matrix_algebra(2), matrix_algebra(2),
                              lambda a: AlgElement.from_matrix(a.blocks[0].T))
    assert t.is_tp() and t.is_dagger_preserving() and not t.is_cp()


def test_random_channels_cptp(rng):
    for _ in range(20):
        assert random_channel(2, 2, rng, d2=2).is_cptp()


def _m(a):
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def test_channel_json_kinds():
    damp = channel_from_json(json.loads(json.dumps({
        "kind": "kraus",
        "kraus": [_m([[1, 0], [0, np.sqrt(0.5)]]), _m([[0, np.sqrt(0.5)], [0, 0]])]})))
    assert np.allclose(damp.superop, amplitude_damping(0.5).superop)
    assert channel_from_json({"kind": "ptrace", "p": 2, "n": 2, "which": "left"}).cod.blocks == (2,)
    pvm = channel_from_json({"kind": "pvm", "effects": [_m(np.diag([1, 0])), _m(np.diag([0, 1]))]})
    assert pvm.cod == classical_algebra(2)
    st = channel_from_json({"kind": "stochastic", "matrix": [[1, 0.5], [0, 0.5]]})
    assert st.dom == classical_algebra(2)
    with pytest.raises(ParseError):
        channel_from_json({"kind": "nope"})

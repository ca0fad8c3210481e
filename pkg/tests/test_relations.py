import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamext import (
    ContainmentError,
    DimensionError,
    LinearRelation,
    adjoint,
    arens_decompose,
    bracket,
    classify_pair,
    deficiency_index,
    quotient_dim,
    span_relation,
)
from hamext.relations import complement, contains, intersect, orth, same


def graph(M):
    r = M.shape[0]
    return span_relation(np.vstack([np.eye(r), M]))


def random_relation(rng, r, k):
    M = rng.standard_normal((2 * r, k)) + 1j * rng.standard_normal((2 * r, k))
    return span_relation(M)


def hermitian(rng, r):
    X = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    return X + X.conj().T


def test_span_basics():
    z = span_relation([], r=3)
    assert z.dim == 0 and z.r == 3
    with pytest.raises(DimensionError):
        span_relation([])
    x, f = np.array([1, 0]), np.array([0, 1j])
    assert span_relation([(x, f), (x, f), (2 * x, 2 * f)]).dim == 1
    with pytest.raises(DimensionError):
        span_relation([(x, np.ones(3))])
    M = np.random.default_rng(0).standard_normal((4, 4))
    G = graph(M)
    assert G.dim == 4
    # idempotent on orthonormal input
    assert span_relation(G.basis).equals(G)
    np.testing.assert_allclose(G.basis.conj().T @ G.basis, np.eye(4), atol=1e-12)


def test_adjoint_examples():
    rng = np.random.default_rng(1)
    H = hermitian(rng, 3)
    assert adjoint(graph(H)).equals(graph(H))
    T = span_relation(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    Ts = adjoint(T)
    assert Ts.equals(T)
    # graph of M has adjoint graph of M*
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert adjoint(graph(M)).equals(graph(M.conj().T))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5), st.data())
def test_adjoint_involution_and_bracket(seed, r, data):
    rng = np.random.default_rng(seed)
    k = data.draw(st.integers(0, 2 * r))
    T = random_relation(rng, r, k)
    Ts = adjoint(T)
    assert Ts.dim == 2 * r - T.dim
    assert adjoint(Ts).equals(T)
    if T.dim and Ts.dim:
        assert np.abs(bracket(T.basis, Ts.basis)).max() <= 1e-12
    # N(T*) = (Ran T)^⊥
    assert same(Ts.kernel(), complement(T.range(), r))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5), st.data())
def test_arens(seed, r, data):
    rng = np.random.default_rng(seed)
    # force a nontrivial multivalued part with some (0, g) columns
    k = data.draw(st.integers(1, 2 * r))
    m = data.draw(st.integers(0, min(k, r)))
    cols = [np.concatenate([np.zeros(r), rng.standard_normal(r)]) for _ in range(m)]
    cols += [rng.standard_normal(2 * r) + 1j * rng.standard_normal(2 * r) for _ in range(k - m)]
    T = span_relation(np.array(cols).T)
    Ts_, Ti = arens_decompose(T)
    assert T.dim == Ts_.dim + Ti.dim
    if Ts_.dim and Ti.dim:
        assert np.abs(Ts_.basis.conj().T @ Ti.basis).max() <= 1e-12
    assert np.abs(Ti.X).max(initial=0) <= 1e-12
    assert same(Ti.range(), T.multivalued_part())
    assert same(Ts_.domain(), T.domain())
    assert intersect(Ts_.basis, Ti.basis).shape[1] == 0


def test_arens_examples():
    r = 3
    G = graph(np.random.default_rng(2).standard_normal((r, r)))
    s, i = arens_decompose(G)
    assert s.equals(G) and i.dim == 0
    T = span_relation(np.vstack([np.zeros((r, r)), np.eye(r)]))
    s, i = arens_decompose(T)
    assert s.dim == 0 and i.equals(T)


def test_deficiency_examples():
    I2 = graph(np.eye(2))
    assert deficiency_index(I2, 0) == 0
    assert deficiency_index(I2, 1) == 2
    zero = span_relation([], r=4)
    assert all(deficiency_index(zero, lam) == 4 for lam in (0, 1j, -2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        # Hermitian (symmetric) relation: restriction of a Hermitian graph
        H = hermitian(rng, 4)
        D = rng.standard_normal((4, 2))
        T = span_relation(np.vstack([D, H @ D]))
        assert deficiency_index(T, 1j) == deficiency_index(T, 2j) == 2
        assert deficiency_index(T, -1j) == deficiency_index(T, -3j)


def test_quotient_dim():
    e1 = np.array([[1.0], [0.0]])
    assert quotient_dim(e1, np.eye(2)) == 1
    assert quotient_dim(e1, e1) == 0
    with pytest.raises(ContainmentError) as exc:
        quotient_dim(np.array([[0.0], [1.0]]), e1)
    assert exc.value.max_angle == pytest.approx(np.pi / 2)
    rng = np.random.default_rng(4)
    A = orth(rng.standard_normal((6, 2)))
    B = orth(np.hstack([A, rng.standard_normal((6, 3))]))
    assert quotient_dim(A, B) == 3


def test_classify_hermitian_graph():
    H = hermitian(np.random.default_rng(5), 3)
    T = graph(H)
    rep = classify_pair(T, T, K=T)
    assert rep.dual_pair and rep.T_self_adjoint and rep.hypotheses_hold
    assert rep.quasi_self_adjoint and rep.K_self_adjoint
    assert set(rep.dims.values()) == {0}
    assert rep.identities_hold and rep.closure_characterization


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5))
def test_classify_symmetric_restriction(seed, r):
    rng = np.random.default_rng(seed)
    H = hermitian(rng, r)
    k = int(rng.integers(1, r))
    D = orth(rng.standard_normal((r, k)) + 1j * rng.standard_normal((r, k)))
    T = span_relation(np.vstack([D, H @ D]))
    rep = classify_pair(T, T, K=graph(H))
    assert rep.dual_pair and rep.T_hermitian and not rep.T_self_adjoint
    # D(T*) is everything, T*(0) = D^⊥
    assert rep.dims["D(T*)/D(S)"] == rep.dims["D(S*)/D(T)"] == r - k
    assert rep.dims["D(K)/D(T)"] == rep.dims["D(K*)/D(S)"] == r - k
    assert rep.quasi_self_adjoint and rep.K_self_adjoint
    # H does not map D into D, so the operator parts disagree
    assert rep.hypotheses["operator_part_membership"]
    assert not rep.hypotheses["operator_part_strict"]
    assert not rep.hypotheses_hold and rep.identities == {}
    assert rep.closure_characterization


def test_membership_reading_is_too_weak():
    rng = np.random.default_rng(0)
    H = hermitian(rng, 2)
    D = orth(rng.standard_normal((2, 1)))
    T = span_relation(np.vstack([D, H @ D]))
    rep = classify_pair(T, T, K=graph(H), operator_part="membership")
    assert rep.hypotheses_hold
    # additivity would need 1 == 1 + 1
    assert rep.identities["symmetric_defect"] and not rep.identities["additivity"]
    with pytest.raises(ValueError):
        classify_pair(T, T, operator_part="loose")


def test_invariant_subspace_breaks_intersection_hypothesis():
    # if H maps D into D the parts agree, but D^⊥ then lies in N(T*) ∩ T*(0)
    H = np.diag([1.0, 2.0, 3.0]).astype(complex)
    D = np.eye(3)[:, :1]
    T = span_relation(np.vstack([D, H @ D]))
    rep = classify_pair(T, T)
    assert rep.hypotheses["operator_part_strict"]
    assert not rep.hypotheses["S_star_0_meets_N_T_star"]
    assert not rep.hypotheses_hold


def test_classify_rejects_mismatch():
    with pytest.raises(DimensionError):
        classify_pair(span_relation([], r=2), span_relation([], r=3))


def test_relation_helpers():
    rng = np.random.default_rng(6)
    T = random_relation(rng, 3, 3)
    inv = T.inverse()
    assert inv.inverse().equals(T)
    sh = T.shifted(2.0)
    assert sh.shifted(-2.0).equals(T)
    assert T <= T and T.contains_pairs(T.basis[:, :1])
    assert contains(np.eye(4), rng.standard_normal((4, 2)))

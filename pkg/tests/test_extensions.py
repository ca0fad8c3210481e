import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamext import (
    BoundarySubspace,
    CoefficientField,
    IntegerInterval,
    MembershipError,
    Side,
    adjoint,
    boundary_extension,
    boundary_form,
    build_doubled,
    build_maximal,
    build_minimal,
    build_relation_set,
    build_space,
    correspondence_check,
    limit_point_emulation,
    patch_bvp,
    project_class,
    q_star,
    random_field,
    solve_forced_ivp,
    symplectic_unit,
    verify_qstar_adjoint,
)
from hamext.extensions import (
    boundary_adjoint,
    boundary_family,
    representative_domain,
    sample_boundary_subspaces,
)
from hamext.relations import classify_pair, contains, intersect, orth, quotient_dim, same

from helpers import cvec, instance, relation_sets


# -- boundary subspaces -------------------------------------------------------
def test_q_star_frozen():
    assert q_star(BoundarySubspace.zero(2)).equals(BoundarySubspace.full(2))
    assert q_star(BoundarySubspace.span([1, 0])).equals(BoundarySubspace.span([1, 0]))
    assert q_star(BoundarySubspace.span([1, 1j])).equals(BoundarySubspace.span([1, -1j]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.data())
def test_q_star_involution(seed, n, data):
    rng = np.random.default_rng(seed)
    k = data.draw(st.integers(0, 2 * n))
    Q = sample_boundary_subspaces(2 * n, rng, per_dim=1, dims=[k])[-1]
    Qs = q_star(Q)
    assert Qs.dim == 2 * n - k
    assert q_star(Qs).equals(Q)
    # Q* is exactly the set of z with z* J q = 0 for q in Q
    J = symplectic_unit(n)
    if k and Qs.dim:
        assert np.abs(Qs.basis.conj().T @ J @ Q.basis).max() <= 1e-12


def test_boundary_adjoint_of_lagrangian_is_itself():
    # separated Dirichlet conditions u(a) = 0, u(b+1) = 0 are Lagrangian for diag(-J, J)
    eye = np.eye(4)
    Qc = BoundarySubspace(eye[:, [1, 3]])
    assert boundary_adjoint(Qc).equals(Qc)


def test_samplers_are_reproducible():
    a = boundary_family(4, 50, np.random.default_rng(3))
    b = boundary_family(4, 50, np.random.default_rng(3))
    assert len(a) == 50 and all(x.equals(y) for x, y in zip(a, b))
    assert [q.dim for q in a[:5]] == [0, 1, 2, 3, 4]
    s = sample_boundary_subspaces(2, np.random.default_rng(0), per_dim=3)
    assert [q.dim for q in s] == [0, 1, 1, 1, 1, 1, 2]


# -- maximal and minimal relations ---------------------------------------------
def test_zero_weight_gives_empty_relation():
    z = np.zeros((1, 1))
    f = CoefficientField(1, IntegerInterval(0, 3), z, z, z, z, z, z)
    H = build_maximal(Side.ONE, f)
    assert H.r == 0 and H.dim == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_maximal_relation_structure(seed):
    f, rng = instance(seed, 4, 8)
    for side in Side:
        rs = build_relation_set(side, f)
        assert rs.well_defined
        # homogeneous solutions give (class, 0)
        sol = solve_forced_ivp(side, f, 0.0, None, f.interval.a, cvec(rng, 2 * f.n))
        p = project_class(rs.space, sol)
        assert rs.membership(np.concatenate([p, np.zeros_like(p)])) <= 1e-8
        # construction independence
        other = build_relation_set(side, f, rs.space, c0=f.interval.b + 1)
        assert rs.H.equals(other.H)
        # minimal relation, two routes, and codimension
        assert rs.H0.equals(rs.H00)
        assert contains(rs.H.basis, rs.H0.basis)
        assert rs.H.dim - rs.H0.dim <= 4 * f.n


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_duality(seed):
    f, _ = instance(seed, 4, 8)
    s1, s2 = relation_sets(f)
    assert adjoint(s1.H0).equals(s2.H)
    assert adjoint(s2.H0).equals(s1.H)


def test_build_minimal_methods():
    f, _ = instance(0, 6, 6)
    a = build_minimal(Side.ONE, f, method="boundary")
    b = build_minimal(Side.ONE, f, method="support")
    assert a.equals(b)
    with pytest.raises(ValueError):
        build_minimal(Side.ONE, f, method="other")


def test_representative_round_trip():
    f, rng = instance(8, 6, 6)
    rs = build_relation_set(Side.ONE, f)
    m = f.interval.n_points
    g = cvec(rng, (m, 2 * f.n))
    y = solve_forced_ivp(Side.ONE, f, 0.0, g, f.interval.a, cvec(rng, 2 * f.n))
    p, q = project_class(rs.space, y), project_class(rs.space, g)
    back = rs.representative(p, q).values
    assert np.abs(back - y.values).max() <= 1e-9 * (1 + np.abs(y.values).max())
    # a different lift of q: perturb g inside the kernel of the semi-norm
    K = np.linalg.svd(rs.space.gram)[2][rs.space.rank:].conj().T
    g2 = g.reshape(-1) + K @ cvec(rng, K.shape[1])
    y2 = solve_forced_ivp(Side.ONE, f, 0.0, g2.reshape(m, -1), f.interval.a, y(f.interval.a))
    np.testing.assert_allclose(project_class(rs.space, y2), p, atol=1e-9 * (1 + np.abs(p).max()))
    zero = rs.representative(np.zeros(rs.r), np.zeros(rs.r)).values
    assert np.abs(zero).max() == 0
    with pytest.raises(MembershipError):
        rs.representative(np.zeros(rs.r), cvec(rng, rs.r))


# -- boundary form ---------------------------------------------------------------
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_boundary_form_identity(seed):
    f, rng = instance(seed, 4, 10)
    s1, s2 = relation_sets(f)
    h1 = s1.H.basis @ cvec(rng, s1.H.dim)
    h2 = s2.H.basis @ cvec(rng, s2.H.dim)
    r = s1.r
    rep = boundary_form(s1, (h1[:r], h1[r:]), s2, (h2[:r], h2[r:]))
    assert rep.scaled_gap <= 1e-10
    m1 = s1.H0.basis @ cvec(rng, s1.H0.dim)
    rep0 = boundary_form(s1, (m1[:r], m1[r:]), s2, (h2[:r], h2[r:]))
    assert abs(rep0.endpoint) <= 1e-10 * rep0.scale and rep0.scaled_gap <= 1e-10


def test_boundary_form_single_endpoint():
    f, rng = instance(12, 8, 8)
    n = f.n
    s1, s2 = relation_sets(f)
    e1 = np.zeros(2 * n)
    e1[0] = 1
    g, y = patch_bvp(Side.ONE, f, f.interval, e1, np.zeros(2 * n))
    pair1 = (project_class(s1.space, y), project_class(s1.space, g))
    h2 = s2.H.basis @ cvec(rng, s2.H.dim)
    pair2 = (h2[: s2.r], h2[s2.r:])
    rep = boundary_form(s1, pair1, s2, pair2)
    y2 = s2.representative(*pair2).values
    expect = -(y2[0].conj() @ symplectic_unit(n) @ e1)
    assert abs(rep.endpoint - expect) <= 1e-9 * rep.scale
    assert rep.scaled_gap <= 1e-10


# -- extensions ----------------------------------------------------------------
@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_boundary_extension_family(seed):
    f, rng = instance(seed, 4, 7)
    n = f.n
    s1, s2 = relation_sets(f)
    assert boundary_extension(Side.ONE, s1, BoundarySubspace.zero(4 * n)).equals(s1.H0)
    assert boundary_extension(Side.ONE, s1, BoundarySubspace.full(4 * n)).equals(s1.H)
    with pytest.raises(Exception):
        boundary_extension(Side.TWO, s1, BoundarySubspace.zero(4 * n))
    ran = orth(s1.theta_to_boundary)
    prev = None
    fam = sample_boundary_subspaces(4 * n, rng, per_dim=1)
    for Qc in fam:
        T = s1.extension(Qc)
        assert contains(T.basis, s1.H0.basis) and contains(s1.H.basis, T.basis)
        d = quotient_dim(s1.domain(s1.H0), s1.domain(T))
        assert d == intersect(Qc.basis, ran).shape[1]
    # monotone: nested Qc give nested relations
    big = BoundarySubspace(fam[-2].basis)
    small = BoundarySubspace(big.basis[:, :1])
    assert contains(s1.extension(big).basis, s1.extension(small).basis)


def test_quasi_self_adjoint_iff_half_dimension():
    f, rng = instance(21, 6, 6, n=1)
    s1, s2 = relation_sets(f)
    dom = representative_domain(s1, s2)
    pr = classify_pair(s1.H0, s2.H0, operator_part="membership", domain=dom)
    assert pr.dims["D(T*)/D(S)"] == pr.dims["D(S*)/D(T)"] == 4
    for Qc in sample_boundary_subspaces(4, rng, per_dim=2):
        rep = classify_pair(s1.H0, s2.H0, s1.extension(Qc), domain=dom, operator_part="membership")
        assert rep.proper_extension and rep.hypotheses_hold and rep.identities_hold
        assert rep.quasi_self_adjoint == (Qc.dim == 2)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_qstar_law(seed):
    f, rng = instance(seed, 4, 6)
    n = f.n
    sets = relation_sets(f)
    for Q in sample_boundary_subspaces(2 * n, rng, per_dim=2):
        rep = verify_qstar_adjoint(f, Q, sets)
        assert rep.passed, rep.to_dict()


def test_qstar_law_examples():
    f, _ = instance(4, 5, 5, n=1)
    sets = relation_sets(f)
    s1, s2 = sets
    rep0 = verify_qstar_adjoint(f, BoundarySubspace.zero(2), sets)
    assert rep0.passed and rep0.dims["predicted"] == s2.H.dim
    repF = verify_qstar_adjoint(f, BoundarySubspace.full(2), sets)
    left_zero = s2.extension(BoundarySubspace.zero(2).product(BoundarySubspace.full(2)))
    assert repF.passed and repF.dims["predicted"] == left_zero.dim


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_limit_point_emulation(seed):
    f, rng = instance(seed, 4, 6)
    n = f.n
    sets = relation_sets(f)
    for Q in sample_boundary_subspaces(2 * n, rng, per_dim=1):
        rep = limit_point_emulation(f, Q, sets)
        assert rep.dims["D(K)/D(T)"] == Q.dim
        assert rep.dims["D(K*)/D(S)"] == 2 * n - Q.dim
        assert rep.quasi_self_adjoint == (Q.dim == n)


def test_hermitian_specialisation():
    f = random_field(2, IntegerInterval(0, 5), np.random.default_rng(9), hermitian=True)
    s1, s2 = relation_sets(f)
    assert s1.H.equals(s2.H) and s1.H0.equals(s2.H0)
    H0 = s1.H0
    assert contains(adjoint(H0).basis, H0.basis)
    pr = classify_pair(s1.H0, s1.H0, domain=representative_domain(s1, s1), operator_part="membership")
    assert pr.dims["D(T*)/D(S)"] % 2 == 0


# -- doubling ------------------------------------------------------------------
def test_doubled_system_algebra():
    f, rng = instance(14, 6, 6)
    n = f.n
    dbl = build_doubled(f)
    P = dbl.field.P_all
    assert np.array_equal(P, np.conj(np.swapaxes(P, 1, 2)))
    W = dbl.field.W_all
    W1, W2 = f.W1, f.W2
    Z = np.zeros_like(W1)
    expect = np.block([[W1, Z, Z, Z], [Z, W1, Z, Z], [Z, Z, W2, Z], [Z, Z, Z, W2]])
    np.testing.assert_array_equal(W, expect)
    y1, y2 = cvec(rng, (5, 2 * n)), cvec(rng, (5, 2 * n))
    a, b = dbl.unpack_y(dbl.pack_y(y1, y2))
    np.testing.assert_allclose(a, y1, atol=1e-15)
    np.testing.assert_allclose(b, y2, atol=1e-15)
    a, b = dbl.unpack_g(dbl.pack_g(y1, y2))
    np.testing.assert_allclose(a, y1, atol=1e-15)
    x1, x2 = cvec(rng, 2 * n), cvec(rng, 2 * n)
    J = symplectic_unit(n)
    bold = dbl.pack_y(y1[0], y2[0]).conj() @ dbl.J @ dbl.pack_y(x1, x2)
    assert abs(bold - (y2[0].conj() @ J @ x1 + y1[0].conj() @ J @ x2)) <= 1e-12


def test_doubled_split_round_trip():
    f, _ = instance(15, 5, 5, n=1)
    s1, s2 = relation_sets(f)
    dbl = build_doubled(f)
    T1 = s1.extension(BoundarySubspace(np.eye(4)[:, :2]))
    T2 = adjoint(T1)
    a, b = dbl.split(dbl.generate(T1, T2))
    assert a.equals(T1) and b.equals(T2)


def test_correspondence_items():
    f, rng = instance(16, 4, 4, n=1)
    sets = relation_sets(f)
    dbl = build_doubled(f)
    for Qc in boundary_family(4, 10, rng):
        rep = correspondence_check(f, Qc, sets=sets, dbl=dbl)
        assert rep.norm_additivity <= 1e-10 and rep.coupled_residual <= 1e-10
        assert all(rep.trivial_intersections.values())
        assert rep.corollary["holds"] and not rep.corollary["bold_H0_self_adjoint"]
        assert rep.doubled_adjoint_rule
        assert rep.quasi_self_adjoint == (Qc.dim == 2)
        # forward direction of the equivalence
        if rep.quasi_self_adjoint:
            assert rep.bold_self_adjoint and rep.bold_extends_minimal
        # the generated relation is self-adjoint for every proper extension
        assert rep.bold_self_adjoint


def test_hermitian_self_adjoint_extension_doubles_to_self_adjoint():
    f = random_field(1, IntegerInterval(0, 4), np.random.default_rng(2), hermitian=True)
    eye = np.eye(4)
    Qc = BoundarySubspace(eye[:, [1, 3]])
    s1, _ = relation_sets(f)
    T = s1.extension(Qc)
    assert T.equals(adjoint(T))
    rep = correspondence_check(f, Qc)
    assert rep.quasi_self_adjoint and rep.bold_self_adjoint and rep.equivalence_holds


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_hermitian_true_statements(seed):
    # self-adjoint extensions are quasi self-adjoint; Lagrangian Qc give self-adjoint ones
    rng = np.random.default_rng(seed)
    n = 1 + seed % 2
    f = random_field(n, IntegerInterval(0, 4), rng, hermitian=True)
    s1, s2 = relation_sets(f)
    dom = representative_domain(s1, s2)
    eye = np.eye(4 * n)
    lag = BoundarySubspace(np.hstack([eye[:, n:2 * n], eye[:, 3 * n:]]))
    for Qc in [lag] + sample_boundary_subspaces(4 * n, rng, per_dim=1, dims=[2 * n]):
        lagr = boundary_adjoint(Qc).equals(Qc)
        rep = classify_pair(s1.H0, s2.H0, s1.extension(Qc), domain=dom, operator_part="membership")
        assert rep.K_self_adjoint == lagr
        if rep.K_self_adjoint:
            assert rep.quasi_self_adjoint

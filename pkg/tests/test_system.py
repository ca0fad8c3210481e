import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamext import (
    CoefficientField,
    DimensionError,
    IntegerInterval,
    Side,
    WeightError,
    adjoint_side_coefficients,
    gram_window,
    random_field,
    symplectic_unit,
    validate_system,
)
from hamext.system import Tolerances

from helpers import instance


def scalar_field(A=0, B=0, C=0, D=0, W=1.0, iv=IntegerInterval(0, 5)):
    m = lambda x: np.array([[x]], dtype=complex)
    return CoefficientField(1, iv, m(A), m(B), m(C), m(D), m(W), m(W))


def test_zero_system_passes_validation():
    rep = validate_system(scalar_field(), IntegerInterval(0, 2), (0, 1j))
    assert rep.a1 and rep.definite and rep.verdict == "pass"
    assert rep.smallest_passing_prefix == 1


def test_singular_site_is_reported_not_raised():
    A = np.zeros((6, 1, 1), dtype=complex)
    A[3] = 1.0
    Z = np.zeros((1, 1))
    f = CoefficientField(1, IntegerInterval(0, 5), A, Z, Z, Z, np.eye(1), np.eye(1))
    rep = validate_system(f, IntegerInterval(0, 2))
    assert not rep.a1 and rep.verdict == "fail"
    bad = [s["t"] for s in rep.per_site if not s["invertible"]]
    assert bad == [3]


def test_zero_weight_fails_definiteness():
    rep = validate_system(scalar_field(W=0.0), IntegerInterval(0, 2))
    assert rep.a1 and not rep.definite and rep.verdict == "fail"
    assert all(p["min_eig"] == 0 for p in rep.phi_min_eig)


def test_weight_validation():
    Z = np.zeros((1, 1))
    with pytest.raises(WeightError):
        CoefficientField(1, IntegerInterval(0, 2), Z, Z, Z, Z, -np.eye(1), np.eye(1))
    W = np.array([[1, 1j], [0, 1]])
    Z2 = np.zeros((2, 2))
    with pytest.raises(WeightError):
        CoefficientField(2, IntegerInterval(0, 2), Z2, Z2, Z2, Z2, W, np.eye(2))
    with pytest.raises(DimensionError):
        CoefficientField(2, IntegerInterval(0, 2), Z, Z2, Z2, Z2, np.eye(2), np.eye(2))
    with pytest.raises(DimensionError):
        CoefficientField(1, IntegerInterval(0, 0), Z, Z, Z, Z, np.eye(1), np.eye(1))


def test_adjoint_coefficients_scalar_example():
    f = scalar_field(A=0.1j, B=0.2, C=0.3, D=0.4j)
    g = adjoint_side_coefficients(f)
    # frozen: conjugate-transpose of [[-C, D], [A, B]] read back into roles
    assert g.A[0, 0, 0] == -0.4j
    assert g.B[0, 0, 0] == 0.2
    assert g.C[0, 0, 0] == 0.3
    assert g.D[0, 0, 0] == -0.1j
    # independent oracle: the blocked matrix of the output is P*
    P = f.P(0)
    np.testing.assert_array_equal(g.P(0), P.conj().T)


def test_adjoint_fixes_zero_and_hermitian():
    f = scalar_field()
    g = adjoint_side_coefficients(f)
    assert all(np.array_equal(getattr(f, k), getattr(g, k)) for k in "ABCD")
    h = random_field(2, IntegerInterval(0, 6), np.random.default_rng(0), hermitian=True)
    assert h.is_hermitian()
    hh = adjoint_side_coefficients(h)
    for k in "ABCD":
        np.testing.assert_allclose(getattr(hh, k), getattr(h, k), atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_adjoint_is_involution(seed, n):
    f = random_field(n, IntegerInterval(0, 4), np.random.default_rng(seed))
    g = adjoint_side_coefficients(adjoint_side_coefficients(f))
    for k in ("A", "B", "C", "D", "W1", "W2"):
        np.testing.assert_array_equal(getattr(g, k), getattr(f, k))


def test_gram_window_identity_propagation():
    n, m = 2, 4
    f = CoefficientField.zeros(n, IntegerInterval(0, 7))
    phi = gram_window(f, Side.ONE, 0.0, IntegerInterval(2, 2 + m - 1), 3)
    np.testing.assert_allclose(phi, m * np.eye(2 * n), atol=1e-14)


def test_gram_window_one_step_value():
    phi = gram_window(scalar_field(), Side.ONE, 1j, IntegerInterval(0, 0), 0)
    np.testing.assert_allclose(phi, [[1, 1j], [-1j, 2]], atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_gram_hermitian_psd(seed):
    f, rng = instance(seed, 4, 10)
    w = IntegerInterval(f.interval.a, f.interval.a + 2)
    lam = complex(*rng.standard_normal(2))
    for side in Side:
        phi = gram_window(f, side, lam, w, w.a + 1)
        assert np.linalg.norm(phi - phi.conj().T) <= 1e-12 * np.linalg.norm(phi)
        assert np.linalg.eigvalsh(phi).min() >= -1e-12 * np.linalg.norm(phi)


def test_gram_rank_independent_of_lambda():
    # a rank-deficient weight makes the rank question non-trivial
    rng = np.random.default_rng(5)
    f = random_field(2, IntegerInterval(0, 9), rng)
    W1 = f.W1.copy()
    W1[:] = np.diag([1.0, 0.0])
    W2 = np.zeros_like(f.W2)
    g = CoefficientField(2, f.interval, f.A, f.B, f.C, f.D, W1, W2)
    for w in (IntegerInterval(0, 0), IntegerInterval(0, 1), IntegerInterval(2, 6)):
        ranks = set()
        for lam in (0, 1, 1j, 1 + 1j):
            phi = gram_window(g, Side.ONE, lam, w, w.a)
            s = np.linalg.svd(phi, compute_uv=False)
            ranks.add(int(np.sum(s > 1e-9 * s[0])))
        assert len(ranks) == 1


def test_gram_monotone_in_window():
    f, _ = instance(7, 10, 10)
    a = f.interval.a
    prev = None
    for k in range(1, 8):
        phi = gram_window(f, Side.TWO, 1j, IntegerInterval(a, a + k), a)
        if prev is not None:
            # Φ grows by a PSD increment
            assert np.linalg.eigvalsh(phi - prev).min() >= -1e-10 * np.linalg.norm(phi)
        prev = phi


def test_tolerances_replace():
    t = Tolerances().replace(angle=1e-6)
    assert t.angle == 1e-6 and t.rank_rtol == 1e-9
    with pytest.raises(KeyError):
        Tolerances().replace(nonsense=1)


def test_symplectic_unit():
    J = symplectic_unit(2)
    np.testing.assert_array_equal(J @ J, -np.eye(4))
    np.testing.assert_array_equal(J.T, -J)


def test_random_field_bounds():
    f = random_field(3, IntegerInterval(0, 20), np.random.default_rng(1), rho=0.7)
    assert np.linalg.norm(f.A, 2, axis=(1, 2)).max() <= 0.7 + 1e-12
    assert np.linalg.norm(f.D, 2, axis=(1, 2)).max() <= 0.7 + 1e-12
    assert validate_system(f, IntegerInterval(0, 3)).verdict == "pass"

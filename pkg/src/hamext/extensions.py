"""
Maximal and minimal relations of the two systems on a finite interval,
their boundary-condition extensions, and the doubled formally
self-adjoint system.

Elements of the maximal relation are parametrised by ``θ = (c, g)``: an
initial value ``c = y(a)`` and an ambient forcing ``g``, with
``y = Y c + S g`` where ``S`` solves ``L y = W R(g)``, ``y(a) = 0`` at
λ = 0.  The class pair is ``F θ = (Q y, Q g)``.  When the definiteness
surrogate holds, ``ker F ⊆ ker [Y S]`` and every class pair has exactly
one solution representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .dynamics import Trajectory, fundamental_values, propagate, shift
from .errors import DefinitenessError, DimensionError, MembershipError
from .quotient import QuotientSpace, build_space
from .relations import (
    LinearRelation,
    adjoint,
    classify_pair,
    complement,
    contains,
    intersect,
    max_angle,
    null,
    orth,
    same,
)
from .system import DEFAULT_TOL, CoefficientField, Side, symplectic_unit

__all__ = [
    "BoundarySubspace",
    "HamiltonianRelationSet",
    "build_relation_set",
    "build_maximal",
    "build_minimal",
    "representative",
    "BoundaryFormReport",
    "boundary_form",
    "boundary_extension",
    "boundary_symplectic",
    "q_star",
    "boundary_adjoint",
    "VerdictReport",
    "verify_qstar_adjoint",
    "representative_domain",
    "DoubledSystem",
    "build_doubled",
    "CorrespondenceReport",
    "correspondence_check",
    "limit_point_emulation",
    "sample_boundary_subspaces",
    "boundary_family",
]


# -- boundary subspaces -------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BoundarySubspace:
    """A subspace of ``C^m`` (``m = 2n`` or ``4n``) with orthonormal basis columns."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[1] > b.shape[0]:
            raise DimensionError(f"basis of shape {b.shape} cannot span a subspace")
        if b.shape[1] and np.abs(b.conj().T @ b - np.eye(b.shape[1])).max() > 1e-10:
            b = orth(b)
        object.__setattr__(self, "basis", b)

    @property
    def m(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    @classmethod
    def span(cls, vectors, m=None):
        v = np.asarray(vectors, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if v.size == 0:
            return cls(np.zeros((m if m is not None else v.shape[0], 0), dtype=complex))
        return cls(orth(v))

    @classmethod
    def zero(cls, m):
        return cls(np.zeros((m, 0), dtype=complex))

    @classmethod
    def full(cls, m):
        return cls(np.eye(m, dtype=complex))

    def projector(self):
        return self.basis @ self.basis.conj().T

    def product(self, other):
        """``self x other`` inside ``C^{m1 + m2}``."""
        top = np.hstack([self.basis, np.zeros((self.m, other.dim))])
        bot = np.hstack([np.zeros((other.m, self.dim)), other.basis])
        return BoundarySubspace(np.vstack([top, bot]))

    def equals(self, other, tol=DEFAULT_TOL):
        return self.m == other.m and same(self.basis, other.basis, tol)


def q_star(Q):
    """``Q* = C^{2n} ⊖ (J Q)``."""
    m = Q.m
    if m % 2:
        raise DimensionError("Q must live in an even-dimensional space")
    J = symplectic_unit(m // 2)
    return BoundarySubspace(complement(orth(J @ Q.basis), m))


def boundary_symplectic(n):
    """``diag(-J, J)``: the boundary form is ``ζ* diag(-J, J) η`` for
    ``η = (y1(a), y1(b+1))`` and ``ζ = (y2(a), y2(b+1))``."""
    J = symplectic_unit(n)
    Z = np.zeros_like(J)
    return np.block([[-J, Z], [Z, J]])


def boundary_adjoint(Qc):
    """``(J̃ Qc)^⊥`` in ``C^{4n}``: boundary data of the adjoint extension."""
    Jt = boundary_symplectic(Qc.m // 4)
    return BoundarySubspace(complement(orth(Jt @ Qc.basis), Qc.m))


def sample_boundary_subspaces(m, rng, per_dim=20, dims=None):
    """Canonical coordinate subspaces plus ``per_dim`` random ones per dimension.

    Coordinate subspaces are spans of leading and trailing unit vectors.
    Returned in a fixed order so sweeps are reproducible.
    """
    dims = range(m + 1) if dims is None else dims
    out = []
    eye = np.eye(m, dtype=complex)
    for k in dims:
        out.append(BoundarySubspace(eye[:, :k]))
        if 0 < k < m:
            out.append(BoundarySubspace(eye[:, m - k:]))
        for _ in range(per_dim if 0 < k < m else 0):
            X = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
            out.append(BoundarySubspace(np.linalg.qr(X)[0]))
    return out


def boundary_family(m, count, rng):
    """``count`` subspaces of ``C^m`` cycling through dimensions ``0..m``.

    The first pass uses coordinate subspaces; later ones are random.
    """
    out = []
    eye = np.eye(m, dtype=complex)
    for j in range(count):
        k = j % (m + 1)
        if j <= m or k in (0, m):
            out.append(BoundarySubspace(eye[:, :k]))
        else:
            X = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
            out.append(BoundarySubspace(np.linalg.qr(X)[0]))
    return out


# -- maximal / minimal relations ---------------------------------------------
@dataclass(eq=False)
class HamiltonianRelationSet:
    """Maximal, compactly supported and minimal relations of one system.

    Attributes
    ----------
    theta_to_pair : (2r, 2n + m) map ``θ -> (Q y, Q g)``.
    theta_to_traj : (m, 2n + m) map ``θ -> y`` (flattened trajectory).
    theta_to_boundary : (4n, 2n + m) map ``θ -> (y(a), y(b+1))``.
    """

    side: Side
    coeffs: CoefficientField
    space: QuotientSpace
    theta_to_pair: np.ndarray
    theta_to_traj: np.ndarray
    theta_to_boundary: np.ndarray
    forced: np.ndarray
    tol: object = DEFAULT_TOL

    @cached_property
    def _svd(self):
        U, s, Vh = np.linalg.svd(self.theta_to_pair, full_matrices=True)
        k = int(np.sum(s > self.tol.rank_rtol * s[0])) if s.size and s[0] > 0 else 0
        return U, s, Vh, k

    @property
    def n(self):
        return self.coeffs.n

    @property
    def r(self):
        return self.space.rank

    @cached_property
    def H(self):
        U, _, _, k = self._svd
        return LinearRelation(self.r, U[:, :k])

    @cached_property
    def well_defined(self):
        """Whether ``ker F ⊆ ker [Y S]``: class pairs determine their solution."""
        _, _, Vh, k = self._svd
        Vn = Vh[k:].conj().T
        if Vn.shape[1] == 0:
            return True
        img = self.theta_to_traj @ Vn
        scale = max(1.0, np.linalg.norm(self.theta_to_traj, 2))
        return bool(np.linalg.norm(img, 2) <= 1e3 * self.tol.rank_rtol * scale)

    @cached_property
    def rep_matrix(self):
        """``(m, 2r)`` map from a pair in ``H`` to its unique representative."""
        U, s, Vh, k = self._svd
        return self.theta_to_traj @ (Vh[:k].conj().T / s[:k][None, :]) @ U[:, :k].conj().T

    @cached_property
    def boundary_matrix(self):
        """``(4n, 2r)`` map from a pair in ``H`` to ``(y(a), y(b+1))``."""
        m2 = 2 * self.n
        R = self.rep_matrix
        return np.vstack([R[:m2], R[-m2:]])

    def extension(self, Qc):
        """Relation ``{(y, g) in H : (y(a), y(b+1)) in Qc}``."""
        if Qc.m != 4 * self.n:
            raise DimensionError(f"boundary subspace must live in C^{4 * self.n}")
        P = np.eye(Qc.m) - Qc.projector()
        z = null(P @ self.theta_to_boundary, self.tol, scale=max(1.0, np.abs(self.theta_to_boundary).max()))
        return LinearRelation(self.r, orth(self.theta_to_pair @ z, self.tol, scale=self._svd[1][0]))

    @cached_property
    def H0(self):
        """Boundary-zero part of ``H``."""
        return self.extension(BoundarySubspace.zero(4 * self.n))

    @cached_property
    def H00(self):
        """Pairs built from forcings orthogonal to every homogeneous solution of the other system.

        Such forcings give solutions with ``y(a) = 0 = y(b+1)``; this is the
        compactly supported construction, independent of the boundary map.
        """
        other = fundamental_values(self.coeffs, self.side.other, 0.0, self.coeffs.interval.a, self.tol)
        Yo = other.reshape(-1, 2 * self.n)
        phi = Yo.conj().T @ self.space.gram
        g = null(phi, self.tol, scale=max(1.0, np.abs(phi).max()))
        y = self.forced @ g
        Q = self.space.coords
        pairs = np.vstack([Q @ y, Q @ g])
        return LinearRelation(self.r, orth(pairs, self.tol, scale=self._svd[1][0]))

    def membership(self, pairs):
        """Largest principal angle of ``pairs`` outside ``H``."""
        return max_angle(self.H.basis, np.asarray(pairs, dtype=complex).reshape(2 * self.r, -1))

    def representative(self, p, q, check=True):
        """Unique solution ``y`` with ``[y] = p`` and ``L y = W R(g)`` for a lift ``g`` of ``q``."""
        h = np.concatenate([np.asarray(p, dtype=complex), np.asarray(q, dtype=complex)])
        if h.shape != (2 * self.r,):
            raise DimensionError(f"pair must have length {2 * self.r}")
        if check:
            if not self.well_defined:
                raise DefinitenessError("class pairs do not determine unique representatives")
            nh = np.linalg.norm(h)
            if nh > 0 and self.membership(h / nh) > self.tol.angle:
                raise MembershipError("pair is not in the maximal relation")
        vals = (self.rep_matrix @ h).reshape(self.coeffs.interval.n_points, 2 * self.n)
        return Trajectory(self.coeffs.interval, vals)

    def domain(self, rel):
        """Span of the unique representatives of the pairs of ``rel`` (ambient coordinates)."""
        return orth(self.rep_matrix @ rel.basis, self.tol, scale=1.0)


def build_relation_set(side, coeffs, space=None, c0=None, tol=DEFAULT_TOL):
    """Assemble the parametrisation of the maximal relation of system ``side``.

    ``c0`` selects where the homogeneous part is normalised (``Y(c0) = I``)
    and where the forced part vanishes; the default is ``a``.
    """
    space = build_space(coeffs, tol) if space is None else space
    if space.coeffs is not coeffs:
        raise DimensionError("space was built for a different coefficient field")
    iv = coeffs.interval
    n = coeffs.n
    c0 = iv.a if c0 is None else c0
    m = space.ambient_dim
    Y = fundamental_values(coeffs, side, 0.0, c0, tol)
    Yflat = Y.reshape(m, 2 * n)
    basis = np.eye(m, dtype=complex).reshape(iv.n_points, 2 * n, m)
    forced = propagate(coeffs, side, 0.0, c0, np.zeros((2 * n, m), dtype=complex), basis, tol)
    forced = forced.reshape(m, m)
    Q = space.coords
    r = space.rank
    F = np.block([[Q @ Yflat, Q @ forced], [np.zeros((r, 2 * n)), Q]])
    traj = np.hstack([Yflat, forced])
    bnd = np.vstack([traj[: 2 * n], traj[-2 * n:]])
    return HamiltonianRelationSet(side, coeffs, space, F, traj, bnd, forced, tol)


def build_maximal(side, coeffs, space=None, c0=None, tol=DEFAULT_TOL):
    """Maximal relation ``{([y], [g]) : L y = W R(g)}`` of system ``side``."""
    return build_relation_set(side, coeffs, space, c0, tol).H


def build_minimal(side, coeffs, space=None, method="boundary", tol=DEFAULT_TOL):
    """Minimal relation of system ``side``.

    ``method="boundary"`` keeps the pairs of the maximal relation whose
    representative vanishes at ``a`` and ``b+1``; ``method="support"``
    builds it from forcings orthogonal to the other system's homogeneous
    solutions.
    """
    rs = build_relation_set(side, coeffs, space, tol=tol)
    if method == "boundary":
        return rs.H0
    if method == "support":
        return rs.H00
    raise ValueError(f"unknown method {method!r}")


def representative(side, coeffs, space, pair, relset=None, tol=DEFAULT_TOL):
    """Unique trajectory in the class ``pair[0]`` solving the system with forcing class ``pair[1]``."""
    rs = build_relation_set(side, coeffs, space, tol=tol) if relset is None else relset
    return rs.representative(*pair)


def representative_domain(set_T, set_S):
    """Domain measure for :func:`classify_pair` through unique representatives.

    ``set_T`` serves relations inside ``S*`` and ``set_S`` those inside ``T*``.
    """
    def domain(rel, family):
        return (set_T if family == "T" else set_S).domain(rel)

    return domain


@dataclass
class BoundaryFormReport:
    inner: complex
    endpoint: complex
    gap: float
    scale: float

    @property
    def scaled_gap(self):
        return self.gap / self.scale

    def to_dict(self):
        c = lambda z: [float(z.real), float(z.imag)]
        return {"inner": c(self.inner), "endpoint": c(self.endpoint),
                "gap": self.gap, "scaled_gap": self.scaled_gap}


def boundary_form(set1, pair1, set2, pair2):
    """``<g1, y2> - <y1, g2>`` and ``(y2* J y1)(b+1) - (y2* J y1)(a)`` for pairs of ``H1``, ``H2``."""
    p1, q1 = (np.asarray(z, dtype=complex) for z in pair1)
    p2, q2 = (np.asarray(z, dtype=complex) for z in pair2)
    y1 = set1.representative(p1, q1).values
    y2 = set2.representative(p2, q2).values
    inner = complex(np.vdot(p2, q1) - np.vdot(q2, p1))
    J = symplectic_unit(set1.n)
    end = complex(y2[-1].conj() @ J @ y1[-1] - y2[0].conj() @ J @ y1[0])
    scale = 1.0 + sum(np.linalg.norm(v) ** 2 for v in (p1, q1, p2, q2)) + np.abs(y1).max() * np.abs(y2).max()
    return BoundaryFormReport(inner, end, abs(inner - end), float(scale))


def boundary_extension(side, relset, Qc):
    """``T(Qc) = {(y, g) in H : (y(a), y(b+1)) in Qc}``."""
    if relset.side is not side:
        raise DimensionError("relation set belongs to the other system")
    return relset.extension(Qc)


@dataclass
class VerdictReport:
    passed: bool
    max_angle: float
    dims: dict
    detail: str = ""

    def to_dict(self):
        return {"pass": self.passed, "max_angle": self.max_angle, "dims": dict(self.dims),
                "detail": self.detail}


def _angle_between(A, B):
    if A.shape[1] != B.shape[1]:
        return float(np.pi / 2)
    return max(max_angle(A, B), max_angle(B, A))


def verify_qstar_adjoint(coeffs, Q, sets=None, tol=DEFAULT_TOL):
    """Check ``T1(Q)* = {(y, g) in H2 : y(a) in Q*}`` where ``T1(Q)`` imposes ``y(a) in Q``, ``y(b+1) = 0``.

    The right-end zero condition stands in for the vanishing boundary form
    at infinity of the limit point case.
    """
    n = coeffs.n
    if Q.m != 2 * n:
        raise DimensionError(f"Q must live in C^{2 * n}")
    if sets is None:
        space = build_space(coeffs, tol)
        sets = (build_relation_set(Side.ONE, coeffs, space, tol=tol),
                build_relation_set(Side.TWO, coeffs, space, tol=tol))
    s1, s2 = sets
    if not (s1.well_defined and s2.well_defined):
        raise DefinitenessError("boundary values are not well defined on classes")
    T1 = s1.extension(Q.product(BoundarySubspace.zero(2 * n)))
    pred = s2.extension(q_star(Q).product(BoundarySubspace.full(2 * n)))
    adj = adjoint(T1)
    ang = _angle_between(adj.basis, pred.basis)
    ok = adj.dim == pred.dim and ang <= tol.angle
    return VerdictReport(ok, ang, {"Q": Q.dim, "Q*": 2 * n - Q.dim, "T1": T1.dim,
                                   "T1*": adj.dim, "predicted": pred.dim})


def limit_point_emulation(coeffs, Q, sets=None, tol=DEFAULT_TOL):
    """Quasi self-adjointness of ``T1(Q)`` in the finite-interval emulation of the half-line.

    The dual pair is ``{H1_0, S0}`` with ``S0 = {(y, g) in H2 : y(a) = 0}``:
    the right end carries no boundary data on side 2, as at a limit point
    end.  Then ``S0* = {(y, g) in H1 : y(b+1) = 0}`` and ``T1(Q) ⊆ S0*``.
    Returns the :class:`PairReport` with representative domains.
    """
    n = coeffs.n
    if sets is None:
        space = build_space(coeffs, tol)
        sets = (build_relation_set(Side.ONE, coeffs, space, tol=tol),
                build_relation_set(Side.TWO, coeffs, space, tol=tol))
    s1, s2 = sets
    S0 = s2.extension(BoundarySubspace.zero(2 * n).product(BoundarySubspace.full(2 * n)))
    K = s1.extension(Q.product(BoundarySubspace.zero(2 * n)))
    return classify_pair(s1.H0, S0, K, domain=representative_domain(s1, s2),
                         operator_part="membership", tol=tol)


# -- doubling ---------------------------------------------------------------
def _packers(n):
    I = np.eye(n)
    Z = np.zeros((n, n))
    E1 = np.block([[Z, Z, I, Z], [I, Z, Z, Z], [Z, I, Z, Z], [Z, Z, Z, I]])
    E2 = np.block([[I, Z, Z, Z], [Z, Z, I, Z], [Z, Z, Z, I], [Z, I, Z, Z]])
    return E1.astype(complex), E2.astype(complex)


@dataclass(eq=False)
class DoubledSystem:
    """The ``4n`` system built from a system and its adjoint.

    ``y = E1 (y1; y2)`` gives ``(u2, u1, v1, v2)`` and ``g = E2 (g1; g2)``
    gives ``(g1_u, g2_u, g2_v, g1_v)``.  Its coefficient ``P`` is Hermitian
    and its weight is ``diag(W1, W1, W2, W2)``.
    """

    base: CoefficientField
    field: CoefficientField
    E1: np.ndarray
    E2: np.ndarray

    @property
    def n(self):
        return self.base.n

    @property
    def J(self):
        return symplectic_unit(2 * self.n)

    def pack_y(self, y1, y2):
        return np.einsum("ij,...j->...i", self.E1, np.concatenate([y1, y2], axis=-1))

    def unpack_y(self, y):
        z = np.einsum("ij,...j->...i", np.linalg.inv(self.E1), y)
        return z[..., : 2 * self.n], z[..., 2 * self.n:]

    def pack_g(self, g1, g2):
        return np.einsum("ij,...j->...i", self.E2, np.concatenate([g1, g2], axis=-1))

    def unpack_g(self, g):
        z = np.einsum("ij,...j->...i", np.linalg.inv(self.E2), g)
        return z[..., : 2 * self.n], z[..., 2 * self.n:]

    @cached_property
    def space(self):
        return build_space(self.field)

    @cached_property
    def base_space(self):
        return build_space(self.base)

    @cached_property
    def slot_map(self):
        """Isometry ``(p1, p2) -> [E1 (lift p1; lift p2)]`` from ``L² x L²`` to the doubled space."""
        bs, ds = self.base_space, self.space
        r = bs.rank
        npts = self.base.interval.n_points
        n2 = 2 * self.n
        out = np.empty((ds.rank, 2 * r), dtype=complex)
        L = bs.lift_matrix.reshape(npts, n2, r)
        zero = np.zeros_like(L)
        for k, (a, b) in enumerate(((L, zero), (zero, L))):
            packed = np.einsum("ij,tjk->tik", self.E1, np.concatenate([a, b], axis=1))
            out[:, k * r:(k + 1) * r] = ds.coords @ packed.reshape(-1, r)
        return out

    def generate(self, T1, T2, tol=DEFAULT_TOL):
        """Relation of the doubled system generated by ``{T1, T2}``.

        Pairs ``(E1(y1; y2), E2(g1; g2))`` with ``(y1, g1) in T1`` and
        ``(y2, g2) in T2``.  Since ``E2(g1; g2) = E1(g2; g1)`` the range side
        swaps slots.
        """
        r = T1.r
        Pi = self.slot_map
        Z1 = np.zeros((r, T1.dim))
        Z2 = np.zeros((r, T2.dim))
        x = Pi @ np.block([[T1.X, Z2], [Z1, T2.X]])
        f = Pi @ np.block([[Z1, T2.F], [T1.F, Z2]])
        return LinearRelation(Pi.shape[0], orth(np.vstack([x, f]), tol, scale=1.0))

    def split(self, T, tol=DEFAULT_TOL):
        """Recover ``(T1, T2)`` from a relation generated by ``{T1, T2}``."""
        Pi = self.slot_map
        r = Pi.shape[1] // 2
        Z = np.zeros((r, r))
        I = np.eye(r)
        # embeddings of side-1 pairs (x, f) and side-2 pairs into the doubled space
        emb1 = np.vstack([Pi @ np.vstack([I, Z]) @ np.hstack([I, Z]),
                          Pi @ np.vstack([Z, I]) @ np.hstack([Z, I])])
        emb2 = np.vstack([Pi @ np.vstack([Z, I]) @ np.hstack([I, Z]),
                          Pi @ np.vstack([I, Z]) @ np.hstack([Z, I])])
        out = []
        for emb in (emb1, emb2):
            E = orth(emb, tol, scale=1.0)
            common = intersect(T.basis, E, tol)
            coeff = np.linalg.lstsq(emb, common, rcond=None)[0]
            out.append(LinearRelation(r, orth(coeff, tol, scale=1.0)))
        return tuple(out)


def build_doubled(coeffs):
    """Formally self-adjoint ``4n`` system of ``coeffs`` and its adjoint, with packers."""
    n = coeffs.n
    h = lambda m: np.conj(np.swapaxes(m, 1, 2))
    Z = np.zeros_like(coeffs.A)
    A2 = np.block([[h(coeffs.D), Z], [Z, coeffs.A]])
    B2 = np.block([[Z, h(coeffs.B)], [coeffs.B, Z]])
    C2 = np.block([[Z, coeffs.C], [h(coeffs.C), Z]])
    D2 = np.block([[coeffs.D, Z], [Z, h(coeffs.A)]])
    W1 = np.block([[coeffs.W1, Z], [Z, coeffs.W1]])
    W2 = np.block([[coeffs.W2, Z], [Z, coeffs.W2]])
    fld = CoefficientField(2 * n, coeffs.interval, A2, B2, C2, D2, W1, W2, coeffs.weight_atol)
    E1, E2 = _packers(n)
    return DoubledSystem(coeffs, fld, E1, E2)


@dataclass
class CorrespondenceReport:
    quasi_self_adjoint: bool
    bold_self_adjoint: bool
    bold_extends_minimal: bool
    equivalence_holds: bool
    norm_additivity: float
    coupled_residual: float
    trivial_intersections: dict
    corollary: dict
    doubled_adjoint_rule: bool
    dims: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "quasi_self_adjoint": self.quasi_self_adjoint,
            "bold_self_adjoint": self.bold_self_adjoint,
            "bold_extends_minimal": self.bold_extends_minimal,
            "equivalence_holds": self.equivalence_holds,
            "norm_additivity": self.norm_additivity,
            "coupled_residual": self.coupled_residual,
            "trivial_intersections": dict(self.trivial_intersections),
            "corollary": dict(self.corollary),
            "doubled_adjoint_rule": self.doubled_adjoint_rule,
            "dims": dict(self.dims),
        }


def _solution_correspondence(dbl, lam, rng):
    """Norm additivity and the coupled equations for a doubled solution at ``lam``."""
    from .dynamics import system_residual

    base = dbl.base
    n = base.n
    c = rng.standard_normal(8 * n) + 1j * rng.standard_normal(8 * n)
    y = propagate(dbl.field, Side.ONE, lam, base.interval.a, c[: 4 * n])
    y1, y2 = dbl.unpack_y(y)
    ds, bs = dbl.space, dbl.base_space
    norm_b = ds.semi_inner(y, y).real
    norm_s = bs.semi_inner(y1, y1).real + bs.semi_inner(y2, y2).real
    add = abs(norm_b - norm_s) / max(1.0, norm_b)
    # L1 y1 = λ W R(y2) and L2 y2 = λ W R(y1)
    r1, s1 = system_residual(Side.ONE, base, 0.0, y1, lam * y2)
    r2, s2 = system_residual(Side.TWO, base, 0.0, y2, lam * y1)
    return add, max(r1.max() / s1, r2.max() / s2)


def _instance_checks(dbl, sets, lam, seed, tol):
    """Per-instance parts of the correspondence check, cached on ``dbl``."""
    key = (id(sets[0]), id(sets[1]), complex(lam), seed)
    cache = dbl.__dict__.setdefault("_instance_cache", {})
    if key in cache:
        return cache[key]
    s1, s2 = sets
    dom = representative_domain(s1, s2)
    bold_min = dbl.generate(s1.H0, s2.H0, tol)
    rng = np.random.default_rng(seed)
    triv = {
        "H1(0) ∩ N(H2)": intersect(s1.H.multivalued_part(tol), s2.H.kernel(tol), tol).shape[1] == 0,
        "H2(0) ∩ N(H1)": intersect(s2.H.multivalued_part(tol), s1.H.kernel(tol), tol).shape[1] == 0,
    }
    pr0 = classify_pair(s1.H0, s2.H0, s1.H0, domain=dom, operator_part="membership", tol=tol)
    bold_min_sa = bold_min.equals(adjoint(bold_min), tol)
    out = {
        "sets": sets,  # keeps the ids in the key alive
        "bold_min": bold_min,
        "solution": _solution_correspondence(dbl, lam, rng),
        "trivial": triv,
        "corollary": {
            "H1_0_quasi_self_adjoint": bool(pr0.quasi_self_adjoint),
            "bold_H0_self_adjoint": bool(bold_min_sa),
            "holds": bool(pr0.quasi_self_adjoint) == bool(bold_min_sa),
        },
    }
    cache[key] = out
    return out


def correspondence_check(coeffs, Qc=None, T1=None, sets=None, dbl=None, lam=1j, seed=0,
                         tol=DEFAULT_TOL):
    """Quasi self-adjointness of ``T1`` against self-adjointness of the generated doubled relation.

    ``T1`` is ``T(Qc)`` for a boundary subspace ``Qc`` of ``C^{4n}`` unless
    supplied directly.  Quasi self-adjointness is measured with
    representative domains.
    """
    if sets is None:
        space = build_space(coeffs, tol)
        sets = (build_relation_set(Side.ONE, coeffs, space, tol=tol),
                build_relation_set(Side.TWO, coeffs, space, tol=tol))
    s1, s2 = sets
    if not (s1.well_defined and s2.well_defined):
        raise DefinitenessError("boundary values are not well defined on classes")
    if T1 is None:
        if Qc is None:
            raise ValueError("give either Qc or T1")
        T1 = s1.extension(Qc)
    dbl = build_doubled(coeffs) if dbl is None else dbl
    dom = representative_domain(s1, s2)
    pr = classify_pair(s1.H0, s2.H0, T1, domain=dom, operator_part="membership", tol=tol)
    T1s = adjoint(T1)
    bold = dbl.generate(T1, T1s, tol)
    bold_s = adjoint(bold)
    bold_sa = bold.equals(bold_s, tol)
    inst = _instance_checks(dbl, sets, lam, seed, tol)
    extends = contains(bold.basis, inst["bold_min"].basis, tol)
    # adjoint rule: gen{T1, T2}* = gen{T2*, T1*}, with T2 = T1* here
    rule = bold_s.equals(dbl.generate(adjoint(T1s), T1s, tol), tol)
    add, cres = inst["solution"]
    triv = inst["trivial"]
    corollary = inst["corollary"]
    quasi = bool(pr.quasi_self_adjoint)
    equiv = quasi == (bold_sa and extends)
    return CorrespondenceReport(
        quasi_self_adjoint=quasi,
        bold_self_adjoint=bool(bold_sa),
        bold_extends_minimal=bool(extends),
        equivalence_holds=bool(equiv),
        norm_additivity=float(add),
        coupled_residual=float(cres),
        trivial_intersections=triv,
        corollary=corollary,
        doubled_adjoint_rule=bool(rule),
        dims={"Qc": None if Qc is None else Qc.dim, "T1": T1.dim, "T1*": T1s.dim,
              "bold": bold.dim, "D(K)/D(T)": pr.dims.get("D(K)/D(T)"),
              "D(K*)/D(S)": pr.dims.get("D(K*)/D(S)")},
    )

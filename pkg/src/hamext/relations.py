"""
Finite-dimensional linear relations.

A relation on ``C^r`` is a subspace of ``C^r x C^r``, stored as an
orthonormal basis of ``C^{2r}`` whose first ``r`` rows are the domain
side ``x`` and last ``r`` rows the range side ``f`` of the pairs
``(x, f)``.  All subspace comparisons go through principal angles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .errors import ContainmentError, DimensionError
from .system import DEFAULT_TOL

__all__ = [
    "orth",
    "null",
    "complement",
    "intersect",
    "max_angle",
    "contains",
    "same",
    "LinearRelation",
    "span_relation",
    "adjoint",
    "arens_decompose",
    "deficiency_index",
    "quotient_dim",
    "bracket",
    "PairReport",
    "classify_pair",
]


# -- subspaces as orthonormal column bases ------------------------------------
def orth(M, tol=DEFAULT_TOL, scale=None):
    """Orthonormal basis of the column span of ``M``.

    Singular values are kept above ``tol.rank_rtol`` times ``scale``
    (default: the largest singular value).
    """
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    ref = s[0] if scale is None else scale
    if ref <= 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    return U[:, s > tol.rank_rtol * ref]


def null(M, tol=DEFAULT_TOL, scale=None):
    """Orthonormal basis of the right null space of ``M``."""
    M = np.asarray(M, dtype=complex)
    k = M.shape[1]
    if M.shape[0] == 0 or M.size == 0:
        return np.eye(k, dtype=complex)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    ref = s[0] if scale is None else scale
    if ref <= 0:
        return np.eye(k, dtype=complex)
    rank = int(np.sum(s > tol.rank_rtol * ref))
    return Vh[rank:].conj().T


def complement(Q, dim=None):
    """Orthogonal complement of the orthonormal basis ``Q`` in ``C^dim``."""
    Q = np.asarray(Q, dtype=complex)
    dim = Q.shape[0] if dim is None else dim
    if Q.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    U, _, _ = np.linalg.svd(Q, full_matrices=True)
    return U[:, Q.shape[1]:]


def intersect(A, B, tol=DEFAULT_TOL):
    """Basis of ``span A ∩ span B`` (both orthonormal)."""
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    z = null(np.hstack([A, -B]), tol)
    return orth(A @ z[: A.shape[1]], tol, scale=1.0)


def max_angle(big, small):
    """Largest principal angle between ``span small`` and its projection onto ``span big``.

    Zero iff ``span small ⊆ span big``; ``pi/2`` if ``small`` is nonzero and
    ``big`` is the zero subspace.
    """
    if small.shape[1] == 0:
        return 0.0
    if big.shape[1] == 0:
        return float(np.pi / 2)
    if big.shape[1] >= big.shape[0]:
        return 0.0
    resid = small - big @ (big.conj().T @ small)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(np.arcsin(min(1.0, s[0]))) if s.size else 0.0


def contains(big, small, tol=DEFAULT_TOL):
    return max_angle(big, small) <= tol.angle


def same(A, B, tol=DEFAULT_TOL):
    """Subspace equality: equal dimension and all principal angles below ``tol.angle``."""
    if A.shape[1] != B.shape[1]:
        return False
    if A.shape[1] == 0:
        return True
    return float(np.max(subspace_angles(A, B))) <= tol.angle


# -- relations ----------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LinearRelation:
    """A subspace of ``C^r x C^r`` with orthonormal basis columns ``basis``."""

    r: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != 2 * self.r:
            raise DimensionError(f"basis of shape {b.shape} for r={self.r}")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def X(self):
        return self.basis[: self.r]

    @property
    def F(self):
        return self.basis[self.r:]

    def domain(self, tol=DEFAULT_TOL):
        return orth(self.X, tol, scale=1.0)

    def range(self, tol=DEFAULT_TOL):
        return orth(self.F, tol, scale=1.0)

    def multivalued_part(self, tol=DEFAULT_TOL):
        """``T(0) = {f : (0, f) in T}``."""
        return orth(self.F @ null(self.X, tol, scale=1.0), tol, scale=1.0)

    def kernel(self, tol=DEFAULT_TOL):
        """``N(T) = {x : (x, 0) in T}``."""
        return orth(self.X @ null(self.F, tol, scale=1.0), tol, scale=1.0)

    def inverse(self):
        return LinearRelation(self.r, np.vstack([self.F, self.X]))

    def shifted(self, lam, tol=DEFAULT_TOL):
        """``T - λ = {(x, f - λx)}``."""
        return LinearRelation(self.r, orth(np.vstack([self.X, self.F - lam * self.X]), tol, scale=1.0))

    def contains_pairs(self, pairs, tol=DEFAULT_TOL):
        return contains(self.basis, np.asarray(pairs, dtype=complex).reshape(2 * self.r, -1), tol)

    def __le__(self, other):
        return contains(other.basis, self.basis)

    def equals(self, other, tol=DEFAULT_TOL):
        return self.r == other.r and same(self.basis, other.basis, tol)


def span_relation(pairs, r=None, tol=DEFAULT_TOL):
    """Relation spanned by ``pairs``.

    ``pairs`` is either a list of ``(x, f)`` tuples or a ``2r x k`` array of
    stacked pair columns.  An empty list needs ``r``.
    """
    if isinstance(pairs, np.ndarray):
        M = pairs.astype(complex)
        if r is None:
            r = M.shape[0] // 2
        if M.shape[0] != 2 * r:
            raise DimensionError(f"pair array has {M.shape[0]} rows, expected {2 * r}")
        return LinearRelation(r, orth(M, tol))
    pairs = list(pairs)
    if not pairs:
        if r is None:
            raise DimensionError("an empty span needs the space dimension r")
        return LinearRelation(r, np.zeros((2 * r, 0), dtype=complex))
    cols = []
    for x, f in pairs:
        x = np.asarray(x, dtype=complex).ravel()
        f = np.asarray(f, dtype=complex).ravel()
        if r is None:
            r = x.size
        if x.size != r or f.size != r:
            raise DimensionError(f"pair of sizes ({x.size}, {f.size}) in a space of dimension {r}")
        cols.append(np.concatenate([x, f]))
    return LinearRelation(r, orth(np.array(cols).T, tol))


def adjoint(T):
    """``T* = {(y, g) : <y, f> = <g, x> for all (x, f) in T}``.

    Equivalently the orthogonal complement of ``{(f, -x)}`` in ``C^{2r}``.
    """
    flipped = np.vstack([T.F, -T.X])
    return LinearRelation(T.r, complement(flipped, 2 * T.r))


def arens_decompose(T, tol=DEFAULT_TOL):
    """Split ``T = T_s ⊕ T_inf`` with ``T_inf = {(0, g) in T}``."""
    z = null(T.X, tol, scale=1.0)
    inf = orth(T.basis @ z, tol, scale=1.0)
    # T_s is the orthogonal complement of T_inf inside T
    coeff = complement(T.basis.conj().T @ inf, T.dim) if inf.shape[1] else np.eye(T.dim)
    s = orth(T.basis @ coeff, tol, scale=1.0)
    return LinearRelation(T.r, s), LinearRelation(T.r, inf)


def deficiency_index(T, lam, tol=DEFAULT_TOL):
    """``d_λ(T) = dim (Ran(T - λ))^⊥``."""
    ran = orth(T.F - lam * T.X, tol, scale=max(1.0, abs(lam)))
    return T.r - ran.shape[1]


def quotient_dim(Dsub, Dsuper, tol=DEFAULT_TOL):
    """``dim(Dsuper / Dsub)`` after checking ``Dsub ⊆ Dsuper``."""
    ang = max_angle(Dsuper, Dsub)
    if ang > tol.angle:
        raise ContainmentError(
            f"subspace is not contained (largest principal angle {ang:.3e})", max_angle=ang
        )
    return Dsuper.shape[1] - Dsub.shape[1]


def bracket(p, q):
    """``[(x, f) : (y, g)] = <f, y> - <x, g>`` for stacked pairs ``p = (x, f)``, ``q = (y, g)``.

    Works on columns: returns the matrix of brackets between columns of
    ``p`` and ``q`` (row index from ``q``).
    """
    r = p.shape[0] // 2
    x, f = p[:r], p[r:]
    y, g = q[:r], q[r:]
    return y.conj().T @ f - g.conj().T @ x


# -- pair classification ------------------------------------------------------
def _class_domain(rel, family):
    return rel.domain()


@dataclass
class PairReport:
    """Verdicts on a pair ``{T, S}`` and an optional extension ``K``."""

    dual_pair: bool
    T_hermitian: bool
    T_self_adjoint: bool
    S_hermitian: bool
    S_self_adjoint: bool
    hypotheses: dict
    dims: dict
    identities: dict
    closure_characterization: bool
    proper_extension: bool | None = None
    quasi_self_adjoint: bool | None = None
    K_self_adjoint: bool | None = None
    operator_part: str = "strict"
    notes: list = field(default_factory=list)

    @property
    def hypotheses_hold(self):
        return self.dual_pair and all(
            self.hypotheses[k] for k in ("S_star_0_meets_N_T_star", "T_star_0_meets_N_S_star",
                                         "operator_part_" + self.operator_part)
        )

    @property
    def identities_hold(self):
        return all(v for v in self.identities.values() if v is not None)

    def to_dict(self):
        return {
            "dual_pair": self.dual_pair,
            "T_hermitian": self.T_hermitian,
            "T_self_adjoint": self.T_self_adjoint,
            "S_hermitian": self.S_hermitian,
            "S_self_adjoint": self.S_self_adjoint,
            "hypotheses": dict(self.hypotheses),
            "dims": dict(self.dims),
            "identities": dict(self.identities),
            "closure_characterization": self.closure_characterization,
            "proper_extension": self.proper_extension,
            "quasi_self_adjoint": self.quasi_self_adjoint,
            "K_self_adjoint": self.K_self_adjoint,
            "operator_part": self.operator_part,
            "notes": list(self.notes),
        }


def classify_pair(T, S, K=None, domain=None, operator_part="strict", tol=DEFAULT_TOL):
    """Dual-pair and extension diagnostics for relations on the same space.

    Parameters
    ----------
    T, S : LinearRelation
    K : LinearRelation, optional
        Candidate extension ``T ⊆ K ⊆ S*``.
    domain : callable ``(relation, family) -> basis``, optional
        How domains are measured.  ``family`` is ``"T"`` for relations
        inside ``S*`` (``T``, ``K``, ``S*``) and ``"S"`` for those inside
        ``T*`` (``S``, ``K*``, ``T*``).  The default is the class-level
        domain (first block of the relation).

    operator_part : {"strict", "membership"}
        Which reading of the hypotheses ``(T*)_s|D(S) = S_s`` and
        ``(S*)_s|D(T) = T_s`` gates the dimension identities.  ``"strict"``
        asks that ``S_s ⊆ T*`` with ``Ran S_s ⊥ T*(0)`` (so the operator
        parts agree), and symmetrically for ``T``.  ``"membership"`` only
        asks ``S ⊆ T*``, which a dual pair always satisfies; it suits
        domain measures that already identify elements by a unique
        representative.  Both readings are always reported.
    """
    if T.r != S.r or (K is not None and K.r != T.r):
        raise DimensionError("relations live on spaces of different dimension")
    if operator_part not in ("strict", "membership"):
        raise ValueError(f"operator_part must be 'strict' or 'membership', got {operator_part!r}")
    dom = _class_domain if domain is None else domain
    Ts, Ss = adjoint(T), adjoint(S)
    report_notes = []

    dual = contains(Ss.basis, T.basis, tol)
    hyp = {}
    hyp["S_star_0_meets_N_T_star"] = intersect(Ss.multivalued_part(tol), Ts.kernel(tol), tol).shape[1] == 0
    hyp["T_star_0_meets_N_S_star"] = intersect(Ts.multivalued_part(tol), Ss.kernel(tol), tol).shape[1] == 0
    hyp["operator_part_membership"] = contains(Ts.basis, S.basis, tol) and contains(
        Ss.basis, T.basis, tol)

    def parts_agree(A, Bs):
        # (B*)_s y = A_s y on D(A): A_s ⊆ B* and Ran A_s ⊥ B*(0)
        A_s, _ = arens_decompose(A, tol)
        mv = Bs.multivalued_part(tol)
        if not contains(Bs.basis, A_s.basis, tol):
            return False
        if mv.shape[1] == 0 or A_s.dim == 0:
            return True
        return float(np.abs(mv.conj().T @ A_s.F).max()) <= np.sin(tol.angle) * 10

    hyp["operator_part_strict"] = parts_agree(S, Ts) and parts_agree(T, Ss)

    dims = {}
    identities = {}
    try:
        dims["D(T*)/D(S)"] = quotient_dim(dom(S, "S"), dom(Ts, "S"), tol)
        dims["D(S*)/D(T)"] = quotient_dim(dom(T, "T"), dom(Ss, "T"), tol)
    except ContainmentError as exc:
        report_notes.append(f"domain containment failed: {exc}")
    proper = quasi = k_sa = None
    if K is not None:
        proper = contains(K.basis, T.basis, tol) and contains(Ss.basis, K.basis, tol)
        Ks = adjoint(K)
        k_sa = K.equals(Ks, tol)
        try:
            dims["D(K)/D(T)"] = quotient_dim(dom(T, "T"), dom(K, "T"), tol)
            dims["D(K*)/D(S)"] = quotient_dim(dom(S, "S"), dom(Ks, "S"), tol)
            quasi = bool(proper and dims["D(K)/D(T)"] == dims["D(K*)/D(S)"])
        except ContainmentError as exc:
            report_notes.append(f"extension containment failed: {exc}")
            quasi = False

    gate = "operator_part_" + operator_part
    hyp_ok = dual and all(hyp[k] for k in ("S_star_0_meets_N_T_star", "T_star_0_meets_N_S_star",
                                           gate))
    if hyp_ok and "D(T*)/D(S)" in dims and "D(S*)/D(T)" in dims:
        identities["symmetric_defect"] = dims["D(T*)/D(S)"] == dims["D(S*)/D(T)"]
        if "D(K)/D(T)" in dims:
            identities["additivity"] = (
                dims["D(T*)/D(S)"] == dims["D(K)/D(T)"] + dims["D(K*)/D(S)"]
            )
            if quasi:
                identities["evenness"] = dims["D(T*)/D(S)"] % 2 == 0
                identities["half_defect"] = 2 * dims["D(K)/D(T)"] == dims["D(T*)/D(S)"]
            else:
                identities["evenness"] = None
                identities["half_defect"] = None
    elif not hyp_ok:
        report_notes.append("dual-pair hypotheses fail; identities not asserted")

    # closure characterization: T = {(x, f) in S* : [(x, f) : T*] = 0}
    if dual:
        M = bracket(Ss.basis, Ts.basis)
        char = orth(Ss.basis @ null(M, tol, scale=1.0), tol, scale=1.0)
        closure = same(char, T.basis, tol)
    else:
        closure = False

    return PairReport(
        dual_pair=dual,
        T_hermitian=contains(Ts.basis, T.basis, tol),
        T_self_adjoint=T.equals(Ts, tol),
        S_hermitian=contains(Ss.basis, S.basis, tol),
        S_self_adjoint=S.equals(Ss, tol),
        hypotheses=hyp,
        dims=dims,
        identities=identities,
        closure_characterization=closure,
        proper_extension=proper,
        quasi_self_adjoint=quasi,
        K_self_adjoint=k_sa,
        operator_part=operator_part,
        notes=report_notes,
    )

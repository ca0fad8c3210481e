"""
Solutions of the two systems: propagation, fundamental matrices, the
Lagrange identity, inhomogeneous solves and the two-point patch problem.

Trajectories are stored as arrays of shape ``(n_points, 2n)`` (or
``(n_points, 2n, k)`` for ``k`` columns at once), row ``j`` holding
``y(a + j)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DefinitenessError, DimensionError, ResidualError, SingularityError
from .system import DEFAULT_TOL, IntegerInterval, Side, symplectic_unit

__all__ = [
    "Trajectory",
    "FundamentalMatrix",
    "IdentityReport",
    "shift",
    "shift_matrix",
    "step",
    "propagate",
    "fundamental_values",
    "fundamental_matrix",
    "system_residual",
    "solve_forced_ivp",
    "solve_voc",
    "lagrange_report",
    "symplectic_defect",
    "patch_bvp",
    "embed",
]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A ``C^{2n}``-valued sequence on ``[a, b+1]``."""

    interval: IntegerInterval
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 2 or vals.shape[0] != self.interval.n_points or vals.shape[1] % 2:
            raise DimensionError(
                f"trajectory values of shape {vals.shape} do not fit {self.interval}"
            )
        object.__setattr__(self, "values", vals)

    @property
    def n(self):
        return self.values.shape[1] // 2

    def __call__(self, t):
        return self.values[t - self.interval.a]

    @property
    def u(self):
        return self.values[:, : self.n]

    @property
    def v(self):
        return self.values[:, self.n:]

    def shift(self):
        """``R(y)(t) = (u(t+1), v(t))`` for ``t`` in ``[a, b]``."""
        return shift(self.values)

    def flat(self):
        return self.values.reshape(-1)

    @classmethod
    def zeros(cls, interval, n):
        return cls(interval, np.zeros((interval.n_points, 2 * n), dtype=complex))


@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    """``Y(t)`` on ``[a, b+1]`` with ``Y(c0) = I``; every column solves the homogeneous system."""

    side: Side
    lam: complex
    c0: int
    interval: IntegerInterval
    values: np.ndarray

    def __call__(self, t):
        return self.values[t - self.interval.a]

    def shift(self):
        return shift(self.values)

    def column(self, j):
        return Trajectory(self.interval, self.values[:, :, j])


def shift(values):
    """Partial right shift of stacked trajectory values along axis 0."""
    n = values.shape[1] // 2
    return np.concatenate([values[1:, :n], values[:-1, n:]], axis=1)


def shift_matrix(coeffs, side, lam, t):
    """The matrix taking ``y(t)`` to ``R(y)(t)`` for homogeneous solutions of ``side``.

    ``[[(I-A)^{-1}, (I-A)^{-1}(B + λ W2)], [0, I]]`` with the side's own
    ``A`` and ``B`` roles.
    """
    A, B, _, _, _, W2 = coeffs.side(side).blocks(t)
    n = A.shape[0]
    top = np.linalg.solve(np.eye(n) - A, np.hstack([np.eye(n), B + lam * W2]))
    return np.vstack([top, np.hstack([np.zeros((n, n)), np.eye(n)])])


def _as_columns(x):
    x = np.asarray(x, dtype=complex)
    return (x[:, None], True) if x.ndim == 1 else (x, False)


def _site_step(A, B, C, D, W1, W2, lam, y, gv_t=None, gu_next=None, forward=True):
    """One step of the blocked recursion on column stack ``y``.

    Forward::

        u(t+1) = (I - A)^{-1} [u(t) + (B + λ W2) v(t) + W2 g_v(t)]
        v(t+1) = (I - D) v(t) + (C - λ W1) u(t+1) - W1 g_u(t+1)

    Backward solves the same two relations for ``y(t)`` given ``y(t+1)``.
    """
    n = A.shape[0]
    eye = np.eye(n)
    u, v = y[:n], y[n:]
    if forward:
        rhs = u + (B + lam * W2) @ v
        if gv_t is not None:
            rhs = rhs + W2 @ gv_t
        u1 = np.linalg.solve(eye - A, rhs)
        v1 = (eye - D) @ v + (C - lam * W1) @ u1
        if gu_next is not None:
            v1 = v1 - W1 @ gu_next
        return np.concatenate([u1, v1])
    u1, v1 = u, v
    rhs = v1 - (C - lam * W1) @ u1
    if gu_next is not None:
        rhs = rhs + W1 @ gu_next
    v0 = np.linalg.solve(eye - D, rhs)
    u0 = (eye - A) @ u1 - (B + lam * W2) @ v0
    if gv_t is not None:
        u0 = u0 - W2 @ gv_t
    return np.concatenate([u0, v0])


def step(side, coeffs, lam, y_t, t, direction="forward", g_t=None, g_next=None,
         tol=DEFAULT_TOL):
    """Advance a solution of system ``side`` by one site.

    ``direction="forward"`` maps ``y(t)`` to ``y(t+1)``; ``"backward"`` maps
    ``y(t+1)`` (passed as ``y_t``) to ``y(t)``.  Optional forcing values
    ``g(t)`` and ``g(t+1)`` enter through ``W R(g)(t)``.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    field = coeffs.side(side)
    i = field.index(t)
    ca, cd = field.a1_conditions
    if ca[i] > tol.cond_max or cd[i] > tol.cond_max:
        raise SingularityError(f"(A1) fails at site {t}", site=t)
    y, squeeze = _as_columns(y_t)
    n = field.n
    gv = None if g_t is None else _as_columns(g_t)[0][n:]
    gu = None if g_next is None else _as_columns(g_next)[0][:n]
    out = _site_step(*field.blocks(t), lam, y, gv, gu, forward=direction == "forward")
    return out[:, 0] if squeeze else out


def propagate(coeffs, side, lam, t0, y0, g=None, tol=DEFAULT_TOL):
    """Solve ``L_side y - λ W R(y) = W R(g)`` on the whole interval with ``y(t0) = y0``.

    ``y0`` is a vector or a ``2n x k`` column stack; ``g`` (optional) has
    shape ``(n_points, 2n)`` or ``(n_points, 2n, k)``.  Returns values of
    shape ``(n_points, 2n[, k])``.
    """
    field = coeffs.side(side)
    field.require_a1(tol.cond_max)
    iv = field.interval
    if not iv.a <= t0 <= iv.b + 1:
        raise DimensionError(f"t0={t0} outside [{iv.a}, {iv.b + 1}]")
    y0, squeeze = _as_columns(y0)
    n = field.n
    if y0.shape[0] != 2 * n:
        raise DimensionError(f"initial value has {y0.shape[0]} rows, expected {2 * n}")
    k = y0.shape[1]
    if g is not None:
        g = np.asarray(g, dtype=complex)
        if g.ndim == 2:
            g = np.repeat(g[:, :, None], k, axis=2) if not squeeze else g[:, :, None]
        if g.shape != (iv.n_points, 2 * n, k):
            raise DimensionError(f"forcing of shape {g.shape} does not match")
    out = np.empty((iv.n_points, 2 * n, k), dtype=complex)
    j0 = t0 - iv.a
    out[j0] = y0
    blocks = (field.A, field.B, field.C, field.D, field.W1, field.W2)
    for j in range(j0, iv.n_sites):
        gv = None if g is None else g[j, n:]
        gu = None if g is None else g[j + 1, :n]
        out[j + 1] = _site_step(*(b[j] for b in blocks), lam, out[j], gv, gu, True)
    for j in range(j0 - 1, -1, -1):
        gv = None if g is None else g[j, n:]
        gu = None if g is None else g[j + 1, :n]
        out[j] = _site_step(*(b[j] for b in blocks), lam, out[j + 1], gv, gu, False)
    return out[:, :, 0] if squeeze else out


def fundamental_values(coeffs, side, lam, c0, tol=DEFAULT_TOL):
    n = coeffs.n
    return propagate(coeffs, side, lam, c0, np.eye(2 * n, dtype=complex), tol=tol)


def fundamental_matrix(side, coeffs, lam, c0, tol=DEFAULT_TOL):
    """Fundamental matrix of system ``side`` at ``lam`` with ``Y(c0) = I``."""
    vals = fundamental_values(coeffs, side, lam, c0, tol)
    return FundamentalMatrix(side, complex(lam), c0, coeffs.interval, vals)


def system_residual(side, coeffs, lam, y, g=None):
    """Per-site residual of ``J Δy - (P + λW) R(y) - W R(g)``, from the assembled ``P``.

    This does not use the blocked recursion, so it independently checks
    anything the recursion produced.  Returns (per-site residual norms,
    scale) where scale is a magnitude bound for the terms involved.
    """
    field = coeffs.side(side)
    yv = y.values if isinstance(y, Trajectory) else np.asarray(y, dtype=complex)
    if yv.ndim == 2:
        yv = yv[:, :, None]
    J = symplectic_unit(field.n)
    dy = yv[1:] - yv[:-1]
    Ry = shift(yv)
    M = field.P_all + lam * field.W_all
    res = np.einsum("ij,tjk->tik", J, dy) - np.einsum("tij,tjk->tik", M, Ry)
    scale = 1.0 + np.abs(yv).max(initial=0.0) * (2 + np.abs(M).max(initial=0.0))
    if g is not None:
        gv = g.values if isinstance(g, Trajectory) else np.asarray(g, dtype=complex)
        if gv.ndim == 2:
            gv = gv[:, :, None]
        res = res - np.einsum("tij,tjk->tik", field.W_all, shift(gv))
        scale += np.abs(gv).max(initial=0.0) * np.abs(field.W_all).max(initial=0.0)
    return np.linalg.norm(res, axis=1).max(axis=-1), scale


def _trajectory_values(g, interval, n):
    if g is None:
        return np.zeros((interval.n_points, 2 * n), dtype=complex)
    vals = g.values if isinstance(g, Trajectory) else np.asarray(g, dtype=complex)
    if vals.shape != (interval.n_points, 2 * n):
        raise DimensionError(f"trajectory of shape {vals.shape} does not fit {interval}")
    return vals


def solve_forced_ivp(side, coeffs, lam, g, t0, y0, tol=DEFAULT_TOL):
    """Recursive solution of ``L y - λ W R(y) = W R(g)`` with ``y(t0) = y0``."""
    gv = _trajectory_values(g, coeffs.interval, coeffs.n)
    vals = propagate(coeffs, side, lam, t0, np.asarray(y0, dtype=complex), gv, tol)
    return Trajectory(coeffs.interval, vals)


def solve_voc(side, coeffs, lam, g, c0, y0, tol=DEFAULT_TOL, rebase=1e4):
    """Variation-of-constants solution of the forced system with ``y(c0) = y0``.

    Uses the closed formula built from ``Y_side(·, λ)`` and the other
    system's ``Ỹ(·, conj(λ))``, both equal to ``I`` at the base point ``c``::

        y(t) = Y(t) y(c) - Y(t) J Σ_{s=c}^{t-1} R(Ỹ)*(s) W(s) R(g)(s),   t > c
        y(t) = Y(t) y(c) + Y(t) J Σ_{s=t}^{c-1} R(Ỹ)*(s) W(s) R(g)(s),   t < c

    The product ``Y(t) J R(Ỹ)*(s)`` is a propagator of size ``|Y(t) Y(s)^{-1}|``
    computed from factors of size ``|Y(t)| |Ỹ(s)|``, so the formula cancels
    badly once solutions grow.  With ``rebase`` set, the base point moves to
    ``t`` (carrying ``y(t)``) whenever ``|Y(t)| |Ỹ(t)|`` exceeds it; with
    ``rebase=None`` the single base ``c = c0`` is used throughout.
    """
    iv = coeffs.interval
    n = coeffs.n
    if not iv.a <= c0 <= iv.b + 1:
        raise DimensionError(f"c0={c0} outside [{iv.a}, {iv.b + 1}]")
    gv = _trajectory_values(g, iv, n)
    own, other = coeffs.side(side), coeffs.side(side.other)
    own.require_a1(tol.cond_max)
    other.require_a1(tol.cond_max)
    lam_t = np.conj(lam)
    J = symplectic_unit(n)
    I = np.eye(2 * n, dtype=complex)
    blocks = lambda fld, j: tuple(b[j] for b in (fld.A, fld.B, fld.C, fld.D, fld.W1, fld.W2))
    limit = np.inf if rebase is None else float(rebase)
    vals = np.empty((iv.n_points, 2 * n), dtype=complex)
    j0 = c0 - iv.a
    vals[j0] = np.asarray(y0, dtype=complex)

    def term(j, Yt_j, Yt_next):
        RYt = np.vstack([Yt_next[:n], Yt_j[n:]])
        Rg = np.concatenate([gv[j + 1, :n], gv[j, n:]])
        return RYt.conj().T @ coeffs.W_all[j] @ Rg

    # forward branch
    Y, Yt, acc, base = I, I, np.zeros(2 * n, dtype=complex), vals[j0]
    for j in range(j0, iv.n_sites):
        Y_next = _site_step(*blocks(own, j), lam, Y, forward=True)
        Yt_next = _site_step(*blocks(other, j), lam_t, Yt, forward=True)
        acc = acc + term(j, Yt, Yt_next)
        vals[j + 1] = Y_next @ (base - J @ acc)
        Y, Yt = Y_next, Yt_next
        if np.linalg.norm(Y, 2) * np.linalg.norm(Yt, 2) > limit:
            Y, Yt, acc, base = I, I, np.zeros(2 * n, dtype=complex), vals[j + 1]
    # backward branch
    Y, Yt, acc, base = I, I, np.zeros(2 * n, dtype=complex), vals[j0]
    for j in range(j0 - 1, -1, -1):
        Y_prev = _site_step(*blocks(own, j), lam, Y, forward=False)
        Yt_prev = _site_step(*blocks(other, j), lam_t, Yt, forward=False)
        acc = acc + term(j, Yt_prev, Yt)
        vals[j] = Y_prev @ (base + J @ acc)
        Y, Yt = Y_prev, Yt_prev
        if np.linalg.norm(Y, 2) * np.linalg.norm(Yt, 2) > limit:
            Y, Yt, acc, base = I, I, np.zeros(2 * n, dtype=complex), vals[j]
    return Trajectory(iv, vals)


@dataclass
class IdentityReport:
    """Both sides of the summed Lagrange identity and the conservation defects."""

    lhs: complex
    rhs: complex
    gap: float
    scale: float
    residual_x: float
    residual_y: float
    conservation: dict

    @property
    def scaled_gap(self):
        return self.gap / self.scale

    def to_dict(self):
        c = lambda z: [float(np.real(z)), float(np.imag(z))]
        return {
            "lhs": c(self.lhs),
            "rhs": c(self.rhs),
            "gap": self.gap,
            "scaled_gap": self.scaled_gap,
            "residual_x": self.residual_x,
            "residual_y": self.residual_y,
            "conservation": self.conservation,
        }


def symplectic_defect(coeffs, lam, c0=None, tol=DEFAULT_TOL):
    """Scaled defects of ``Y2*(t, conj λ) J Y1(t, λ) = J`` and of Wronskian constancy.

    Returns ``(matrix_defect, wronskian_defect)``; each is the maximum over
    ``t`` of the error divided by ``1 + |Y1(t)| |Y2(t)|``.
    """
    c0 = coeffs.interval.a if c0 is None else c0
    n = coeffs.n
    J = symplectic_unit(n)
    Y1 = fundamental_values(coeffs, Side.ONE, lam, c0, tol)
    Y2 = fundamental_values(coeffs, Side.TWO, np.conj(lam), c0, tol)
    prod = np.einsum("tji,jk,tkl->til", Y2.conj(), J, Y1)
    norms = np.linalg.norm(Y1, 2, axis=(1, 2)) * np.linalg.norm(Y2, 2, axis=(1, 2))
    mat = np.linalg.norm(prod - J, 2, axis=(1, 2)) / (1 + norms)
    # Wronskian of one pair of solutions (fixed combinations of columns)
    rng = np.random.default_rng(0)
    x1 = rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n)
    x2 = rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n)
    w = np.einsum("i,tji,jk,tkl,l->t", x2.conj(), Y2.conj(), J, Y1, x1)
    # compare with the exact value at c0, where both fundamental matrices are I
    w0 = x2.conj() @ J @ x1
    wr = np.abs(w - w0) / (1 + norms * np.linalg.norm(x1) * np.linalg.norm(x2))
    return float(mat.max()), float(wr.max())


def lagrange_report(coeffs, x, f, y, g, s=None, k=None, lams=(0.0,), tol=DEFAULT_TOL,
                    check=True):
    """Summed Lagrange identity for ``L1 x = W R(f)`` and ``L2 y = W R(g)``.

    ``lhs = Σ_{t=s}^{k} [R(y)* W R(f) - R(g)* W R(x)]`` and
    ``rhs = y*(k+1) J x(k+1) - y*(s) J x(s)``.  Residuals of both input
    pairs are re-checked; with ``check=True`` a failing residual raises
    :class:`ResidualError`.  ``lams`` selects the spectral parameters at
    which the conservation defects are also evaluated.
    """
    iv = coeffs.interval
    s = iv.a if s is None else s
    k = iv.b if k is None else k
    if not (iv.a <= s <= k <= iv.b):
        raise DimensionError(f"[{s}, {k}] is not a sub-interval of {iv}")
    rx, sx = system_residual(Side.ONE, coeffs, 0.0, x, f)
    ry, sy = system_residual(Side.TWO, coeffs, 0.0, y, g)
    sl = slice(s - iv.a, k - iv.a + 1)
    res_x = float(rx[sl].max() / sx)
    res_y = float(ry[sl].max() / sy)
    if check and (res_x > tol.residual or res_y > tol.residual):
        raise ResidualError(f"inputs do not solve their systems (residuals {res_x:.2e}, {res_y:.2e})")
    vals = lambda z: z.values if isinstance(z, Trajectory) else np.asarray(z, dtype=complex)
    X, F, Yv, G = vals(x), vals(f), vals(y), vals(g)
    W = coeffs.W_all[sl]
    RX, RF, RY, RG = (shift(z)[sl] for z in (X, F, Yv, G))
    t1 = np.einsum("ti,tij,tj->t", RY.conj(), W, RF)
    t2 = np.einsum("ti,tij,tj->t", RG.conj(), W, RX)
    lhs = complex(np.sum(t1 - t2))
    J = symplectic_unit(coeffs.n)
    js, jk = s - iv.a, k + 1 - iv.a
    b_end = Yv[jk].conj() @ J @ X[jk]
    b_start = Yv[js].conj() @ J @ X[js]
    rhs = complex(b_end - b_start)
    scale = 1.0 + float(np.sum(np.abs(t1)) + np.sum(np.abs(t2)) + abs(b_end) + abs(b_start))
    cons = {}
    for lam in lams:
        m, w = symplectic_defect(coeffs, lam, tol=tol)
        cons[repr(complex(lam))] = {"matrix": m, "wronskian": w}
    return IdentityReport(lhs, rhs, abs(lhs - rhs), scale, res_x, res_y, cons)


def patch_bvp(side, coeffs, window, alpha, beta, tol=DEFAULT_TOL):
    """Two-point problem ``L_side y = W R(g)`` on ``window = [s, k]``, ``y(s) = α``, ``y(k+1) = β``.

    The forcing is a combination of homogeneous solutions ``φ_j`` of the
    *other* system (at λ = 0, ``φ(s) = I``).  With ``M`` the window Gram of
    the ``φ_j``::

        ψ1 = φ M^{-1} φ(k+1)* J β,   ψ2 = φ M^{-1} φ(s)* J α
        L u =  W R(ψ1), u(s) = 0      (so u(k+1) = β)
        L v = -W R(ψ2), v(k+1) = 0    (so v(s) = α)

    and ``g = ψ1 - ψ2``, ``y = u + v``.  Both are returned as trajectories on
    ``[s, k+1]``; ``g_u(s)`` and ``g_v(k+1)`` do not enter the window
    equations and are set to zero so that zero extension is clean.
    """
    if not coeffs.interval.contains(window):
        raise DimensionError(f"{window} is not inside {coeffs.interval}")
    n = coeffs.n
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    if alpha.shape != (2 * n,) or beta.shape != (2 * n,):
        raise DimensionError("boundary vectors must have length 2n")
    if window.n_sites == 1:
        # a single site cannot host its own coefficient field; embed one step
        raise DimensionError("the patch window needs at least two sites")
    local = coeffs.restrict(window)
    J = symplectic_unit(n)
    phi = fundamental_values(local, side.other, 0.0, window.a, tol)
    RP = shift(phi)
    M = np.einsum("tji,tjk,tkl->il", RP.conj(), local.W_all, RP)
    M = 0.5 * (M + M.conj().T)
    eig = np.linalg.eigvalsh(M)
    if eig[-1] <= 0 or eig[0] <= tol.rank_rtol * eig[-1]:
        raise DefinitenessError(
            f"Gram matrix of homogeneous solutions is singular on {window} "
            f"(eigenvalues {eig[0]:.3e} .. {eig[-1]:.3e})"
        )
    c1 = np.linalg.solve(M, phi[-1].conj().T @ J @ beta)
    c2 = np.linalg.solve(M, phi[0].conj().T @ J @ alpha)
    psi1 = phi @ c1
    psi2 = phi @ c2
    u = propagate(local, side, 0.0, window.a, np.zeros(2 * n), psi1, tol)
    v = propagate(local, side, 0.0, window.b + 1, np.zeros(2 * n), -psi2, tol)
    g = psi1 - psi2
    g[0, :n] = 0
    g[-1, n:] = 0
    return Trajectory(window, g), Trajectory(window, u + v)


def embed(traj, interval):
    """Zero-extend a trajectory on a sub-interval to ``interval``."""
    if not interval.contains(traj.interval):
        raise DimensionError(f"{traj.interval} is not inside {interval}")
    vals = np.zeros((interval.n_points, traj.values.shape[1]), dtype=complex)
    lo = traj.interval.a - interval.a
    vals[lo:lo + traj.interval.n_points] = traj.values
    return Trajectory(interval, vals)

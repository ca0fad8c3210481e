"""
The weighted space ``L²_W([a, b])`` as a quotient of trajectory space.

An ambient vector is a flattened trajectory: entry ``(t - a) * 2n + j``
holds component ``j`` of ``y(t)``.  The semi-inner product
``<y, z> = Σ_{t=a}^{b} R(z)*(t) W(t) R(y)(t)`` has Gram ``G = S* W S`` where
``S`` picks out ``R(y)``; quotient coordinates come from its eigenvectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dynamics import Trajectory
from .errors import DimensionError
from .system import DEFAULT_TOL

__all__ = [
    "QuotientSpace",
    "build_space",
    "project_class",
    "lift",
    "class_inner",
    "shift_selector",
]


def shift_selector(n, n_sites):
    """0/1 matrix mapping a flattened trajectory to stacked ``R(y)(t)``, ``t`` in ``[a, b]``."""
    m = 2 * n * (n_sites + 1)
    S = np.zeros((2 * n * n_sites, m))
    for i in range(n_sites):
        for j in range(n):
            S[2 * n * i + j, 2 * n * (i + 1) + j] = 1.0
            S[2 * n * i + n + j, 2 * n * i + n + j] = 1.0
    return S


def _phase_fix(U):
    idx = np.argmax(np.abs(U), axis=0)
    ph = U[idx, np.arange(U.shape[1])]
    return U * (np.abs(ph) / ph)[None, :]


@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """Finite-dimensional ``L²_W`` on the interval of ``coeffs``.

    Attributes
    ----------
    gram : (m, m) Hermitian PSD matrix of the semi-inner product.
    coords : (r, m) coordinate map ``diag(sqrt(μ)) U*``; a partial isometry
        in the sense ``coords* coords = gram`` with kernel ``ker gram``.
    """

    coeffs: object
    gram: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray

    @property
    def n(self):
        return self.coeffs.n

    @property
    def interval(self):
        return self.coeffs.interval

    @property
    def ambient_dim(self):
        return self.gram.shape[0]

    @property
    def rank(self):
        return self.eigvals.size

    @cached_property
    def coords(self):
        return np.sqrt(self.eigvals)[:, None] * self.eigvecs.conj().T

    @cached_property
    def lift_matrix(self):
        """Minimal-norm ambient representative of each coordinate vector."""
        return self.eigvecs / np.sqrt(self.eigvals)[None, :]

    def ambient(self, y):
        if isinstance(y, Trajectory):
            if y.interval != self.interval:
                raise DimensionError(f"trajectory on {y.interval}, space on {self.interval}")
            return y.values.reshape(-1)
        y = np.asarray(y, dtype=complex)
        if y.shape[0] != self.ambient_dim:
            if y.shape[:2] == (self.interval.n_points, 2 * self.n):
                return y.reshape((self.ambient_dim,) + y.shape[2:])
            raise DimensionError(f"ambient vector of length {y.shape[0]}, expected {self.ambient_dim}")
        return y

    def semi_inner(self, y, z):
        """Direct weighted sum ``Σ R(z)* W R(y)`` (no Gram involved)."""
        from .dynamics import shift

        vy = self.ambient(y).reshape(self.interval.n_points, 2 * self.n)
        vz = self.ambient(z).reshape(self.interval.n_points, 2 * self.n)
        return complex(np.einsum("ti,tij,tj->", shift(vz).conj(), self.coeffs.W_all, shift(vy)))


def build_space(coeffs, tol=DEFAULT_TOL):
    """Assemble the Gram and quotient coordinates of ``L²_W`` for ``coeffs``.

    Eigenvalues are kept when above ``tol.rank_rtol`` times the largest;
    they are sorted descending and each eigenvector's largest-magnitude
    entry is made real positive, so the coordinates are reproducible.
    """
    n, N = coeffs.n, coeffs.interval.n_sites
    S = shift_selector(n, N)
    W = coeffs.W_all
    G = np.zeros((S.shape[1], S.shape[1]), dtype=complex)
    blocks = S.reshape(N, 2 * n, -1)
    for i in range(N):
        G += blocks[i].T @ W[i] @ blocks[i]
    G = 0.5 * (G + G.conj().T)
    mu, U = np.linalg.eigh(G)
    order = np.argsort(mu)[::-1]
    mu, U = mu[order], U[:, order]
    top = mu[0] if mu.size else 0.0
    keep = mu > tol.rank_rtol * top if top > 0 else np.zeros(mu.size, dtype=bool)
    return QuotientSpace(coeffs, G, mu[keep].copy(), _phase_fix(U[:, keep]))


def project_class(space, y):
    """Quotient coordinates of the class ``[y]`` (works column-wise on stacks)."""
    return space.coords @ space.ambient(y)


def lift(space, p):
    """Minimal-norm trajectory in the class with coordinates ``p``."""
    p = np.asarray(p, dtype=complex)
    if p.shape[0] != space.rank:
        raise DimensionError(f"coordinate vector of length {p.shape[0]}, space has rank {space.rank}")
    vals = space.lift_matrix @ p
    if vals.ndim == 1:
        return Trajectory(space.interval, vals.reshape(space.interval.n_points, 2 * space.n))
    return vals


def class_inner(space, p, q):
    """``<p, q>`` in quotient coordinates, linear in ``p`` and conjugate-linear in ``q``."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if p.shape != (space.rank,) or q.shape != (space.rank,):
        raise DimensionError(f"coordinates must have length {space.rank}")
    return complex(np.vdot(q, p))

"""
Coefficient data of the discrete Hamiltonian system and its adjoint.

The system on the integer interval ``[a, b]`` reads::

    J Δy(t) - P(t) R(y)(t) = λ W(t) R(y)(t)

with ``P = [[-C, D], [A, B]]``, ``W = diag(W1, W2)`` and the partial right
shift ``R(y)(t) = (u(t+1), v(t))``.  The second (adjoint) system uses
``P*`` in place of ``P``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, SingularityError, WeightError

__all__ = [
    "IntegerInterval",
    "Side",
    "CoefficientField",
    "Tolerances",
    "ValidationReport",
    "symplectic_unit",
    "adjoint_side_coefficients",
    "gram_window",
    "validate_system",
    "random_field",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by all modules.

    ``rank_rtol`` is relative to the largest singular value (or Gram
    eigenvalue) of the matrix whose rank is being decided.
    """

    rank_rtol: float = 1e-9
    cond_max: float = 1e12
    angle: float = 1e-8
    residual: float = 1e-10
    boundary: float = 1e-9
    voc_rtol: float = 1e-9
    weight_atol: float = 1e-12
    summable_ratio: float = 1e-6

    def replace(self, **kwargs):
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        unknown = set(kwargs) - set(values)
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        values.update({k: float(v) for k, v in kwargs.items()})
        return Tolerances(**values)


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class IntegerInterval:
    """The integer interval ``[a, b]``.

    Per-site data live on ``a..b``; trajectories on ``a..b+1``.  When
    ``truncated`` is set the interval stands in for the half-line
    ``[a, ∞)``.
    """

    a: int
    b: int
    truncated: bool = False

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b:
            raise DimensionError("interval endpoints must be integers")
        if self.b < self.a:
            raise DimensionError(f"empty interval [{self.a}, {self.b}]")

    @property
    def n_sites(self):
        return self.b - self.a + 1

    @property
    def n_points(self):
        return self.b - self.a + 2

    @property
    def sites(self):
        return range(self.a, self.b + 1)

    @property
    def points(self):
        return range(self.a, self.b + 2)

    def contains(self, other):
        return self.a <= other.a and other.b <= self.b

    def __contains__(self, t):
        return self.a <= t <= self.b


class Side(enum.Enum):
    """Which of the two systems: ``ONE`` uses ``P``, ``TWO`` uses ``P*``."""

    ONE = 1
    TWO = 2

    @property
    def other(self):
        return Side.TWO if self is Side.ONE else Side.ONE


def symplectic_unit(n):
    """The canonical ``2n x 2n`` matrix ``J = [[0, -I], [I, 0]]``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]]).astype(complex)


def _per_site(name, value, n, n_sites):
    arr = np.asarray(value, dtype=complex)
    if arr.shape == (n, n):
        arr = np.broadcast_to(arr, (n_sites, n, n)).copy()
    if arr.shape != (n_sites, n, n):
        raise DimensionError(
            f"{name} has shape {arr.shape}, expected ({n}, {n}) or ({n_sites}, {n}, {n})"
        )
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Per-site blocks ``A, B, C, D, W1, W2`` of a system on ``interval``.

    Every block argument may be given either as a single ``n x n`` matrix
    (constant coefficients) or as an array of shape ``(n_sites, n, n)``.
    The weight blocks must be Hermitian positive semi-definite.
    """

    n: int
    interval: IntegerInterval
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    weight_atol: float = field(default=DEFAULT_TOL.weight_atol, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DimensionError(f"block size must be a positive integer, got {self.n}")
        if self.interval.b - self.interval.a < 1:
            raise DimensionError("a coefficient field needs b - a >= 1")
        m = self.interval.n_sites
        for name in ("A", "B", "C", "D", "W1", "W2"):
            object.__setattr__(self, name, _per_site(name, getattr(self, name), self.n, m))
        for name in ("W1", "W2"):
            w = getattr(self, name)
            scale = max(1.0, float(np.abs(w).max(initial=0.0)))
            herm = np.abs(w - np.conj(np.swapaxes(w, 1, 2))).max(initial=0.0)
            if herm > self.weight_atol * scale:
                raise WeightError(f"{name} is not Hermitian (defect {herm:.3e})")
            low = np.linalg.eigvalsh(w).min()
            if low < -self.weight_atol * scale:
                raise WeightError(f"{name} is indefinite (eigenvalue {low:.3e})")

    @classmethod
    def zeros(cls, n, interval, weight=1.0):
        """``P = 0`` and ``W = weight * I``."""
        zero = np.zeros((n, n))
        w = weight * np.eye(n)
        return cls(n, interval, zero, zero, zero, zero, w, w)

    # -- site access -------------------------------------------------------
    def index(self, t):
        if t not in self.interval:
            raise DimensionError(f"site {t} outside {self.interval}")
        return t - self.interval.a

    def blocks(self, t):
        i = self.index(t)
        return self.A[i], self.B[i], self.C[i], self.D[i], self.W1[i], self.W2[i]

    def P(self, t):
        A, B, C, D, _, _ = self.blocks(t)
        return np.block([[-C, D], [A, B]])

    def W(self, t):
        i = self.index(t)
        zero = np.zeros((self.n, self.n))
        return np.block([[self.W1[i], zero], [zero, self.W2[i]]])

    @cached_property
    def P_all(self):
        return np.block([[-self.C, self.D], [self.A, self.B]])

    @cached_property
    def W_all(self):
        zero = np.zeros_like(self.W1)
        return np.block([[self.W1, zero], [zero, self.W2]])

    def restrict(self, window):
        """The same coefficients on a sub-interval (needs at least two sites)."""
        if not self.interval.contains(window):
            raise DimensionError(f"{window} is not inside {self.interval}")
        sl = slice(window.a - self.interval.a, window.b - self.interval.a + 1)
        return CoefficientField(
            self.n, window, self.A[sl], self.B[sl], self.C[sl], self.D[sl],
            self.W1[sl], self.W2[sl], self.weight_atol,
        )

    def side(self, side):
        """Coefficients of system ``side``; ``Side.TWO`` is the adjoint system."""
        return self if side is Side.ONE else self.adjoint

    @cached_property
    def adjoint(self):
        return adjoint_side_coefficients(self)

    def is_hermitian(self, atol=1e-12):
        return bool(np.abs(self.P_all - np.conj(np.swapaxes(self.P_all, 1, 2))).max() <= atol)

    # -- (A1) --------------------------------------------------------------
    @cached_property
    def a1_conditions(self):
        """Condition numbers of ``I - A(t)`` and ``I - D(t)`` per site."""
        eye = np.eye(self.n)
        with np.errstate(divide="ignore", invalid="ignore"):
            ca = np.linalg.cond(eye - self.A)
            cd = np.linalg.cond(eye - self.D)
        ca = np.where(np.isfinite(ca), ca, np.inf)
        cd = np.where(np.isfinite(cd), cd, np.inf)
        return ca, cd

    def require_a1(self, cond_max=DEFAULT_TOL.cond_max):
        ca, cd = self.a1_conditions
        bad = np.flatnonzero((ca > cond_max) | (cd > cond_max))
        if bad.size:
            t = int(bad[0]) + self.interval.a
            raise SingularityError(f"(A1) fails at site {t}: I-A or I-D is singular", site=t)


def adjoint_side_coefficients(coeffs):
    """Coefficient field whose blocked matrix is ``P*``.

    Conjugate-transposing ``[[-C, D], [A, B]]`` and reading the blocks back
    gives ``A -> D*``, ``B -> B*``, ``C -> C*``, ``D -> A*``; weights are
    unchanged.  The map is an involution.
    """
    h = lambda m: np.conj(np.swapaxes(m, 1, 2))
    return CoefficientField(
        coeffs.n, coeffs.interval, h(coeffs.D), h(coeffs.B), h(coeffs.C), h(coeffs.A),
        coeffs.W1, coeffs.W2, coeffs.weight_atol,
    )


def gram_window(coeffs, side, lam, window, c0, tol=DEFAULT_TOL):
    """Window Gram matrix ``Σ_{t in window} R(Y)*(t) W(t) R(Y)(t)``.

    ``Y`` is the fundamental matrix of system ``side`` at spectral parameter
    ``lam`` normalised by ``Y(c0) = I``.  The result is ``2n x 2n``,
    Hermitian and positive semi-definite.
    """
    from .dynamics import fundamental_values

    if not coeffs.interval.contains(window):
        raise DimensionError(f"{window} is not inside {coeffs.interval}")
    if not window.a <= c0 <= window.b:
        raise DimensionError(f"c0={c0} is not inside {window}")
    Y = fundamental_values(coeffs, side, lam, c0, tol=tol)
    n = coeffs.n
    lo = window.a - coeffs.interval.a
    hi = window.b - coeffs.interval.a + 1
    RY = np.concatenate([Y[lo + 1:hi + 1, :n, :], Y[lo:hi, n:, :]], axis=1)
    W = coeffs.W_all[lo:hi]
    phi = np.einsum("tji,tjk,tkl->il", RY.conj(), W, RY)
    return 0.5 * (phi + phi.conj().T)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_system`."""

    a1: bool
    per_site: list
    phi_min_eig: list
    definite: bool
    smallest_passing_prefix: int | None
    verdict: str

    def to_dict(self):
        return {
            "a1": self.a1,
            "per_site": self.per_site,
            "phi_min_eig": self.phi_min_eig,
            "definite": self.definite,
            "smallest_passing_prefix": self.smallest_passing_prefix,
            "verdict": self.verdict,
        }


def _definite(phi, tol):
    eig = np.linalg.eigvalsh(phi)
    top = eig[-1]
    return eig[0], bool(top > 0 and eig[0] > tol.rank_rtol * top)


def validate_system(coeffs, window, lambdas=(0.0, 1j), c0=None, tol=DEFAULT_TOL):
    """Check (A1) on the whole interval and the definiteness surrogate on ``window``.

    The surrogate asks that the window Gram matrix of both systems be
    positive definite at every sampled spectral parameter.  Singular
    ``I - A`` or ``I - D`` is reported, not raised.
    """
    if not coeffs.interval.contains(window):
        raise DimensionError(f"{window} is not inside {coeffs.interval}")
    c0 = window.a if c0 is None else c0
    ca, cd = coeffs.a1_conditions
    per_site = []
    for i, t in enumerate(coeffs.interval.sites):
        per_site.append({
            "t": t,
            "cond_I_minus_A": float(ca[i]) if np.isfinite(ca[i]) else None,
            "cond_I_minus_D": float(cd[i]) if np.isfinite(cd[i]) else None,
            "invertible": bool(ca[i] <= tol.cond_max and cd[i] <= tol.cond_max),
        })
    a1 = all(s["invertible"] for s in per_site)

    phi_min = []
    definite = a1
    prefix = None
    if a1:
        for lam in lambdas:
            for side in Side:
                phi = gram_window(coeffs, side, lam, window, c0, tol)
                low, ok = _definite(phi, tol)
                definite &= ok
                phi_min.append({
                    "lambda": [float(np.real(lam)), float(np.imag(lam))],
                    "side": side.value,
                    "min_eig": float(low),
                    "definite": ok,
                })
        for k in range(window.n_sites):
            sub = IntegerInterval(window.a, window.a + k)
            if not sub.a <= c0 <= sub.b:
                continue
            if all(_definite(gram_window(coeffs, s, lam, sub, c0, tol), tol)[1]
                   for lam in lambdas for s in Side):
                prefix = k + 1
                break
    else:
        definite = False
    verdict = "pass" if (a1 and definite) else "fail"
    return ValidationReport(a1, per_site, phi_min, definite, prefix, verdict)


def random_field(n, interval, rng, rho=0.5, scale=0.4, hermitian=False, weight_spread=0.3):
    """Seeded random coefficients with ``||A(t)||, ||D(t)|| <= rho < 1``.

    The norm bound makes ``I - A`` and ``I - D`` invertible at every site.
    Weights are ``I + weight_spread * X X* / n``, hence positive definite.
    """
    if not 0 <= rho < 1:
        raise ValueError("rho must lie in [0, 1)")
    m = interval.n_sites

    def cplx(size):
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)

    def bounded(size):
        x = cplx(size)
        norms = np.linalg.norm(x, ord=2, axis=(1, 2))
        return x * (rho * rng.uniform(0.2, 1.0, size[0]) / norms)[:, None, None]

    shape = (m, n, n)
    A = bounded(shape)
    D = bounded(shape)
    B = scale * cplx(shape) / np.sqrt(2 * n)
    C = scale * cplx(shape) / np.sqrt(2 * n)
    if hermitian:
        B = 0.5 * (B + np.conj(np.swapaxes(B, 1, 2)))
        C = 0.5 * (C + np.conj(np.swapaxes(C, 1, 2)))
        D = np.conj(np.swapaxes(A, 1, 2))
    eye = np.eye(n)
    X1, X2 = cplx(shape), cplx(shape)
    W1 = eye + weight_spread * X1 @ np.conj(np.swapaxes(X1, 1, 2)) / (2 * n)
    W2 = eye + weight_spread * X2 @ np.conj(np.swapaxes(X2, 1, 2)) / (2 * n)
    W1 = 0.5 * (W1 + np.conj(np.swapaxes(W1, 1, 2)))
    W2 = 0.5 * (W2 + np.conj(np.swapaxes(W2, 1, 2)))
    return CoefficientField(n, interval, A, B, C, D, W1, W2)

"""
Truncation diagnostics for systems on the half-line ``[a, ∞)``.

A generator is any callable ``t -> (A, B, C, D, W1, W2)`` returning ``n x n``
blocks for a single site.  The scan counts square-summable solutions of
the doubled system at ``λ = ±i`` by watching which Gram eigenvalues settle
as the horizon grows; the criterion check evaluates the boundary form at
a far horizon on square-summable and compactly supported elements.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import _site_step, fundamental_values, patch_bvp, shift
from .errors import DimensionError, HamiltonianError
from .extensions import build_doubled
from .system import DEFAULT_TOL, CoefficientField, IntegerInterval, Side

__all__ = [
    "constant_generator",
    "free_generator",
    "decaying_weight_generator",
    "field_from_generator",
    "ScanReport",
    "halfline_deficiency_scan",
    "CriterionReport",
    "limit_point_criterion_check",
]


def constant_generator(A, B, C, D, W1, W2):
    blocks = tuple(np.asarray(m, dtype=complex) for m in (A, B, C, D, W1, W2))
    return lambda t: blocks


def free_generator(n):
    """``P ≡ 0``, ``W ≡ I``."""
    Z, I = np.zeros((n, n)), np.eye(n)
    return constant_generator(Z, Z, Z, Z, I, I)


def decaying_weight_generator(n, base=4.0):
    """``P ≡ 0``, ``W(t) = base^{-t} I``: every solution is square summable."""
    Z, I = np.zeros((n, n)), np.eye(n)
    return lambda t: (Z, Z, Z, Z, base ** (-float(t)) * I, base ** (-float(t)) * I)


def field_from_generator(gen, n, a, horizon):
    """Coefficient field on ``[a, horizon]`` (flagged as a half-line truncation)."""
    iv = IntegerInterval(a, horizon, truncated=True)
    try:
        sites = [gen(t) for t in iv.sites]
    except Exception as exc:  # surface generator faults uniformly
        raise HamiltonianError(f"coefficient generator failed: {exc}") from exc
    arrs = []
    for k in range(6):
        arr = np.array([np.asarray(s[k], dtype=complex) for s in sites])
        if arr.shape != (iv.n_sites, n, n):
            raise DimensionError(f"generator block {k} has shape {arr.shape[1:]}, expected ({n}, {n})")
        arrs.append(arr)
    return CoefficientField(n, iv, *arrs)


def _gram_spectrum(fld, side, lam, tol):
    """Squared singular values (ascending) of stacked ``W^{1/2} R(Y)(t)`` over the interval."""
    Y = fundamental_values(fld, side, lam, fld.interval.a, tol)
    RY = shift(Y)
    w, V = np.linalg.eigh(fld.W_all)
    root = np.einsum("tij,tj,tkj->tik", V, np.sqrt(np.clip(w, 0, None)), V.conj())
    Z = np.einsum("tij,tjk->tik", root, RY).reshape(-1, Y.shape[2])
    s = np.linalg.svd(Z, compute_uv=False)
    return np.sort(s ** 2)


def _stable_count(prev, cur, thresh):
    rel = np.abs(cur - prev) / np.where(cur > 0, cur, 1.0)
    return int(np.sum(rel < thresh))


@dataclass
class ScanReport:
    """Square-summable solution counts at each horizon.

    ``estimates[λ]`` lists, for horizons ``2..K``, the number of doubled-system
    Gram eigenvalues whose relative change since the previous horizon is
    below the threshold.  ``side_estimates`` does the same for the two
    ``2n`` systems separately.
    """

    n: int
    horizons: list
    lambdas: list
    spectra: dict
    estimates: dict
    side_estimates: dict
    threshold: float
    final: dict = field(default_factory=dict)

    @property
    def limit_point(self):
        return all(v == 2 * self.n for v in self.final.values())

    @property
    def verdict(self):
        return "limit point" if self.limit_point else "not limit point"

    def to_dict(self):
        return {
            "n": self.n,
            "horizons": list(self.horizons),
            "lambdas": [[float(np.real(l)), float(np.imag(l))] for l in self.lambdas],
            "spectra": {k: [list(map(float, s)) for s in v] for k, v in self.spectra.items()},
            "estimates": {k: list(v) for k, v in self.estimates.items()},
            "side_estimates": {k: {s: list(e) for s, e in v.items()} for k, v in self.side_estimates.items()},
            "threshold": self.threshold,
            "final": dict(self.final),
            "verdict": self.verdict,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "horizon", "singular_values", "estimate"])
        for k, spectra in self.spectra.items():
            for j, (T, s) in enumerate(zip(self.horizons, spectra)):
                est = self.estimates[k][j - 1] if j > 0 else ""
                w.writerow([k, T, " ".join(f"{np.sqrt(x):.12e}" for x in s), est])
        return buf.getvalue()


def _lam_key(lam):
    lam = complex(lam)
    return f"{lam.real:g}{lam.imag:+g}i"


def halfline_deficiency_scan(gen, n, horizons, lambdas=(1j, -1j), a=0, tol=DEFAULT_TOL):
    """Estimate the number of square-summable solutions of the doubled system.

    For each horizon ``T`` the doubled system is truncated to ``[a, T]``
    and the Gram eigenvalues of its fundamental matrix (``Y(a) = I``) are
    computed.  A direction counts as summable when its eigenvalue moves by
    less than ``tol.summable_ratio`` (relative) between consecutive horizons.
    The verdict is limit point when the final estimate is ``2n`` for every
    sampled λ.

    Horizons should stay moderate: growing solutions scale like
    ``ρ^T`` and squeeze the small eigenvalues against round-off.
    """
    horizons = sorted(int(h) for h in horizons)
    if len(horizons) < 3:
        raise ValueError("the scan needs at least three horizons")
    if horizons[0] <= a:
        raise ValueError("horizons must lie to the right of a")
    spectra, est, side_est, final = {}, {}, {}, {}
    for lam in lambdas:
        key = _lam_key(lam)
        per_T, per_side = [], {s.name: [] for s in Side}
        for T in horizons:
            fld = field_from_generator(gen, n, a, T)
            dbl = build_doubled(fld)
            per_T.append(_gram_spectrum(dbl.field, Side.ONE, lam, tol))
            for s in Side:
                per_side[s.name].append(_gram_spectrum(fld, s, lam, tol))
        spectra[key] = per_T
        est[key] = [_stable_count(per_T[j - 1], per_T[j], tol.summable_ratio)
                    for j in range(1, len(horizons))]
        side_est[key] = {
            s: [_stable_count(v[j - 1], v[j], tol.summable_ratio) for j in range(1, len(horizons))]
            for s, v in per_side.items()
        }
        final[key] = est[key][-1]
    return ScanReport(n, horizons, list(lambdas), spectra, est, side_est, tol.summable_ratio, final)


def _decaying_frame(fld, lam, k, rng):
    """Frame of ``k`` forward-decaying solutions, by backward subspace iteration with QR.

    Starting from a random frame at the far end, backward propagation
    pulls it onto the solutions that decay forward.  Returns values on the
    whole interval with ``y(a)`` orthonormal.
    """
    n2 = 2 * fld.n
    N = fld.interval.n_sites
    blocks = (fld.A, fld.B, fld.C, fld.D, fld.W1, fld.W2)
    X = np.linalg.qr(rng.standard_normal((n2, k)) + 1j * rng.standard_normal((n2, k)))[0]
    Qs = [None] * (N + 1)
    Rs = [None] * N
    Qs[N] = X
    for j in range(N - 1, -1, -1):
        Z = _site_step(*(b[j] for b in blocks), lam, Qs[j + 1], forward=False)
        Qs[j], Rs[j] = np.linalg.qr(Z)
    # y(t) = Q_t K_t with K_a = I and K_{t+1} = R_t^{-1} K_t
    vals = np.empty((N + 1, n2, k), dtype=complex)
    K = np.eye(k, dtype=complex)
    for j in range(N + 1):
        vals[j] = Qs[j] @ K
        if j < N:
            K = np.linalg.solve(Rs[j], K)
    return vals


def _l2_normalise(fld, vals, upto):
    R = shift(vals)[:upto]
    nrm = np.sqrt(np.einsum("tji,tjk,tki->i", R.conj(), fld.W_all[:upto], R).real)
    return vals / np.where(nrm > 0, nrm, 1.0)[None, None, :]


@dataclass
class CriterionReport:
    horizon: int
    trials: int
    max_form: float
    max_form_compact: float
    by_kind: dict
    scan_verdict: str
    verdict: str
    consistent: bool

    def to_dict(self):
        return {
            "horizon": self.horizon,
            "trials": self.trials,
            "max_form": self.max_form,
            "max_form_compact": self.max_form_compact,
            "by_kind": dict(self.by_kind),
            "scan_verdict": self.scan_verdict,
            "verdict": self.verdict,
            "consistent": self.consistent,
        }


def limit_point_criterion_check(gen, n, horizon=60, trials=20, a=0, scan=None, seed=0,
                                threshold=1e-6, tol=DEFAULT_TOL):
    """Largest ``|y2*(T) J y1(T)|`` over sampled elements of the doubled maximal domain.

    Elements are square-summable solutions at ``λ = ±i`` (normalised in
    ``ℓ²_W`` over ``[a, T]``) and compactly supported forced solutions from
    the patch construction.  When the scan says every solution is summable
    the forward fundamental matrix is used instead of the decaying frame.
    The verdict is limit point when the largest value is at most
    ``threshold``.
    """
    if scan is None:
        hz = [max(a + 6, 6), max(a + 9, 9), max(a + 12, 12), max(a + 15, 15)]
        scan = halfline_deficiency_scan(gen, n, hz, a=a, tol=tol)
    rng = np.random.default_rng(seed)
    far = a + 2 * (horizon - a) + 10
    fld = field_from_generator(gen, n, a, far)
    dbl = build_doubled(fld).field
    m = 4 * n
    j_T = horizon - a
    J = np.block([[np.zeros((2 * n, 2 * n)), -np.eye(2 * n)], [np.eye(2 * n), np.zeros((2 * n, 2 * n))]])
    frames = {}
    for lam in (1j, -1j):
        k = scan.final.get(_lam_key(lam), 2 * n)
        if k >= m:
            vals = fundamental_values(dbl, Side.ONE, lam, a, tol)
        else:
            vals = _decaying_frame(dbl, lam, max(k, 1), rng)
        frames[_lam_key(lam)] = _l2_normalise(dbl, vals, horizon - a + 1)

    # compactly supported elements: patch solutions on [a, k] with y(k+1) = 0
    s, kk = a, min(horizon - 2, a + 6)
    window = IntegerInterval(s, kk)
    compact = []
    for _ in range(2):
        alpha = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        _, y = patch_bvp(Side.ONE, dbl, window, alpha, np.zeros(m), tol)
        full = np.zeros((fld.interval.n_points, m), dtype=complex)
        full[s - a:kk - a + 2] = y.values
        compact.append(full)
    compact = np.stack(compact, axis=2)

    pools = {"summable(+i)": frames[_lam_key(1j)], "summable(-i)": frames[_lam_key(-1j)],
             "compact": compact}
    names = list(pools)
    by_kind = {}
    overall = 0.0
    for t in range(trials):
        i1, i2 = names[t % 3], names[(t // 3) % 3]
        P1, P2 = pools[i1], pools[i2]
        c1 = rng.standard_normal(P1.shape[2]) + 1j * rng.standard_normal(P1.shape[2])
        c2 = rng.standard_normal(P2.shape[2]) + 1j * rng.standard_normal(P2.shape[2])
        c1 /= np.linalg.norm(c1)
        c2 /= np.linalg.norm(c2)
        y1 = P1[j_T] @ c1
        y2 = P2[j_T] @ c2
        val = float(abs(y2.conj() @ J @ y1))
        key = f"{i2}|{i1}"
        by_kind[key] = max(by_kind.get(key, 0.0), val)
        overall = max(overall, val)
    comp = max((v for k, v in by_kind.items() if k == "compact|compact"), default=0.0)
    verdict = "limit point" if overall <= threshold else "not limit point"
    return CriterionReport(horizon, trials, overall, comp, by_kind, scan.verdict, verdict,
                           verdict == scan.verdict)

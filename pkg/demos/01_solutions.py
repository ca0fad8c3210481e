"""
Solutions of a non-Hermitian discrete Hamiltonian system
========================================================

Propagates a random system and its adjoint, checks the conservation law
linking their fundamental matrices, and solves a forced problem three ways:
by recursion, by variation of constants, and as a two-point boundary problem.
"""

import numpy as np

from hamext import (
    IntegerInterval,
    Side,
    fundamental_matrix,
    lagrange_report,
    patch_bvp,
    random_field,
    solve_forced_ivp,
    solve_voc,
    symplectic_unit,
    system_residual,
    validate_system,
)

rng = np.random.default_rng(0)
n = 2
f = random_field(n, IntegerInterval(0, 11), rng)

print("Coefficient field")
print("-" * 40)
rep = validate_system(f, IntegerInterval(0, 3), lambdas=(0, 1j))
print(f"  n = {n}, sites {f.interval.a}..{f.interval.b}")
print(f"  Hermitian coefficients: {f.is_hermitian()}")
print(f"  invertibility and definiteness: {rep.verdict}")

# Y1(t, λ) and Y2(t, conj λ) are tied together by Y2* J Y1 = J
print("\nConservation law")
print("-" * 40)
lam = 0.5 + 1j
J = symplectic_unit(n)
Y1 = fundamental_matrix(Side.ONE, f, lam, c0=0)
Y2 = fundamental_matrix(Side.TWO, f, np.conj(lam), c0=0)
for t in (0, 4, 8, 12):
    M = Y2(t).conj().T @ J @ Y1(t)
    size = np.linalg.norm(Y1(t), 2) * np.linalg.norm(Y2(t), 2)
    # round-off grows with the solutions, so the error is measured against their size
    print(f"  t = {t:2d}: |Y1| |Y2| = {size:9.2e}, "
          f"|Y2* J Y1 - J| / (1 + |Y1| |Y2|) = {np.linalg.norm(M - J, 2) / (1 + size):.1e}")

print("\nForced problem")
print("-" * 40)
m = f.interval.n_points
g = rng.standard_normal((m, 2 * n)) + 1j * rng.standard_normal((m, 2 * n))
y0 = rng.standard_normal(2 * n) + 0j
y = solve_forced_ivp(Side.ONE, f, lam, g, 0, y0)
yv = solve_voc(Side.ONE, f, lam, g, 0, y0)
res, scale = system_residual(Side.ONE, f, lam, y, g)
print(f"  residual of the recursion:            {res.max() / scale:.1e}")
print(f"  recursion vs variation of constants:  "
      f"{np.linalg.norm(y.values - yv.values) / np.linalg.norm(y.values):.1e}")

# a forced pair on each side satisfies the summed Lagrange identity
x = solve_forced_ivp(Side.ONE, f, 0.0, g, 0, y0)
h = rng.standard_normal((m, 2 * n)) + 0j
z = solve_forced_ivp(Side.TWO, f, 0.0, h, 0, y0)
lag = lagrange_report(f, x, g, z, h)
print(f"  Lagrange identity: sum = {lag.lhs:.4f}, boundary = {lag.rhs:.4f}")

print("\nTwo-point problem on a window")
print("-" * 40)
window = IntegerInterval(3, 7)
alpha = np.array([1, 0, 0, 0], dtype=complex)
beta = np.array([0, 0, 1j, 0], dtype=complex)
gp, yp = patch_bvp(Side.ONE, f, window, alpha, beta)
print(f"  y(3)  = {np.round(yp(3), 12)}")
print(f"  y(8)  = {np.round(yp(8), 12)}")
res, scale = system_residual(Side.ONE, f.restrict(window), 0.0, yp, gp)
print(f"  residual on the window: {res.max() / scale:.1e}")

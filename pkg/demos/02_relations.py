"""
Maximal and minimal relations and their extensions
==================================================

Builds the weighted space L²_W on a finite interval, the maximal and minimal
relations of a system and of its adjoint, and counts boundary conditions.
An extension fixed by a boundary subspace Qc of C^{4n} is quasi
self-adjoint exactly when dim Qc = 2n; it is self-adjoint only when Qc is
Lagrangian for the boundary form.
"""

import numpy as np

from hamext import (
    BoundarySubspace,
    IntegerInterval,
    Side,
    adjoint,
    build_relation_set,
    build_space,
    classify_pair,
    q_star,
    random_field,
    verify_qstar_adjoint,
)
from hamext.extensions import boundary_adjoint, representative_domain

rng = np.random.default_rng(1)
n = 1
f = random_field(n, IntegerInterval(0, 5), rng)
space = build_space(f)
s1 = build_relation_set(Side.ONE, f, space)
s2 = build_relation_set(Side.TWO, f, space)

print("Weighted space and relations")
print("-" * 40)
print(f"  trajectory space dimension {space.ambient_dim}, L²_W dimension {space.rank}")
print(f"  dim H1 = {s1.H.dim}, dim H1,0 = {s1.H0.dim}")
print(f"  H1,0 from boundary zeros equals H1,0 from compact support: {s1.H0.equals(s1.H00)}")
print(f"  adjoint(H1,0) = H2: {adjoint(s1.H0).equals(s2.H)}")
print(f"  adjoint(H2,0) = H1: {adjoint(s2.H0).equals(s1.H)}")

print("\nExtensions T(Qc) = {(y, g) in H1 : (y(a), y(b+1)) in Qc}")
print("-" * 40)
dom = representative_domain(s1, s2)
eye = np.eye(4 * n)
examples = {
    "Qc = 0 (minimal)": BoundarySubspace.zero(4 * n),
    "random, dim 1": BoundarySubspace.span(rng.standard_normal(4 * n)),
    "random, dim 2": BoundarySubspace.span(rng.standard_normal((4 * n, 2))),
    "u(a) = u(b+1) = 0": BoundarySubspace(eye[:, [1, 3]]),
    "random, dim 3": BoundarySubspace.span(rng.standard_normal((4 * n, 3))),
}
print(f"  {'boundary subspace':22s} {'D(K)/D(T)':>10s} {'D(K*)/D(S)':>11s}  quasi  Lagrangian")
for name, Qc in examples.items():
    rep = classify_pair(s1.H0, s2.H0, s1.extension(Qc), domain=dom, operator_part="membership")
    lag = boundary_adjoint(Qc).equals(Qc)
    print(f"  {name:22s} {rep.dims['D(K)/D(T)']:>10d} {rep.dims['D(K*)/D(S)']:>11d}"
          f"  {str(rep.quasi_self_adjoint):5s}  {lag}")

print("\nLeft-end conditions and Q*")
print("-" * 40)
sets = (s1, s2)
for Q in (BoundarySubspace.span([1, 0]), BoundarySubspace.span([1, 1j])):
    rep = verify_qstar_adjoint(f, Q, sets)
    print(f"  Q = span{np.round(Q.basis[:, 0], 3)} -> Q* = span{np.round(q_star(Q).basis[:, 0], 3)}, "
          f"adjoint law holds: {rep.passed} (angle {rep.max_angle:.1e})")

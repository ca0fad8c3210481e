"""
The doubled formally self-adjoint system
========================================

A system and its adjoint combine into a 4n-dimensional Hermitian system.
Relations of the pair generate relations of the doubled system.  For a
quasi self-adjoint T the generated relation is self-adjoint.  On a finite
interval the generated relation turns out to be self-adjoint for every
proper extension, so self-adjointness of the doubled relation does not
detect quasi self-adjointness of T.
"""

import numpy as np

from hamext import (
    IntegerInterval,
    Side,
    build_doubled,
    build_relation_set,
    build_space,
    correspondence_check,
    random_field,
)
from hamext.extensions import boundary_family

rng = np.random.default_rng(2)
f = random_field(1, IntegerInterval(0, 3), rng)
dbl = build_doubled(f)
P = dbl.field.P_all

print("Doubled coefficients")
print("-" * 40)
print(f"  doubled P exactly Hermitian: {np.array_equal(P, np.conj(np.swapaxes(P, 1, 2)))}")
W = dbl.field.W_all
blocks = [W[:, 0:1, 0:1], W[:, 1:2, 1:2], W[:, 2:3, 2:3], W[:, 3:4, 3:4]]
print(f"  doubled weight is diag(W1, W1, W2, W2): "
      f"{all(np.array_equal(b, w) for b, w in zip(blocks, (f.W1, f.W1, f.W2, f.W2)))}")

space = build_space(f)
sets = (build_relation_set(Side.ONE, f, space), build_relation_set(Side.TWO, f, space))

print("\nExtensions and their doubled relations")
print("-" * 40)
print(f"  {'dim Qc':>6s}  quasi  doubled self-adjoint  extends doubled minimal")
for Qc in boundary_family(4, 10, rng):
    rep = correspondence_check(f, Qc, sets=sets, dbl=dbl)
    print(f"  {Qc.dim:>6d}  {str(rep.quasi_self_adjoint):5s}  {str(rep.bold_self_adjoint):20s}"
          f"  {rep.bold_extends_minimal}")
print(f"\n  norm additivity |y|² = |y1|² + |y2|²: gap {rep.norm_additivity:.1e}")
print(f"  trivial intersections: {rep.trivial_intersections}")
print(f"  minimal relation: {rep.corollary}")

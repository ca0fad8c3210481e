"""
Half-line classification by truncation
======================================

For the free system (P = 0, W = I) the transfer matrix at λ = i has
eigenvalues (3 ± √5)/2, so each half-system has one decaying solution and
the doubled system has 2n square-summable solutions: limit point.  With
weights W(t) = 4^{-t} every solution is summable.
"""

import numpy as np

from hamext import (
    decaying_weight_generator,
    free_generator,
    halfline_deficiency_scan,
    limit_point_criterion_check,
)

T = np.array([[1, 1j], [-1j, 2]])
print("Transfer matrix of the free system at λ = i")
print("-" * 40)
print(f"  eigenvalues {np.sort(np.linalg.eigvals(T).real)}")

horizons = [6, 9, 12, 15]
for name, gen in (("free system", free_generator(1)), ("decaying weight", decaying_weight_generator(1))):
    scan = halfline_deficiency_scan(gen, 1, horizons)
    crit = limit_point_criterion_check(gen, 1, horizon=60, scan=scan)
    print(f"\n{name}")
    print("-" * 40)
    for key, est in scan.estimates.items():
        print(f"  λ = {key:6s} summable-solution estimates over horizons {horizons[1:]}: {est}")
    print(f"  scan verdict: {scan.verdict}")
    print(f"  largest |y2* J y1| at t = 60: {crit.max_form:.1e} -> {crit.verdict}")

print("\nScan table (CSV)")
print("-" * 40)
print(halfline_deficiency_scan(free_generator(1), 1, horizons).to_csv())

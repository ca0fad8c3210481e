"""Seeded instance factories shared by the test modules."""

import numpy as np

from hamext import IntegerInterval, Side, build_space, random_field
from hamext.extensions import build_relation_set


def cvec(rng, size):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def instance(k, lo=4, hi=20, n=None, hermitian=False, base=1000):
    """Seeded random field number ``k``: n cycles 1..3, sites drawn from lo..hi."""
    rng = np.random.default_rng(base + k)
    n = 1 + k % 3 if n is None else n
    sites = int(rng.integers(lo, hi + 1))
    a = int(rng.integers(-3, 4))
    f = random_field(n, IntegerInterval(a, a + sites - 1), rng, hermitian=hermitian)
    return f, rng


def relation_sets(f):
    space = build_space(f)
    return (build_relation_set(Side.ONE, f, space), build_relation_set(Side.TWO, f, space))


def scaled_gap(a, b):
    return np.abs(a - b).max() / max(1.0, np.abs(b).max())

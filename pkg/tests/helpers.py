"""Shared oracles and small utilities for the test suite.

The finite-difference oracle here is deliberately independent of the jet
machinery: it only ever calls the function under test on plain float
coordinates.
"""

from __future__ import annotations


def fd_directional(fn, coords, direction, h=1e-5):
    """Central finite difference of a scalar function along one direction."""
    zp = [c + h * d for c, d in zip(coords, direction)]
    zm = [c - h * d for c, d in zip(coords, direction)]
    return (fn(zp) - fn(zm)) / (2.0 * h)


def fd_mixed(fn, coords, directions, h=1e-4):
    """Mixed directional derivative via nested central differences.

    Accuracy degrades quickly with order; callers pick h and tolerance per
    order (see the derivative-substrate tests).
    """
    if len(directions) == 1:
        return fd_directional(fn, coords, directions[0], h)

    def inner(z):
        return fd_mixed(fn, z, directions[1:], h)

    return fd_directional(inner, coords, directions[0], h)


def fd_vector(fn, coords, direction, h=1e-6):
    """Central finite difference of a vector-valued function."""
    zp = [c + h * d for c, d in zip(coords, direction)]
    zm = [c - h * d for c, d in zip(coords, direction)]
    fp, fm = fn(zp), fn(zm)
    return [(a - b) / (2.0 * h) for a, b in zip(fp, fm)]


def maxabs(values):
    return max(abs(v) for v in values) if values else 0.0


def frame(n2, a):
    v = [0.0] * n2
    v[a] = 1.0
    return v

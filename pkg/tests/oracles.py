"""Independent oracles used by the test suite.

Everything here recomputes expected values by brute force (pointwise
overlays, exhaustive subset enumeration, candidate scans, closed-form
antiderivatives) without touching the library code paths under test.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from bochner import evaluate, measures as ms


def merged_grid(*maps):
    """All breakpoints of the given interval maps, sorted."""
    pts = {0.0, 1.0}
    for m in maps:
        pts.update(float(b) for b in m.breaks)
    return sorted(pts)


def pointwise_l1(s, t):
    """int ||s - t|| via pointwise evaluation on the merged grid."""
    if s.space.kind == ms.DISCRETE:
        return math.fsum(
            w * _norm_of(s, evaluate(s, i).components, evaluate(t, i).components)
            for i, w in enumerate(s.space.weights)
        )
    grid = merged_grid(s, t)
    total = 0.0
    acc = []
    for a, b in zip(grid[:-1], grid[1:]):
        x = (a + b) / 2.0
        acc.append((b - a) * _norm_of(s, evaluate(s, x).components,
                                      evaluate(t, x).components))
    return s.space.total_mass * math.fsum(acc)


def _norm_of(s, u, v):
    diff = [a - b for a, b in zip(u, v)]
    moduli = [abs(c) for c in diff]
    vs = s.value_space
    if vs.dim == 1:
        return moduli[0]
    if vs.norm_tag == "one":
        return math.fsum(moduli)
    if vs.norm_tag == "inf":
        return max(moduli)
    return math.hypot(*moduli)


def ky_fan_scan(s, t):
    """Exhaustive candidate scan for inf{eps : mu(||s-t|| >= eps) <= eps}."""
    if s.space.kind == ms.DISCRETE:
        pieces = [
            (w, _norm_of(s, evaluate(s, i).components, evaluate(t, i).components))
            for i, w in enumerate(s.space.weights)
        ]
    else:
        grid = merged_grid(s, t)
        pieces = [
            ((b - a) * s.space.total_mass,
             _norm_of(s, evaluate(s, (a + b) / 2).components,
                      evaluate(t, (a + b) / 2).components))
            for a, b in zip(grid[:-1], grid[1:])
        ]

    def tail(c, strict):
        return math.fsum(m for m, h in pieces if (h > c if strict else h >= c))

    candidates = sorted({0.0} | {h for _, h in pieces}
                        | {tail(h, strict=False) for _, h in pieces})
    for c in candidates:
        if tail(c, strict=True) <= c:
            return c
    return max(h for _, h in pieces)


def knapsack_exhaustive(weights, levels, delta):
    """Exact best restricted integral over atom subsets with mu(A) <= delta.

    Exhaustive enumeration in exact rational arithmetic; returns the optimal
    value (as a float) and the lexicographically smallest optimal atom set.
    """
    n = len(weights)
    w = [Fraction(float(x)) for x in weights]
    p = [Fraction(float(v)) * wi for v, wi in zip(levels, w)]
    cap = Fraction(float(delta))
    best_val = Fraction(-1)
    best_atoms = ()
    for mask in range(1 << n):
        atoms = [i for i in range(n) if mask >> i & 1]
        if sum((w[i] for i in atoms), Fraction(0)) > cap:
            continue
        val = sum((p[i] for i in atoms), Fraction(0))
        if val > best_val:
            best_val = val
            best_atoms = tuple(atoms)
    return float(best_val), best_atoms


def abs_linear_cell_integral(a, b, c):
    """int_a^b |x - c| dx in closed form."""
    if c <= a:
        return ((b - c) ** 2 - (a - c) ** 2) / 2.0
    if c >= b:
        return ((c - a) ** 2 - (c - b) ** 2) / 2.0
    return ((c - a) ** 2 + (b - c) ** 2) / 2.0


def l1_to_identity(s):
    """Exact int |s(x) - x| for a scalar real step map (per-cell closed form)."""
    acc = []
    for i in range(s.vals.shape[0]):
        a = float(s.breaks[i])
        b = float(s.breaks[i + 1])
        c = s.vals[i, 0].real
        acc.append(abs_linear_cell_integral(a, b, c))
    return s.space.total_mass * math.fsum(acc)


def monomial_integral(k):
    """int_0^1 x^k dx."""
    return 1.0 / (k + 1)


def interval_worst_candidates(weights_map, delta):
    """Brute force over candidate level sets: take the top-value pieces and
    split the boundary piece fractionally, trying every split position."""
    h = weights_map.vals[:, 0].real
    masses = np.diff(weights_map.breaks) * weights_map.space.total_mass
    order = sorted(range(h.size), key=lambda i: (-h[i], i))
    best = 0.0
    for cut in range(len(order) + 1):
        budget = delta
        val = 0.0
        for j in order[:cut]:
            take = min(budget, masses[j])
            val += h[j] * take
            budget -= take
            if budget <= 0:
                break
        best = max(best, val)
    return best

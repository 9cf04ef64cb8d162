"""Finite measure spaces, canonical measurable sets, partitions, worst sets.

Two computable presentations are supported:

* ``interval`` -- a multiple of Lebesgue measure on [0, 1).  Atomless, so
  worst-set extraction may split cells fractionally.
* ``discrete`` -- finitely many weighted atoms (0-indexed).

Measurable sets are kept in a unique canonical form (sorted disjoint
non-adjacent half-open intervals, or sorted atom tuples) so set algebra and
equality are exact.  Dyadic interval endpoints keep measures exact in binary
floating point; the scenario layer defaults to dyadic grids.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from .errors import DomainError, StructuralError

if TYPE_CHECKING:  # pragma: no cover
    from .simple import SimpleMap

INTERVAL = "interval"
DISCRETE = "discrete"

#: Discrete spaces at or below this atom count get exact worst-set search.
EXACT_SEARCH_ATOM_LIMIT = 20

#: Partition validation: |sum of cell measures - total mass| must stay below.
ADDITIVITY_TOL = 1e-12


@dataclass(frozen=True)
class MeasureSpace:
    kind: str
    total_mass: float = 0.0
    weights: tuple[float, ...] = ()


@dataclass(frozen=True)
class MeasurableSet:
    kind: str
    intervals: tuple[tuple[float, float], ...] = ()
    atoms: tuple[int, ...] = ()

    def is_empty(self) -> bool:
        return not self.intervals and not self.atoms


@dataclass(frozen=True)
class Partition:
    space: MeasureSpace
    cells: tuple[MeasurableSet, ...]


@dataclass(frozen=True)
class WorstSubset:
    """Result of worst-set extraction: the set, its restricted integral, and
    whether the value is exact or only a greedy lower bound."""

    subset: MeasurableSet
    value: float
    exact: bool


# ---------------------------------------------------------------------------
# spaces


def interval_space(total_mass: float = 1.0) -> MeasureSpace:
    """``total_mass`` times Lebesgue measure on [0, 1)."""
    m = float(total_mass)
    if not math.isfinite(m) or m < 0.0:
        raise DomainError(f"total mass must be finite and nonnegative, got {total_mass!r}")
    return MeasureSpace(INTERVAL, total_mass=m)


def discrete_space(weights) -> MeasureSpace:
    """Finitely many atoms with the given nonnegative weights."""
    ws = tuple(float(w) for w in weights)
    if not ws:
        raise DomainError("a discrete space needs at least one atom")
    for i, w in enumerate(ws):
        if not math.isfinite(w) or w < 0.0:
            raise DomainError(f"atom weight {i} must be finite and nonnegative, got {w!r}")
    return MeasureSpace(DISCRETE, total_mass=math.fsum(ws), weights=ws)


def space_mass(space: MeasureSpace) -> float:
    return space.total_mass


# ---------------------------------------------------------------------------
# canonical sets


def interval_set(pairs) -> MeasurableSet:
    """Canonical union of half-open intervals [a, b) within [0, 1].

    Input pairs may overlap or touch; the result is sorted, disjoint, and
    merged where adjacent, which makes the representation unique.
    """
    cleaned = []
    for a, b in pairs:
        a = float(a)
        b = float(b)
        if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
            raise DomainError(f"interval endpoints must lie in [0, 1], got [{a}, {b})")
        if a > b:
            raise DomainError(f"interval endpoints out of order: [{a}, {b})")
        if a < b:
            cleaned.append((a, b))
    cleaned.sort()
    merged: list[list[float]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return MeasurableSet(INTERVAL, intervals=tuple((a, b) for a, b in merged))


def atom_set(indices) -> MeasurableSet:
    """Canonical (sorted, deduplicated) set of atom indices."""
    idx = sorted(set(int(i) for i in indices))
    for i in idx:
        if i < 0:
            raise DomainError(f"atom indices must be nonnegative, got {i}")
    return MeasurableSet(DISCRETE, atoms=tuple(idx))


def empty_set(space: MeasureSpace) -> MeasurableSet:
    return MeasurableSet(space.kind)


def full_set(space: MeasureSpace) -> MeasurableSet:
    if space.kind == INTERVAL:
        return MeasurableSet(INTERVAL, intervals=((0.0, 1.0),))
    return MeasurableSet(DISCRETE, atoms=tuple(range(len(space.weights))))


def _check_kind(space: MeasureSpace, s: MeasurableSet) -> None:
    if s.kind != space.kind:
        raise StructuralError(f"{s.kind} set used with {space.kind} space")
    if s.kind == DISCRETE and s.atoms and s.atoms[-1] >= len(space.weights):
        raise StructuralError(
            f"atom {s.atoms[-1]} outside space with {len(space.weights)} atoms"
        )


def measure(space: MeasureSpace, s: MeasurableSet) -> float:
    """Evaluate the measure of a canonical set."""
    _check_kind(space, s)
    if space.kind == INTERVAL:
        return space.total_mass * math.fsum(b - a for a, b in s.intervals)
    return math.fsum(space.weights[i] for i in s.atoms)


def contains_point(s: MeasurableSet, x: float) -> bool:
    """Membership of a point in a canonical interval set."""
    flat = [e for ab in s.intervals for e in ab]
    return bisect.bisect_right(flat, x) % 2 == 1


# ---------------------------------------------------------------------------
# set algebra


def union(space: MeasureSpace, a: MeasurableSet, b: MeasurableSet) -> MeasurableSet:
    _check_kind(space, a)
    _check_kind(space, b)
    if space.kind == INTERVAL:
        return interval_set(a.intervals + b.intervals)
    return atom_set(a.atoms + b.atoms)


def intersect(space: MeasureSpace, a: MeasurableSet, b: MeasurableSet) -> MeasurableSet:
    _check_kind(space, a)
    _check_kind(space, b)
    if space.kind == DISCRETE:
        return atom_set(set(a.atoms) & set(b.atoms))
    out = []
    i = j = 0
    ia, ib = a.intervals, b.intervals
    while i < len(ia) and j < len(ib):
        lo = max(ia[i][0], ib[j][0])
        hi = min(ia[i][1], ib[j][1])
        if lo < hi:
            out.append((lo, hi))
        if ia[i][1] <= ib[j][1]:
            i += 1
        else:
            j += 1
    return MeasurableSet(INTERVAL, intervals=tuple(out))


def complement(space: MeasureSpace, a: MeasurableSet) -> MeasurableSet:
    _check_kind(space, a)
    if space.kind == DISCRETE:
        return atom_set(set(range(len(space.weights))) - set(a.atoms))
    out = []
    prev = 0.0
    for lo, hi in a.intervals:
        if prev < lo:
            out.append((prev, lo))
        prev = hi
    if prev < 1.0:
        out.append((prev, 1.0))
    return MeasurableSet(INTERVAL, intervals=tuple(out))


def difference(space: MeasureSpace, a: MeasurableSet, b: MeasurableSet) -> MeasurableSet:
    return intersect(space, a, complement(space, b))


_COMBINE_OPS = {
    "union": union,
    "intersect": intersect,
    "difference": difference,
}


def combine(space: MeasureSpace, op: str, a: MeasurableSet, b: MeasurableSet | None = None) -> MeasurableSet:
    """Dispatching set algebra; ``complement`` takes a single operand."""
    if op == "complement":
        if b is not None:
            raise StructuralError("complement takes a single operand")
        return complement(space, a)
    fn = _COMBINE_OPS.get(op)
    if fn is None:
        raise StructuralError(f"unknown set operation {op!r}")
    if b is None:
        raise StructuralError(f"{op} takes two operands")
    return fn(space, a, b)


def subset_of(space: MeasureSpace, a: MeasurableSet, b: MeasurableSet) -> bool:
    """Exact inclusion on canonical forms."""
    return intersect(space, a, b) == a


# ---------------------------------------------------------------------------
# partitions


def _cell_key(s: MeasurableSet):
    if s.kind == INTERVAL:
        return s.intervals[0][0] if s.intervals else -1.0
    return s.atoms[0] if s.atoms else -1


def partition(space: MeasureSpace, cells) -> Partition:
    """Validated partition of the whole space into disjoint canonical cells.

    Disjointness and coverage are checked exactly on canonical forms, and
    additivity of measures is checked to within ``ADDITIVITY_TOL``.
    """
    cs = tuple(cells)
    if not cs:
        raise StructuralError("a partition needs at least one cell")
    for c in cs:
        _check_kind(space, c)
        if c.is_empty():
            raise StructuralError("partitions may not contain empty cells")
    for a, b in itertools.combinations(cs, 2):
        if not intersect(space, a, b).is_empty():
            raise StructuralError("partition cells overlap")
    total = cs[0]
    for c in cs[1:]:
        total = union(space, total, c)
    if total != full_set(space):
        raise StructuralError("partition cells do not cover the whole space")
    gap = abs(math.fsum(measure(space, c) for c in cs) - space.total_mass)
    if gap > ADDITIVITY_TOL * max(1.0, space.total_mass):
        raise StructuralError(f"partition measures are not additive (gap {gap:.3e})")
    return Partition(space, tuple(sorted(cs, key=_cell_key)))


def refine_common(p: Partition, q: Partition) -> Partition:
    """Coarsest partition refining both inputs (empty overlaps dropped)."""
    if p.space != q.space:
        raise StructuralError("partitions live on different spaces")
    cells = []
    for a in p.cells:
        for b in q.cells:
            c = intersect(p.space, a, b)
            if not c.is_empty():
                cells.append(c)
    return partition(p.space, cells)


def partitions_equal_ae(p: Partition, q: Partition) -> bool:
    """Equality of partitions ignoring zero-measure cells."""
    strip = lambda part: sorted(
        (c for c in part.cells if measure(part.space, c) > 0.0), key=_cell_key
    )
    return p.space == q.space and strip(p) == strip(q)


# ---------------------------------------------------------------------------
# worst-set extraction


def _scalar_levels(weights_map: "SimpleMap"):
    """Nonnegative real levels of a scalar map, validated."""
    vals = weights_map.vals[:, 0]
    im = abs(vals.imag).max() if vals.size else 0.0
    if im > 1e-12:
        raise DomainError("worst_subset needs a real scalar map")
    re = vals.real.copy()
    if re.size and re.min() < -1e-12:
        raise DomainError("worst_subset needs nonnegative values")
    re[re < 0.0] = 0.0
    return re


def worst_subset(space: MeasureSpace, weights_map: "SimpleMap", delta: float) -> WorstSubset:
    """sup over A with mu(A) <= delta of the restricted integral of a
    nonnegative scalar simple map.

    Interval spaces are atomless, so the boundary cell is split fractionally
    and the returned value is the exact supremum.  Discrete atoms cannot be
    split: up to ``EXACT_SEARCH_ATOM_LIMIT`` atoms the maximum over atom
    subsets is found exactly (meet-in-the-middle over exact rationals);
    beyond that a density greedy is used and flagged as a lower bound.
    """
    if delta <= 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    if weights_map.space != space:
        raise StructuralError("weights map lives on a different space")
    if weights_map.value_space.dim != 1:
        raise StructuralError("worst_subset needs a scalar map")
    levels = _scalar_levels(weights_map)

    if space.kind == INTERVAL:
        return _worst_interval(space, weights_map, levels, delta)
    return _worst_discrete(space, levels, delta)


def _worst_interval(space, weights_map, levels, delta) -> WorstSubset:
    import numpy as np

    breaks = weights_map.breaks
    lengths = np.diff(breaks)
    masses = lengths * space.total_mass
    order = np.argsort(-levels, kind="stable")
    budget = delta
    chosen: list[tuple[float, float]] = []
    acc: list[float] = []
    for i in order:
        if budget <= 0.0 or levels[i] <= 0.0:
            break
        a = float(breaks[i])
        b = float(breaks[i + 1])
        m = float(masses[i])
        if m <= budget:
            chosen.append((a, b))
            acc.append(levels[i] * m)
            budget -= m
        else:
            if space.total_mass > 0.0:
                frac_len = budget / space.total_mass
                chosen.append((a, a + frac_len))
                acc.append(levels[i] * budget)
            budget = 0.0
            break
    return WorstSubset(interval_set(chosen), math.fsum(acc), True)


def _enumerate_half(weights, profits):
    """All subsets of one half as (weight, profit, mask), exact rationals."""
    n = len(weights)
    out = [(Fraction(0), Fraction(0), 0)]
    for mask in range(1, 1 << n):
        low = mask & -mask
        i = low.bit_length() - 1
        w, p, _ = out[mask ^ low]
        out.append((w + weights[i], p + profits[i], mask))
    return out


def _worst_discrete(space, levels, delta) -> WorstSubset:
    n = len(space.weights)
    w = [Fraction(x) for x in space.weights]
    # profit of an atom is value * weight, exactly
    p = [Fraction(float(v)) * wi for v, wi in zip(levels, w)]
    cap = Fraction(float(delta))

    if n <= EXACT_SEARCH_ATOM_LIMIT:
        half = n // 2
        left = _enumerate_half(w[:half], p[:half])
        right = _enumerate_half(w[half:], p[half:])
        right.sort(key=lambda t: (t[0], t[2]))
        # prefix best profit over right subsets ordered by weight
        best_prof = []
        best_mask = []
        cur_p, cur_m = Fraction(-1), 0
        for wr, pr, mr in right:
            if pr > cur_p:
                cur_p, cur_m = pr, mr
            best_prof.append(cur_p)
            best_mask.append(cur_m)
        rweights = [t[0] for t in right]
        best = (Fraction(-1), 0)
        for wl, pl, ml in left:
            if wl > cap:
                continue
            j = bisect.bisect_right(rweights, cap - wl) - 1
            if j < 0:
                continue
            tot = pl + best_prof[j]
            mask = ml | (best_mask[j] << half)
            if tot > best[0] or (tot == best[0] and mask < best[1]):
                best = (tot, mask)
        value, mask = best
        atoms = [i for i in range(n) if mask >> i & 1]
        return WorstSubset(atom_set(atoms), float(value), True)

    # density greedy (value per unit mass is the level itself)
    order = sorted(range(n), key=lambda i: (-levels[i], i))
    budget = Fraction(float(delta))
    picked = []
    total = Fraction(0)
    for i in order:
        if levels[i] <= 0.0:
            break
        if w[i] <= budget:
            picked.append(i)
            total += p[i]
            budget -= w[i]
    return WorstSubset(atom_set(picked), float(total), False)

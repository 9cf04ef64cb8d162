"""Simple maps: finitely many Banach values over a measurable partition.

Interval-space maps are stored as canonical step functions (strictly
increasing breakpoints over [0, 1) plus one value row per piece, adjacent
equal rows merged), discrete-space maps as one value row per atom.  Both
representations are unique for a given map, so equality is exact array
equality.  The partition/value view of the spec (one cell per distinct
value) is derived on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import measures as ms
from . import values as vs
from .errors import DomainError, StructuralError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SimpleMap:
    space: ms.MeasureSpace
    value_space: vs.ValueSpace
    breaks: np.ndarray | None  # interval spaces only: shape (m+1,)
    vals: np.ndarray           # complex, shape (pieces-or-atoms, dim)

    def __eq__(self, other):
        if not isinstance(other, SimpleMap):
            return NotImplemented
        if self.space != other.space or self.value_space != other.value_space:
            return False
        if (self.breaks is None) != (other.breaks is None):
            return False
        if self.breaks is not None and not np.array_equal(self.breaks, other.breaks):
            return False
        return np.array_equal(self.vals, other.vals)

    def __hash__(self):
        return object.__hash__(self)

    @property
    def partition(self) -> ms.Partition:
        return ms.partition(self.space, [c for c, _ in self.cells()])

    @property
    def cell_values(self) -> tuple[vs.BanachElement, ...]:
        return tuple(v for _, v in self.cells())

    def cells(self) -> list[tuple[ms.MeasurableSet, vs.BanachElement]]:
        """Canonical cells: pieces grouped by value, sorted by position."""
        groups: dict[tuple[complex, ...], list] = {}
        if self.space.kind == ms.INTERVAL:
            for i in range(self.vals.shape[0]):
                key = tuple(complex(c) for c in self.vals[i])
                groups.setdefault(key, []).append(
                    (float(self.breaks[i]), float(self.breaks[i + 1]))
                )
            out = [
                (ms.interval_set(pieces), vs.BanachElement(key))
                for key, pieces in groups.items()
            ]
        else:
            for i in range(self.vals.shape[0]):
                key = tuple(complex(c) for c in self.vals[i])
                groups.setdefault(key, []).append(i)
            out = [
                (ms.atom_set(atoms), vs.BanachElement(key))
                for key, atoms in groups.items()
            ]
        out.sort(key=lambda cv: ms._cell_key(cv[0]))
        return out


# ---------------------------------------------------------------------------
# construction


def _merge_adjacent(breaks: np.ndarray, vals: np.ndarray):
    if vals.shape[0] <= 1:
        return breaks, vals
    keep = np.empty(vals.shape[0], dtype=bool)
    keep[0] = True
    keep[1:] = np.any(vals[1:] != vals[:-1], axis=1)
    if keep.all():
        return breaks, vals
    idx = np.flatnonzero(keep)
    return np.concatenate([breaks[idx], breaks[-1:]]), vals[idx]


def _build_step(space, value_space, breaks: np.ndarray, vals: np.ndarray) -> SimpleMap:
    # internal constructor: arrays are freshly built and known valid
    breaks, vals = _merge_adjacent(breaks, vals)
    return SimpleMap(space, value_space, _frozen(breaks),
                     _frozen(np.ascontiguousarray(vals)))


def step_map(space: ms.MeasureSpace, value_space: vs.ValueSpace, breaks, values) -> SimpleMap:
    """Interval-space map from raw breakpoints and per-piece value rows."""
    if space.kind != ms.INTERVAL:
        raise StructuralError("step_map needs an interval space")
    b = np.array(breaks, dtype=float)
    v = np.array(values, dtype=complex)
    if v.ndim == 1 and value_space.dim == 1:
        v = v[:, None]
    if b.ndim != 1 or b.size < 2 or b[0] != 0.0 or b[-1] != 1.0:
        raise StructuralError("breakpoints must run from 0.0 to 1.0")
    if np.any(np.diff(b) <= 0.0):
        raise StructuralError("breakpoints must be strictly increasing")
    if v.shape != (b.size - 1, value_space.dim):
        raise StructuralError(
            f"expected value array of shape {(b.size - 1, value_space.dim)}, got {v.shape}"
        )
    return _build_step(space, value_space, b, v)


def atom_map(space: ms.MeasureSpace, value_space: vs.ValueSpace, values) -> SimpleMap:
    """Discrete-space map from one value row per atom."""
    if space.kind != ms.DISCRETE:
        raise StructuralError("atom_map needs a discrete space")
    v = np.array(values, dtype=complex)
    if v.ndim == 1 and value_space.dim == 1:
        v = v[:, None]
    n = len(space.weights)
    if v.shape != (n, value_space.dim):
        raise StructuralError(
            f"expected value array of shape {(n, value_space.dim)}, got {v.shape}"
        )
    return SimpleMap(space, value_space, None, _frozen(np.ascontiguousarray(v)))


def from_cells(space, value_space, cells, cell_values) -> SimpleMap:
    """Map from a partition (validated) and one element per cell."""
    cells = list(cells)
    cell_values = list(cell_values)
    if len(cells) != len(cell_values):
        raise StructuralError("one value per cell required")
    ms.partition(space, cells)  # validates disjointness and coverage
    rows = [vs.element(value_space, v.components if isinstance(v, vs.BanachElement) else v).components
            for v in cell_values]
    if space.kind == ms.DISCRETE:
        out = np.zeros((len(space.weights), value_space.dim), dtype=complex)
        for cell, row in zip(cells, rows):
            for a in cell.atoms:
                out[a] = row
        return atom_map(space, value_space, out)
    pts = sorted({0.0, 1.0} | {e for c in cells for ab in c.intervals for e in ab})
    b = np.array(pts, dtype=float)
    mids = (b[:-1] + b[1:]) / 2.0
    out = np.zeros((b.size - 1, value_space.dim), dtype=complex)
    for cell, row in zip(cells, rows):
        inside = [i for i, x in enumerate(mids) if ms.contains_point(cell, x)]
        out[inside] = row
    return step_map(space, value_space, b, out)


def constant_map(space, value_space, value) -> SimpleMap:
    row = vs.element(value_space, value.components if isinstance(value, vs.BanachElement) else value)
    if space.kind == ms.INTERVAL:
        return step_map(space, value_space, [0.0, 1.0], [row.components])
    return atom_map(space, value_space, [row.components] * len(space.weights))


def indicator_map(space, value_space, mset: ms.MeasurableSet, value=1.0) -> SimpleMap:
    """``value`` on the set, zero elsewhere."""
    comps = value.components if isinstance(value, vs.BanachElement) else value
    if np.ndim(comps) == 0:
        comps = [comps] + [0.0] * (value_space.dim - 1)
    row = vs.element(value_space, comps).components
    zero = (0j,) * value_space.dim
    if space.kind == ms.DISCRETE:
        rows = [row if i in set(mset.atoms) else zero for i in range(len(space.weights))]
        return atom_map(space, value_space, rows)
    pts = sorted({0.0, 1.0} | {e for ab in mset.intervals for e in ab})
    b = np.array(pts, dtype=float)
    mids = (b[:-1] + b[1:]) / 2.0
    rows = [row if ms.contains_point(mset, x) else zero for x in mids]
    return step_map(space, value_space, b, rows)


# ---------------------------------------------------------------------------
# arithmetic


def piece_masses(s: SimpleMap) -> np.ndarray:
    cached = getattr(s, "_masses", None)
    if cached is None:
        if s.space.kind == ms.INTERVAL:
            cached = _frozen(np.diff(s.breaks) * s.space.total_mass)
        else:
            cached = _frozen(np.asarray(s.space.weights, dtype=float))
        object.__setattr__(s, "_masses", cached)
    return cached


def norm_rows(value_space: vs.ValueSpace, vals: np.ndarray) -> np.ndarray:
    moduli = np.abs(vals)
    if value_space.kind == vs.SCALAR:
        return moduli[:, 0]
    if value_space.norm_tag == vs.NORM_ONE:
        return moduli.sum(axis=1)
    if value_space.norm_tag == vs.NORM_INF:
        return moduli.max(axis=1)
    return np.sqrt((moduli * moduli).sum(axis=1))


def integrate_simple(s: SimpleMap) -> vs.BanachElement:
    """Weighted sum of the cell values: sum_i mu(A_i) s_i."""
    masses = piece_masses(s)
    if s.space.kind == ms.DISCRETE:
        comps = tuple(
            complex(
                math.fsum(float(m) * z.real for m, z in zip(masses, s.vals[:, k])),
                math.fsum(float(m) * z.imag for m, z in zip(masses, s.vals[:, k])),
            )
            for k in range(s.value_space.dim)
        )
        return vs.BanachElement(comps)
    comps = masses.astype(complex) @ s.vals
    return vs.BanachElement(tuple(complex(c) for c in comps))


def norm_map(s: SimpleMap) -> SimpleMap:
    """Pointwise norm of ``s`` as a scalar simple map."""
    norms = norm_rows(s.value_space, s.vals).astype(complex)[:, None]
    if s.space.kind == ms.INTERVAL:
        return _build_step(s.space, vs.scalar_space(), s.breaks, norms)
    return SimpleMap(s.space, vs.scalar_space(), None, _frozen(norms))


def _refines(fine: np.ndarray, coarse: np.ndarray) -> bool:
    """True when every coarse breakpoint occurs among the fine ones."""
    if coarse.size > fine.size:
        return False
    pos = np.searchsorted(fine, coarse)
    return bool(np.array_equal(fine[np.minimum(pos, fine.size - 1)], coarse))


def linear_combine(alpha, s: SimpleMap, beta, t: SimpleMap) -> SimpleMap:
    """alpha*s + beta*t on the common refinement, canonicalized."""
    if s.space != t.space:
        raise StructuralError("maps live on different spaces")
    if s.value_space != t.value_space:
        raise StructuralError("maps take values in different spaces")
    a = complex(alpha)
    b = complex(beta)
    if s.space.kind == ms.DISCRETE:
        return SimpleMap(s.space, s.value_space, None,
                         _frozen(a * s.vals + b * t.vals))
    # dyadic schemes constantly combine nested grids; avoid the union sort
    if np.array_equal(s.breaks, t.breaks):
        return _build_step(s.space, s.value_space, s.breaks, a * s.vals + b * t.vals)
    if _refines(t.breaks, s.breaks):
        si = np.searchsorted(s.breaks, t.breaks[:-1], side="right") - 1
        return _build_step(s.space, s.value_space, t.breaks,
                           a * s.vals[si] + b * t.vals)
    if _refines(s.breaks, t.breaks):
        ti = np.searchsorted(t.breaks, s.breaks[:-1], side="right") - 1
        return _build_step(s.space, s.value_space, s.breaks,
                           a * s.vals + b * t.vals[ti])
    breaks = np.union1d(s.breaks, t.breaks)
    si = np.searchsorted(s.breaks, breaks[:-1], side="right") - 1
    ti = np.searchsorted(t.breaks, breaks[:-1], side="right") - 1
    return _build_step(s.space, s.value_space, breaks,
                       a * s.vals[si] + b * t.vals[ti])


def restrict(s: SimpleMap, a: ms.MeasurableSet) -> SimpleMap:
    """s * 1_A: values of ``s`` on A, zero outside."""
    ms._check_kind(s.space, a)
    if s.space.kind == ms.DISCRETE:
        mask = np.zeros(len(s.space.weights), dtype=bool)
        mask[list(a.atoms)] = True
        return atom_map(s.space, s.value_space, np.where(mask[:, None], s.vals, 0j))
    endpoints = np.array(sorted({e for ab in a.intervals for e in ab}), dtype=float)
    breaks = np.union1d(s.breaks, endpoints)
    si = np.searchsorted(s.breaks, breaks[:-1], side="right") - 1
    flat = [e for ab in a.intervals for e in ab]
    mids = (breaks[:-1] + breaks[1:]) / 2.0
    inside = np.searchsorted(np.asarray(flat), mids, side="right") % 2 == 1
    return _build_step(s.space, s.value_space, breaks,
                       np.where(inside[:, None], s.vals[si], 0j))


def sample(s: SimpleMap, xs: np.ndarray) -> np.ndarray:
    """Value rows at the given points (interval) or atom indices (discrete)."""
    if s.space.kind == ms.INTERVAL:
        idx = np.searchsorted(s.breaks, xs, side="right") - 1
        return s.vals[idx]
    return s.vals[np.asarray(xs, dtype=int)]


def evaluate(s: SimpleMap, x) -> vs.BanachElement:
    """Value of the unique cell containing ``x`` (half-open convention)."""
    if s.space.kind == ms.INTERVAL:
        x = float(x)
        if not (0.0 <= x < 1.0):
            raise DomainError(f"point {x!r} lies outside [0, 1)")
    else:
        x = int(x)
        if not (0 <= x < len(s.space.weights)):
            raise DomainError(f"atom {x!r} outside the space")
    row = sample(s, np.array([x]))[0]
    return vs.BanachElement(tuple(complex(c) for c in row))


def refine_to(s: SimpleMap, p: ms.Partition) -> SimpleMap:
    """Rebuild ``s`` over an explicit refinement of its partition.

    Used by tests of refinement invariance; the result equals ``s`` as a map.
    """
    cells = p.cells
    rows = [evaluate(s, _witness(c)) for c in cells]
    return from_cells(s.space, s.value_space, cells, rows)


def _witness(c: ms.MeasurableSet):
    if c.kind == ms.INTERVAL:
        a, b = c.intervals[0]
        return (a + b) / 2.0
    return c.atoms[0]

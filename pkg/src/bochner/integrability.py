"""Uniform-integrability moduli, certificates, nets, and sequence probes.

The modulus of a family at delta is the worst restricted integral
sup over members s and sets A with mu(A) <= delta of int ||s|| 1_A.
A family is uniformly integrable when the modulus vanishes as delta -> 0;
the certificate reports, for each epsilon on a grid, the largest grid delta
whose modulus stays below it.

Infinite families are probed by truncation at a horizon.  Verdicts are
always labelled with the horizon and never asserted for the full sequence:
the probe compares the moduli at the horizon against those at half the
horizon, and distrusts grid entries that are still growing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures as ms
from . import metrics as mt
from . import simple as sp
from .errors import DomainError, StructuralError

DEFAULT_DELTA_GRID = tuple(2.0 ** -k for k in range(21))
DEFAULT_EPSILON_GRID = (1e-1, 1e-2, 1e-3)

#: A grid entry is distrusted when doubling the horizon grew it past this factor.
STABILITY_RATIO = 1.5

FLAG_EXACT = "exact"
FLAG_LOWER = "lower"
FLAG_UPPER = "upper"


@dataclass(frozen=True)
class UIVerdict:
    uniformly_integrable: bool
    #: per epsilon: the largest grid delta with modulus < epsilon, or None
    table: tuple[tuple[float, float | None], ...]
    failing_epsilon: float | None = None
    floor: float | None = None


@dataclass(frozen=True)
class UIModulusReport:
    delta_grid: tuple[float, ...]
    modulus_values: tuple[float, ...]
    exact_flags: tuple[str, ...]
    epsilon_grid: tuple[float, ...]
    verdict: UIVerdict
    horizon: int | None = None
    stabilized: bool | None = None
    stable_mask: tuple[bool, ...] | None = None


# ---------------------------------------------------------------------------
# moduli


def _modulus_profile(s: sp.SimpleMap, deltas: np.ndarray):
    """Worst restricted integrals of one map at every delta.

    Interval spaces: one descending sort, then every delta is a fractional
    prefix (exact supremum).  Discrete spaces: exact subset search per delta.
    """
    if s.space.kind == ms.INTERVAL:
        h = sp.norm_rows(s.value_space, s.vals)
        masses = sp.piece_masses(s)
        order = np.argsort(-h, kind="stable")
        hs = h[order]
        msorted = masses[order]
        cum_mass = np.concatenate([[0.0], np.cumsum(msorted)])
        cum_int = np.concatenate([[0.0], np.cumsum(hs * msorted)])
        capped = np.minimum(deltas, cum_mass[-1])
        idx = np.searchsorted(cum_mass, capped, side="right") - 1
        frac = capped - cum_mass[idx]
        boundary = np.where(idx < hs.size, hs[np.minimum(idx, hs.size - 1)], 0.0)
        vals = cum_int[idx] + boundary * frac
        return vals, np.full(deltas.size, True)
    nd = sp.norm_map(s)
    vals = np.empty(deltas.size)
    flags = np.empty(deltas.size, dtype=bool)
    for i, d in enumerate(deltas):
        w = ms.worst_subset(s.space, nd, float(d))
        vals[i] = w.value
        flags[i] = w.exact
    return vals, flags


def _family_profile(family, deltas: np.ndarray):
    family = list(family)
    if not family:
        raise DomainError("the family must be nonempty")
    space = family[0].space
    for s in family[1:]:
        if s.space != space:
            raise StructuralError("family members live on different spaces")
    profiles = []
    exact = np.full(deltas.size, True)
    for s in family:
        vals, flags = _modulus_profile(s, deltas)
        profiles.append(vals)
        exact &= flags
    return np.max(np.stack(profiles), axis=0), exact


def ui_modulus(family, delta: float) -> float:
    """max over the family of the worst restricted integral at ``delta``."""
    if delta <= 0.0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    vals, _ = _family_profile(family, np.array([float(delta)]))
    return float(vals[0])


def _verdict(deltas, moduli, epsilon_grid, trusted=None) -> UIVerdict:
    if trusted is None:
        trusted = np.full(len(deltas), True)
    table = []
    failing = None
    for eps in epsilon_grid:
        found = None
        for d, m, ok in zip(deltas, moduli, trusted):
            if ok and m < eps:
                found = float(d)
                break
        table.append((float(eps), found))
        if found is None and failing is None:
            failing = float(eps)
    if failing is None:
        return UIVerdict(True, tuple(table))
    trusted_vals = [m for m, ok in zip(moduli, trusted) if ok]
    floor = float(min(trusted_vals)) if trusted_vals else float(min(moduli))
    return UIVerdict(False, tuple(table), failing_epsilon=failing, floor=floor)


def ui_certificate(family, epsilon_grid=DEFAULT_EPSILON_GRID,
                   delta_grid=DEFAULT_DELTA_GRID) -> UIModulusReport:
    """Epsilon-delta certificate for a finite family on explicit grids."""
    eps = tuple(float(e) for e in epsilon_grid)
    deltas = tuple(float(d) for d in delta_grid)
    if not eps or not deltas:
        raise DomainError("grids must be nonempty")
    if min(eps) <= 0.0 or min(deltas) <= 0.0:
        raise DomainError("grid entries must be positive")
    darr = np.array(deltas)
    moduli, exact = _family_profile(family, darr)
    return UIModulusReport(
        delta_grid=deltas,
        modulus_values=tuple(float(m) for m in moduli),
        exact_flags=tuple(FLAG_EXACT if e else FLAG_LOWER for e in exact),
        epsilon_grid=eps,
        verdict=_verdict(deltas, moduli, eps),
    )


def epsilon_net(family, epsilon: float) -> list[sp.SimpleMap]:
    """Greedy farthest-point subset covering the family within epsilon in L1.

    Deterministic: the first member seeds the net, ties break at the lowest
    index.  The result is a subset of the family, not globally minimal.
    """
    family = list(family)
    if not family:
        return []
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon!r}")
    centers = [0]
    dist = np.array([mt.l1_distance(family[0], s) for s in family])
    while True:
        far = int(np.argmax(dist))
        if dist[far] <= epsilon:
            break
        centers.append(far)
        dist = np.minimum(dist, [mt.l1_distance(family[far], s) for s in family])
    return [family[i] for i in centers]


def linear_combination_ui(report1: UIModulusReport, report2: UIModulusReport,
                          alpha, beta) -> UIModulusReport:
    """Modulus bound for {alpha*s1 + beta*s2}: |alpha| m1 + |beta| m2.

    The combined values are upper bounds (restricted integrals are
    subadditive under linear combination), so the UI conclusion is sound.
    """
    if report1.delta_grid != report2.delta_grid:
        raise StructuralError("reports use different delta grids")
    a = abs(complex(alpha))
    b = abs(complex(beta))
    moduli = tuple(a * m1 + b * m2
                   for m1, m2 in zip(report1.modulus_values, report2.modulus_values))
    eps = report1.epsilon_grid
    return UIModulusReport(
        delta_grid=report1.delta_grid,
        modulus_values=moduli,
        exact_flags=tuple(FLAG_UPPER for _ in moduli),
        epsilon_grid=eps,
        verdict=_verdict(report1.delta_grid, moduli, eps),
    )


def sequence_ui_probe(scheme, horizon: int, delta_grid=DEFAULT_DELTA_GRID,
                      epsilon_grid=DEFAULT_EPSILON_GRID) -> UIModulusReport:
    """Truncated modulus of an indexed family with a stabilization check.

    The family {s_n : n <= horizon} is compared against its half-horizon
    truncation; grid entries whose modulus is still growing (by more than
    STABILITY_RATIO) are distrusted and excluded from the verdict.  The
    verdict is only a statement about the family at this horizon.
    """
    if horizon < 2:
        raise DomainError(f"horizon must be at least 2, got {horizon!r}")
    last = getattr(scheme, "last_index", None)
    h = min(horizon, last) if last else horizon
    h = max(h, 2)
    deltas = tuple(float(d) for d in delta_grid)
    darr = np.array(deltas)
    eps = tuple(float(e) for e in epsilon_grid)

    profiles = []
    for n in range(1, h + 1):
        vals, flags = _modulus_profile(scheme(n), darr)
        profiles.append((vals, flags))
    full = np.max(np.stack([v for v, _ in profiles]), axis=0)
    half = np.max(np.stack([v for v, _ in profiles[: max(1, h // 2)]]), axis=0)
    exact = np.full(darr.size, True)
    for _, flags in profiles:
        exact &= flags

    stable = full <= STABILITY_RATIO * half + 1e-12
    return UIModulusReport(
        delta_grid=deltas,
        modulus_values=tuple(float(m) for m in full),
        exact_flags=tuple(FLAG_EXACT if e else FLAG_LOWER for e in exact),
        epsilon_grid=eps,
        verdict=_verdict(deltas, full, eps, trusted=stable),
        horizon=h,
        stabilized=bool(stable.all()),
        stable_mask=tuple(bool(b) for b in stable),
    )

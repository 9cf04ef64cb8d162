"""Convergence-in-measure and L1-type distances between simple maps.

The Ky Fan distance d(s, t) = inf{eps > 0 : mu(||s - t|| >= eps) <= eps}
metrizes convergence in measure on a finite measure space.  For simple maps
the infimum is attained among finitely many candidates (the level heights of
||s - t|| and the tail measures at those levels), so it is computed exactly
up to float arithmetic on those candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import measures as ms
from . import simple as sp
from . import values as vs
from .errors import DomainError, StructuralError

#: Slack below which an inequality audit still counts as valid.
SLACK_TOL = -1e-12


@dataclass(frozen=True)
class InequalitySlack:
    """Slack of the three distance inequalities at one epsilon.

    markov_slack      eps^-1 * int||s-t||  -  mu(||s-t|| >= eps)
    truncation_slack  eps*mu(Omega) + int||s-t|| 1_{||s-t||>=eps}  -  int||s-t||
    triangle_slack    int||s-t||  -  ||int s - int t||

    All three are nonnegative in exact arithmetic.
    """

    epsilon: float
    markov_slack: float
    truncation_slack: float
    triangle_slack: float

    @property
    def valid(self) -> bool:
        return min(self.markov_slack, self.truncation_slack, self.triangle_slack) >= SLACK_TOL


def _check_pair(s: sp.SimpleMap, t: sp.SimpleMap) -> None:
    if s.space != t.space or s.value_space != t.value_space:
        raise StructuralError("distance needs maps over the same spaces")


def _abs_diff(s: sp.SimpleMap, t: sp.SimpleMap) -> sp.SimpleMap:
    return sp.norm_map(sp.linear_combine(1.0, s, -1.0, t))


def l1_distance(s: sp.SimpleMap, t: sp.SimpleMap) -> float:
    """int ||s - t||, the distance of the weak uniformity for int o ||.||."""
    _check_pair(s, t)
    return sp.integrate_simple(_abs_diff(s, t)).components[0].real


def ky_fan_distance(s: sp.SimpleMap, t: sp.SimpleMap) -> float:
    _check_pair(s, t)
    nd = _abs_diff(s, t)
    return ky_fan_of_norm_map(nd)


def ky_fan_of_norm_map(nd: sp.SimpleMap) -> float:
    """Ky Fan distance-to-zero of a nonnegative scalar map.

    Scans the finite candidate set (levels and tail masses) in ascending
    order; the first candidate c with mu(h > c) <= c is the infimum.
    """
    h = nd.vals[:, 0].real
    masses = sp.piece_masses(nd)
    order = np.argsort(h, kind="stable")
    hs = h[order]
    cum = np.concatenate([[0.0], np.cumsum(masses[order])])
    total = cum[-1]
    tails_ge = total - cum[np.searchsorted(hs, hs, side="left")]
    candidates = np.unique(np.concatenate([[0.0], hs, tails_ge]))
    tails = total - cum[np.searchsorted(hs, candidates, side="right")]
    feasible = tails <= candidates
    idx = int(np.argmax(feasible))
    if not feasible[idx]:
        # cannot happen: the largest level is always feasible once the tail
        # above it is empty, but guard against degenerate inputs
        return float(max(hs[-1], total)) if hs.size else 0.0
    return float(candidates[idx])


def slacks(s: sp.SimpleMap, t: sp.SimpleMap, epsilons) -> list[InequalitySlack]:
    """Inequality audit of one pair at several epsilons, sharing the overlay."""
    _check_pair(s, t)
    eps_list = [float(e) for e in epsilons]
    for e in eps_list:
        if e <= 0.0:
            raise DomainError(f"epsilon must be positive, got {e!r}")
    nd = _abs_diff(s, t)
    h = nd.vals[:, 0].real
    masses = sp.piece_masses(nd)
    weighted = h * masses
    l1 = float(weighted.sum())
    mass_omega = ms.space_mass(s.space)
    gap = vs.combine(
        s.value_space, 1.0, sp.integrate_simple(s), -1.0, sp.integrate_simple(t)
    )
    norm_gap = vs.norm(s.value_space, gap)
    out = []
    for eps in eps_list:
        tail = h >= eps
        mu_tail = float(masses[tail].sum())
        int_tail = float(weighted[tail].sum())
        out.append(
            InequalitySlack(
                epsilon=eps,
                markov_slack=l1 / eps - mu_tail,
                truncation_slack=eps * mass_omega + int_tail - l1,
                triangle_slack=l1 - norm_gap,
            )
        )
    return out


def inequality_audit(s: sp.SimpleMap, t: sp.SimpleMap, epsilon: float) -> InequalitySlack:
    """Evaluate both sides of the Markov, truncation, and triangle bounds."""
    return slacks(s, t, [epsilon])[0]


def maps_equal_ae(s: sp.SimpleMap, t: sp.SimpleMap) -> bool:
    """Equality up to null sets, i.e. zero L1 distance."""
    return l1_distance(s, t) == 0.0

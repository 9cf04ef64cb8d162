"""Measure spaces, set algebra, partitions, and worst-set extraction."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import bochner as bc
from bochner.errors import DomainError, StructuralError

import oracles
import strategies as sgy

INTERVAL = bc.interval_space(1.0)
SCALAR = bc.scalar_space()


class TestMeasure:
    def test_interval_length(self):
        s = bc.interval_set([(0.25, 0.75)])
        assert bc.measure(INTERVAL, s) == 0.5

    def test_discrete_weight_sum(self):
        space = bc.discrete_space([0.2, 0.3, 0.5])
        assert bc.measure(space, bc.atom_set([0, 2])) == 0.7

    def test_empty_set(self):
        assert bc.measure(INTERVAL, bc.empty_set(INTERVAL)) == 0.0
        space = bc.discrete_space([1.0, 2.0])
        assert bc.measure(space, bc.empty_set(space)) == 0.0

    def test_total_mass_scaling(self):
        space = bc.interval_space(3.0)
        assert bc.measure(space, bc.interval_set([(0.0, 0.5)])) == 1.5

    def test_kind_mismatch(self):
        with pytest.raises(StructuralError):
            bc.measure(INTERVAL, bc.atom_set([0]))

    def test_atom_out_of_range(self):
        space = bc.discrete_space([1.0])
        with pytest.raises(StructuralError):
            bc.measure(space, bc.atom_set([3]))

    @given(sgy.interval_sets(), sgy.interval_sets())
    def test_additivity_on_disjoint(self, a, b):
        b = bc.difference(INTERVAL, b, a)
        u = bc.union(INTERVAL, a, b)
        assert abs(bc.measure(INTERVAL, u)
                   - bc.measure(INTERVAL, a) - bc.measure(INTERVAL, b)) <= 1e-12

    @given(sgy.interval_sets(), sgy.interval_sets())
    def test_monotone_on_dyadic(self, a, b):
        small = bc.intersect(INTERVAL, a, b)
        assert bc.measure(INTERVAL, small) <= bc.measure(INTERVAL, a)


class TestSetAlgebra:
    def test_overlapping_union_merges(self):
        got = bc.union(INTERVAL, bc.interval_set([(0.0, 0.5)]),
                       bc.interval_set([(0.25, 0.75)]))
        assert got == bc.interval_set([(0.0, 0.75)])

    def test_discrete_complement(self):
        space = bc.discrete_space([1.0, 1.0, 1.0])
        got = bc.complement(space, bc.atom_set([1]))
        assert got == bc.atom_set([0, 2])

    def test_disjoint_intersection_empty(self):
        got = bc.intersect(INTERVAL, bc.interval_set([(0.0, 0.25)]),
                           bc.interval_set([(0.5, 1.0)]))
        assert got.is_empty()

    def test_combine_dispatch(self):
        a = bc.interval_set([(0.0, 0.5)])
        assert bc.combine(INTERVAL, "complement", a) == bc.interval_set([(0.5, 1.0)])
        with pytest.raises(StructuralError):
            bc.combine(INTERVAL, "complement", a, a)
        with pytest.raises(StructuralError):
            bc.combine(INTERVAL, "frobnicate", a, a)

    def test_adjacent_intervals_merge_canonically(self):
        assert bc.interval_set([(0.0, 0.5), (0.5, 0.75)]) == bc.interval_set([(0.0, 0.75)])

    def test_bad_endpoints(self):
        with pytest.raises(DomainError):
            bc.interval_set([(0.5, 0.25)])
        with pytest.raises(DomainError):
            bc.interval_set([(-0.1, 0.5)])

    @given(sgy.interval_sets(), sgy.interval_sets())
    def test_de_morgan_exact(self, a, b):
        lhs = bc.complement(INTERVAL, bc.union(INTERVAL, a, b))
        rhs = bc.intersect(INTERVAL, bc.complement(INTERVAL, a),
                           bc.complement(INTERVAL, b))
        assert lhs == rhs

    @given(sgy.interval_sets())
    def test_complement_involution(self, a):
        assert bc.complement(INTERVAL, bc.complement(INTERVAL, a)) == a

    @given(sgy.discrete_spaces().flatmap(
        lambda sp: st.tuples(st.just(sp), sgy.atom_sets(sp), sgy.atom_sets(sp))))
    def test_de_morgan_discrete(self, bundle):
        space, a, b = bundle
        lhs = bc.complement(space, bc.intersect(space, a, b))
        rhs = bc.union(space, bc.complement(space, a), bc.complement(space, b))
        assert lhs == rhs


class TestPartitions:
    def test_refine_overlay(self):
        p = bc.partition(INTERVAL, [bc.interval_set([(0.0, 0.5)]),
                                    bc.interval_set([(0.5, 1.0)])])
        q = bc.partition(INTERVAL, [bc.interval_set([(0.0, 0.25)]),
                                    bc.interval_set([(0.25, 1.0)])])
        got = bc.refine_common(p, q)
        assert [c.intervals for c in got.cells] == [
            ((0.0, 0.25),), ((0.25, 0.5),), ((0.5, 1.0),)]

    def test_refine_idempotent(self):
        p = bc.partition(INTERVAL, [bc.interval_set([(0.0, 0.5)]),
                                    bc.interval_set([(0.5, 1.0)])])
        assert bc.refine_common(p, p) == p

    def test_refine_discrete(self):
        space = bc.discrete_space([1.0, 1.0, 1.0])
        p = bc.partition(space, [bc.atom_set([0]), bc.atom_set([1, 2])])
        q = bc.partition(space, [bc.atom_set([0, 1]), bc.atom_set([2])])
        got = bc.refine_common(p, q)
        assert [c.atoms for c in got.cells] == [(0,), (1,), (2,)]

    def test_overlapping_cells_rejected(self):
        with pytest.raises(StructuralError):
            bc.partition(INTERVAL, [bc.interval_set([(0.0, 0.6)]),
                                    bc.interval_set([(0.5, 1.0)])])

    def test_gap_rejected(self):
        with pytest.raises(StructuralError):
            bc.partition(INTERVAL, [bc.interval_set([(0.0, 0.25)]),
                                    bc.interval_set([(0.5, 1.0)])])

    def test_mismatched_spaces(self):
        p = bc.partition(INTERVAL, [bc.full_set(INTERVAL)])
        other = bc.interval_space(2.0)
        q = bc.partition(other, [bc.full_set(other)])
        with pytest.raises(StructuralError):
            bc.refine_common(p, q)

    @given(sgy.dyadic_partitions(INTERVAL), sgy.dyadic_partitions(INTERVAL))
    @settings(max_examples=50)
    def test_refinement_is_partition_refining_both(self, p, q):
        got = bc.refine_common(p, q)
        for cell in got.cells:
            assert sum(1 for c in p.cells
                       if bc.intersect(INTERVAL, cell, c) == cell) == 1
            assert sum(1 for c in q.cells
                       if bc.intersect(INTERVAL, cell, c) == cell) == 1


class TestWorstSubset:
    def test_interval_fractional_example(self):
        wmap = bc.step_map(INTERVAL, SCALAR, [0.0, 0.25, 1.0], [4.0, 1.0])
        got = bc.worst_subset(INTERVAL, wmap, 0.1)
        assert got.value == pytest.approx(0.4, abs=1e-15)
        assert got.subset == bc.interval_set([(0.0, 0.1)])
        assert got.exact

    def test_discrete_exhaustive_example(self):
        space = bc.discrete_space([0.2, 0.3, 0.5])
        wmap = bc.atom_map(space, SCALAR, [5.0, 1.0, 0.0])
        got = bc.worst_subset(space, wmap, 0.25)
        assert got.value == 1.0
        assert got.subset == bc.atom_set([0])
        assert got.exact

    def test_zero_map(self):
        wmap = bc.constant_map(INTERVAL, SCALAR, 0.0)
        assert bc.worst_subset(INTERVAL, wmap, 0.5).value == 0.0
        space = bc.discrete_space([0.5, 0.5])
        dmap = bc.constant_map(space, SCALAR, 0.0)
        assert bc.worst_subset(space, dmap, 0.5).value == 0.0

    def test_negative_values_rejected(self):
        wmap = bc.constant_map(INTERVAL, SCALAR, -1.0)
        with pytest.raises(DomainError):
            bc.worst_subset(INTERVAL, wmap, 0.5)

    def test_nonpositive_delta_rejected(self):
        wmap = bc.constant_map(INTERVAL, SCALAR, 1.0)
        with pytest.raises(DomainError):
            bc.worst_subset(INTERVAL, wmap, 0.0)

    def test_greedy_lower_bound_beyond_exact_limit(self):
        n = 25
        space = bc.discrete_space([1.0 / 32] * n)
        rng = np.random.default_rng(3)
        wmap = bc.atom_map(space, SCALAR, rng.random(n))
        got = bc.worst_subset(space, wmap, 0.25)
        assert not got.exact
        assert got.value <= 0.25 * 1.0 + 1e-12

    def test_matches_exhaustive_oracle_on_100_assignments(self):
        """Exact search equals brute-force enumeration on <= 12 atoms."""
        rng = np.random.default_rng(12345)
        for trial in range(100):
            n = int(rng.integers(1, 13))
            weights = rng.integers(0, 17, size=n) / 16.0
            space = bc.discrete_space(weights)
            levels = rng.random(n) * 4.0
            wmap = bc.atom_map(space, SCALAR, levels)
            delta = float(rng.integers(1, 33)) / 32.0
            got = bc.worst_subset(space, wmap, delta)
            want_val, _ = oracles.knapsack_exhaustive(weights, levels, delta)
            assert got.exact
            assert got.value == want_val
            assert bc.measure(space, got.subset) <= delta + 1e-15
            achieved = math.fsum(levels[i] * weights[i] for i in got.subset.atoms)
            assert achieved == pytest.approx(got.value, abs=1e-12)

    def test_interval_matches_candidate_scan(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            breaks = np.unique(np.concatenate(
                [[0.0, 1.0], rng.integers(1, 64, size=5) / 64.0]))
            vals = rng.random(breaks.size - 1) * 3.0
            wmap = bc.step_map(INTERVAL, SCALAR, breaks, vals)
            delta = float(rng.integers(1, 65)) / 64.0
            got = bc.worst_subset(INTERVAL, wmap, delta)
            want = oracles.interval_worst_candidates(wmap, delta)
            assert got.value == pytest.approx(want, abs=1e-12)

    @given(sgy.interval_simple_maps(space=INTERVAL, value_space=SCALAR),
           st.integers(1, 63), st.integers(1, 63))
    @settings(max_examples=60)
    def test_monotone_in_delta(self, m, k1, k2):
        wmap = bc.norm_map(m)
        d1, d2 = sorted((k1 / 64.0, k2 / 64.0))
        v1 = bc.worst_subset(INTERVAL, wmap, d1).value
        v2 = bc.worst_subset(INTERVAL, wmap, d2).value
        assert v1 <= v2 + 1e-12

"""Group, orbit and cusp structure checks."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsbound import cartan
from nsbound.errors import BadIndex, BadLevel, BadSubgroup


def brute_force_subgroup(p, d):
    """Oracle: the unique index-d subgroup, found by enumerating all
    subsets generated by single elements."""
    target = (p - 1) // d
    for g in range(2, p):
        H = set()
        x = 1
        while x not in H:
            H.add(x)
            x = (x * g) % p
        if len(H) == target:
            return tuple(sorted(H))
    raise AssertionError("no cyclic subgroup of the right order")


class TestBuildContext:
    def test_p7_d3(self):
        ctx = cartan.build_context(7, 3)
        assert ctx.H == (1, 6)
        assert ctx.xi == 6  # p = 3 mod 4 picks -1
        assert ctx.coset_reps == (1, 2, 3)

    def test_p13_d3_unique_subgroup(self):
        ctx = cartan.build_context(13, 3)
        assert ctx.H == (1, 5, 8, 12)
        assert ctx.H == brute_force_subgroup(13, 3)

    def test_bad_inputs(self):
        with pytest.raises(BadIndex):
            cartan.build_context(7, 2)
        with pytest.raises(BadLevel):
            cartan.build_context(8, 3)
        with pytest.raises(BadLevel):
            cartan.build_context(5, 3)
        with pytest.raises(BadIndex):
            cartan.build_context(11, 4)

    def test_explicit_subgroup(self):
        ctx = cartan.build_context(7, 3, H_choice=[1, 6])
        assert ctx.H == (1, 6)
        with pytest.raises(BadSubgroup):
            cartan.build_context(7, 3, H_choice=[1, 2])  # not closed / wrong
        with pytest.raises(BadSubgroup):
            cartan.build_context(13, 3, H_choice=[1, 3, 9])  # misses -1

    def test_xi_is_nonresidue(self):
        for p, d in [(7, 3), (11, 5), (13, 3), (17, 4), (29, 7)]:
            if (p - 1) // 2 % d:
                continue
            ctx = cartan.build_context(p, d)
            assert pow(ctx.xi, (p - 1) // 2, p) == p - 1
            assert (p - 1) in ctx.H  # -1 always in H


class TestGroup:
    @pytest.mark.parametrize("p,d,expected", [(7, 3, 96), (11, 5, 240), (13, 3, 336)])
    def test_group_order(self, p, d, expected):
        ctx = cartan.build_context(p, d)
        n_g, n_gh = cartan.group_order(ctx)
        assert n_g == expected == 2 * (p * p - 1)
        assert n_gh == n_g // d

    def test_determinant_surjects_with_equal_fibers(self):
        ctx = cartan.build_context(7, 3)
        from collections import Counter
        fibers = Counter(ctx.coset_rep_of[cartan.det_mod(m, 7)]
                         for m in cartan.group_elements(ctx))
        assert set(fibers) == set(ctx.coset_reps)
        assert len(set(fibers.values())) == 1

    @given(data=st.data())
    @settings(max_examples=50, deadline=None)
    def test_membership_matches_enumeration(self, data):
        ctx = cartan.build_context(7, 3)
        elems = set(cartan.group_elements(ctx))
        m = tuple(data.draw(st.integers(min_value=0, max_value=6)) for _ in range(4))
        assert cartan.in_G(ctx, m) == (m in elems)


class TestOrbits:
    @pytest.mark.parametrize("p,d", [(7, 3), (11, 5), (13, 3), (13, 6)])
    def test_sizes_and_partition(self, p, d):
        ctx = cartan.build_context(p, d)
        orbits = cartan.orbit_decomposition(ctx)
        assert len(orbits) == d
        assert all(len(o.points) == (p * p - 1) // d for o in orbits)
        union = set()
        for o in orbits:
            union |= o.points
        assert len(union) == p * p - 1

    def test_right_action_closure_exhaustive(self):
        ctx = cartan.build_context(7, 3)
        gh = [m for m in cartan.group_elements(ctx) if cartan.det_mod(m, 7) in ctx.H]
        for orb in cartan.orbit_decomposition(ctx):
            for pt in orb.points:
                for m in gh:
                    assert pt.times_matrix(m) in orb.points

    def test_negation_closure(self):
        ctx = cartan.build_context(11, 5)
        for orb in cartan.orbit_decomposition(ctx):
            for pt in orb.points:
                assert cartan.APoint((-pt.x) % 11, (-pt.y) % 11, 11) in orb.points

    def test_galois_action_transitive_and_invertible(self):
        ctx = cartan.build_context(7, 3)
        orbits = cartan.orbit_decomposition(ctx)
        first = orbits[0]
        assert cartan.galois_orbit_action(ctx, 1, first) is first
        seen = {cartan.galois_orbit_action(ctx, s, first).label for s in ctx.coset_reps}
        assert seen == {o.label for o in orbits}
        for s in ctx.coset_reps:
            inv = ctx.coset_inv(s)
            back = cartan.galois_orbit_action(ctx, inv, cartan.galois_orbit_action(ctx, s, first))
            assert back is first


class TestCusps:
    @pytest.mark.parametrize("p,d,count", [(7, 3, 3), (11, 5, 5), (13, 3, 6)])
    def test_count_and_partition(self, p, d, count):
        ctx = cartan.build_context(p, d)
        cusps = cartan.cusp_classes(ctx)
        assert len(cusps) == count == (p - 1) // 2
        assert sum(len(c.vectors) for c in cusps) == p * p - 1

    def test_sigma_properties(self):
        ctx = cartan.build_context(11, 5)
        for cusp in cartan.cusp_classes(ctx):
            m = cusp.sigma
            assert cartan.det_mod(m, 11) == 1
            # first column lands in the class
            assert (m[0], m[2]) in cusp.vectors
        assert cartan.cusp_classes(ctx)[0].label == 1
        assert cartan.cusp_classes(ctx)[0].sigma == (1, 0, 0, 1)

    def test_apoint_representatives(self):
        pt = cartan.APoint(3, 5, 7)
        from fractions import Fraction
        assert 0 <= pt.a1 < 1 and 0 <= pt.a2 < 1
        assert pt.a1 == Fraction(3, 7)

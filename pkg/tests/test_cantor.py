from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mazur66.cantor import (
    build_cantor,
    find_interval_near,
    in_B,
    largest_component,
    nearest_other_interval,
)
from mazur66.errors import DepthExhaustedError, ParameterDomainError, PreconditionError


def geometric_removed(depth, ratio=Fraction(1)):
    # independent oracle: sum of 2^(g-1) gaps of length ratio * 4^-g
    return sum((ratio * Fraction(2 ** (g - 1), 4**g) for g in range(1, depth + 1)), Fraction(0))


def test_depth_one():
    c = build_cantor(1, 1)
    assert [(iv.a, iv.b) for iv in c.intervals] == [(Fraction(3, 8), Fraction(5, 8))]
    assert c.removed_measure == Fraction(1, 4)


def test_depth_two_lengths():
    c = build_cantor(2, 1)
    assert [iv.length for iv in c.intervals] == [Fraction(1, 4), Fraction(1, 16), Fraction(1, 16)]
    assert c.intervals[0].b <= c.intervals[2].a and c.intervals[1].b <= c.intervals[0].a


@pytest.mark.parametrize("depth", range(1, 9))
def test_removed_measure_matches_geometric_series(depth):
    c = build_cantor(depth, 1)
    assert c.removed_measure == geometric_removed(depth) == Fraction(1, 2) * (1 - Fraction(1, 2**depth))
    assert c.removed_measure + c.measure == 1
    assert len(c) == 2**depth - 1


@pytest.mark.parametrize("ratio", [Fraction(1, 3), Fraction(3, 4), 1])
def test_ratio_scales_measure(ratio):
    assert build_cantor(6, ratio).removed_measure == geometric_removed(6, Fraction(ratio))


@pytest.mark.parametrize("depth,ratio", [(0, 1), (-2, 1), (3, 0), (3, Fraction(5, 4)), (3, -1)])
def test_rejects_bad_parameters(depth, ratio):
    with pytest.raises(ParameterDomainError):
        build_cantor(depth, ratio)


@given(st.integers(1, 7), st.fractions(Fraction(1, 100), 1))
@settings(max_examples=30, deadline=None)
def test_intervals_disjoint_sorted_by_generation(depth, ratio):
    c = build_cantor(depth, ratio)
    ivs = c.intervals
    assert all(0 < iv.a < iv.b < 1 for iv in ivs)
    for i, x in enumerate(ivs):
        for y in ivs[i + 1 :]:
            assert x.b <= y.a or y.b <= x.a
    assert all(b.length <= a.length for a, b in zip(ivs, ivs[1:]))
    assert [iv.g for iv in ivs] == sorted(iv.g for iv in ivs)
    for g in range(1, depth + 1):
        gen = c.generation(g)
        assert [iv.a for iv in gen] == sorted(iv.a for iv in gen)
        assert all(iv.length == Fraction(ratio) / 4**g for iv in gen)


def test_endpoints_lie_in_B():
    c = build_cantor(5)
    for iv in c.intervals:
        assert in_B(c, iv.a) and in_B(c, iv.b)


def test_membership_examples():
    c = build_cantor(4)
    i1 = c[1]
    assert in_B(c, i1.a)
    assert not in_B(c, i1.midpoint)
    assert in_B(c, 0) and in_B(c, 1)
    with pytest.raises(ParameterDomainError):
        in_B(c, Fraction(3, 2))


@given(st.fractions(0, 1, max_denominator=10**6))
@settings(max_examples=200)
def test_in_B_agrees_with_linear_scan(y):
    c = build_cantor(5)
    brute = not any(iv.a < y < iv.b for iv in c.intervals)
    assert in_B(c, y) == brute


@pytest.mark.parametrize("depth", range(2, 9))
def test_density_surrogate(depth):
    c = build_cantor(depth)
    L = Fraction(4, 2**depth)
    assert largest_component(c) < L
    # brute check: windows of length L on a fine dyadic lattice all meet a gap
    step = Fraction(1, 2 ** (depth + 2))
    s = Fraction(0)
    while s + L <= 1:
        assert any(iv.a < s + L and s < iv.b for iv in c.intervals)
        s += step


@pytest.mark.parametrize("depth", [4, 6])
def test_no_isolated_points_surrogate(depth):
    c = build_cantor(depth)
    for iv in c.intervals:
        if iv.g <= depth - 1:
            for e in (iv.a, iv.b):
                assert nearest_other_interval(c, e, iv) < Fraction(1, 2**depth)


def test_find_interval_near_from_a1():
    c = build_cantor(4)
    a1, d = c[1].a, c[1].length
    got = find_interval_near(c, a1, d, 1)
    # exhaustive oracle over the interval list
    admissible = [iv for iv in c.intervals if iv.n > 1 and a1 - d <= iv.a and iv.b <= a1 + d]
    assert got == admissible[0]
    assert got.g >= 2 and got.b <= a1


def test_find_interval_near_everything_in_range():
    c = build_cantor(3)
    assert find_interval_near(c, 0, 1, 1).n == 2


def test_find_interval_near_exhausted():
    c = build_cantor(3)
    with pytest.raises(DepthExhaustedError):
        find_interval_near(c, c[1].a, Fraction(1, 1000), 1)


def test_find_interval_near_needs_point_of_B():
    c = build_cantor(3)
    with pytest.raises(PreconditionError):
        find_interval_near(c, c[1].midpoint, Fraction(1, 8), 1)

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
import properties as props
from stackcount.arith import DomainError
from stackcount.points import (
    ResidueCondition,
    Weights,
    act,
    brute_force_classes,
    canonicalize,
    class_equal,
    count_classes,
    enumerate_classes,
    is_canonical,
    r_p,
    weight_splitting_matrix,
)

WEIGHTS = [(1, 1), (2, 3), (4, 6), (1, 2, 3), (3,), (2, 2, 4)]

weights_st = st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=4).map(tuple)
rat_st = st.builds(Fraction, st.integers(-(10**8), 10**8), st.integers(1, 10**4))
nonzero_rat = st.builds(
    lambda n, d, s: Fraction(s * n, d), st.integers(1, 10**6), st.integers(1, 10**4), st.sampled_from([1, -1])
)
prime_st = st.sampled_from([2, 3, 5, 7, 11, 13])


@st.composite
def point_st(draw):
    a = draw(weights_st)
    x = draw(st.lists(rat_st, min_size=len(a), max_size=len(a)))
    if not any(x):
        x[0] = Fraction(1)
    return a, tuple(x)


def test_weights_validation():
    assert Weights((4, 6)).gcd == 2 and Weights((4, 6)).total == 10
    assert str(Weights((4, 6))) == "4,6"
    for bad in [(), (0, 2), (-1, 1)]:
        with pytest.raises(DomainError):
            Weights(bad)


def test_r_p_examples():
    assert r_p((Fraction(1, 4), Fraction(1, 8)), (2, 3), 2) == 1
    for p in (2, 3, 7):
        assert r_p((p**2, p**3), (2, 3), p) == -1
        assert r_p((1, 1), (4, 6), p) == 0


def test_canonicalize_examples():
    assert canonicalize((Fraction(1, 4), Fraction(1, 8)), (2, 3)).coords == (1, 1)
    assert canonicalize((-48, 0), (4, 6)).coords == (-3, 0)
    assert canonicalize((-3, 2), (2, 3)).coords == (-3, 2)
    assert canonicalize((-3, -2), (2, 3)).coords == (-3, 2)
    with pytest.raises(DomainError):
        canonicalize((0, 0), (1, 1))


def test_class_equal_examples():
    assert class_equal((1, 1), (16, 64), (4, 6))
    assert not class_equal((1, 1), (-1, 1), (4, 6))
    assert class_equal((2, 3), (2, 3), (1, 5))


@settings(max_examples=10_000)
@given(point_st())
def test_canonicalize_idempotent(case):
    a, x = case
    props.check_idempotent(x, a)


@settings(max_examples=10_000)
@given(point_st(), nonzero_rat, prime_st)
def test_shift_law(case, t, p):
    a, x = case
    props.check_shift_law(x, a, t, p)


@settings(max_examples=1000)
@given(point_st(), nonzero_rat, nonzero_rat)
def test_class_equal_is_orbit_relation(case, t, u):
    a, x = case
    y, z = act(t, x, a), act(u, x, a)
    assert class_equal(x, y, a) and class_equal(y, x, a)
    assert class_equal(y, z, a)


def test_class_equal_separates_sign_classes():
    # (1, -1) and (1, 1) in P(2, 2) differ: t^2 = -1 has no rational root.
    assert not class_equal((1, -1), (1, 1), (2, 2))
    assert class_equal((1, -1), (-1, 1), (1, 1))


def test_enumeration_examples():
    assert len(list(enumerate_classes((1, 1), 2, 4))) == 8
    assert len(list(enumerate_classes((4, 6), 12, 64))) == 152
    for m in (1, 3, 5):
        assert [p.coords for p in enumerate_classes((m,), m, 1)] == [(1,)]
    for m in (2, 4):
        assert [p.coords for p in enumerate_classes((m,), m, 1)] == [(-1,), (1,)]
    with pytest.raises(DomainError):
        list(enumerate_classes((1, 1), 2, 0))


@pytest.mark.parametrize("a,d,B", [((1, 1), 2, 50), ((2, 3), 5, 40), ((4, 6), 10, 30), ((1, 2, 3), 6, 12),
                                   ((2, 2), 4, 30), ((3,), 3, 1000), ((1, 1), 1, Fraction(15, 2))])
def test_enumeration_matches_brute_force(a, d, B):
    fast = list(enumerate_classes(a, d, B))
    slow = brute_force_classes(a, d, B)
    assert sorted(p.coords for p in fast) == sorted(p.coords for p in slow)
    assert len(set(fast)) == len(fast)
    keys = [p.coords[::-1] for p in fast]
    assert keys == sorted(keys)
    assert count_classes(a, d, B) == len(fast)
    assert all(is_canonical(p.coords, a) for p in fast)


def test_emitted_points_are_primitive_everywhere():
    from stackcount.arith import primes_up_to

    pts = list(enumerate_classes((2, 3), 5, 300))
    for p in primes_up_to(1000):
        for pt in pts:
            assert r_p(pt.coords, (2, 3), int(p)) == 0


@pytest.mark.parametrize("n,B", [(2, 10**4), (3, 3000), (2, 10**6)])
def test_all_ones_weights_match_mobius(n, B):
    # d = n: H = max|x_j|^n.
    X = oracles.iroot(B, n)
    expected = oracles.primitive_in_box((1,) * n, (X,) * n) // 2
    assert count_classes((1,) * n, n, B) == expected


def test_frozen_counts():
    assert count_classes((1, 1), 2, 10**6) == oracles.schanuel_count(10**6) == 1216768
    assert count_classes((2, 3), 5, 10**6) == oracles.p23_count(10**6) == 1932011
    assert count_classes((4, 6), 10, 10**6) == oracles.p46_count(10**6) == 4001438


def test_condition_counts_and_workers():
    cond = ResidueCondition(0, 2, [1])
    assert count_classes((4, 6), 10, 10**5, condition=cond) == (
        oracles.p46_count(10**5),
        oracles.p46_count(10**5, first_odd=True),
    )
    for w in (1, 2, 3):
        assert count_classes((2, 3), 5, 10**4, condition=cond, workers=w) == count_classes(
            (2, 3), 5, 10**4, condition=cond
        )
    assert count_classes((1, 1), 2, 1e4, workers=4) == count_classes((1, 1), 2, 10**4)


def test_splitting_examples():
    assert weight_splitting_matrix((4, 6)) == [[2, 1], [3, 2]]
    assert weight_splitting_matrix((1, 1, 1)) == [[1, 0, 0], [1, 1, 0], [1, 0, 1]]
    assert weight_splitting_matrix((5,)) == [[1]]


def test_splitting_exhaustive_small():
    for n in (1, 2, 3):
        for a in itertools.product(range(1, 21), repeat=n):
            props.check_splitting(a)


@settings(max_examples=10_000)
@given(st.lists(st.integers(min_value=1, max_value=20), min_size=4, max_size=5))
def test_splitting_random(a):
    props.check_splitting(tuple(a))


def test_det_helper():
    assert props.det([[2, 1], [3, 2]]) == 1
    assert props.det([[0, 1], [1, 0]]) == -1
    assert props.det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3
    assert math.prod([1]) == 1

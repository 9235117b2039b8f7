import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
import properties as props
from stackcount.arith import DomainError, factor, smallest_prime_factor
from stackcount.torsors import (
    alpha,
    canonicalize_torsor,
    count_fields,
    count_fields_brute,
    count_torsors,
    disc_exponent,
    disc_height,
    disc_height_at_most,
    embed,
    enumerate_torsors,
    exact_quadratic_disc,
    is_field,
    iter_torsors,
)

nonzero_q = st.builds(lambda n, d, s: Fraction(s * n, d), st.integers(1, 10**6), st.integers(1, 10**4),
                      st.sampled_from([1, -1]))


def test_alpha():
    assert (alpha(2), alpha(3), alpha(6), alpha(9)) == (2, 6, 18, 54)
    assert disc_exponent(6) == 3
    with pytest.raises(DomainError):
        alpha(1)


def test_canonicalize_examples():
    c = canonicalize_torsor(50, 2)
    assert (c.rep, c.reduced_disc) == (2, 1)
    assert canonicalize_torsor(-8, 3).rep == 1
    c = canonicalize_torsor(5, 2)
    assert (c.rep, c.reduced_disc) == (5, 5)
    assert canonicalize_torsor(Fraction(1, 2), 2).rep == 2
    with pytest.raises(DomainError):
        canonicalize_torsor(0, 2)


def test_height_examples():
    assert disc_height(canonicalize_torsor(1, 5)) == 1
    assert disc_height(canonicalize_torsor(6, 2)) == pytest.approx(3)
    x = canonicalize_torsor(5, 6)
    assert x.reduced_disc == 5**5
    assert disc_height(x) == pytest.approx(5 ** (5 / 3))
    assert disc_height_at_most(x, Fraction(1463, 100)) and not disc_height_at_most(x, Fraction(1462, 100))


def test_quadratic_disc_examples():
    assert exact_quadratic_disc(canonicalize_torsor(5, 2)) == 5
    assert exact_quadratic_disc(canonicalize_torsor(3, 2)) == 12
    assert exact_quadratic_disc(canonicalize_torsor(-1, 2)) == -4
    assert exact_quadratic_disc(canonicalize_torsor(1, 2)) == 1


def test_is_field_examples():
    assert is_field(canonicalize_torsor(2, 4))
    assert not is_field(canonicalize_torsor(-4, 4))
    for m in (2, 3, 4, 6, 8):
        assert not is_field(canonicalize_torsor(1, m))


@pytest.mark.parametrize("m,B", [(2, 30), (3, 20), (4, 6), (6, 4), (8, 2), (9, 2), (12, 2), (5, 3)])
def test_is_field_matches_irreducibility(m, B):
    X = sympy.Symbol("X")
    for x in enumerate_torsors(m, B):
        assert is_field(x) == sympy.Poly(X**m - x.rep, X).is_irreducible, x


def test_enumeration_examples():
    assert [x.rep for x in enumerate_torsors(2, 1)] == [-2, -1, 1, 2]
    assert sorted(x.rep for x in enumerate_torsors(2, 3)) == [-6, -3, -2, -1, 1, 2, 3, 6]
    assert [x.rep for x in enumerate_torsors(3, 1)] == [1, 3, 9]
    with pytest.raises(DomainError):
        enumerate_torsors(2, Fraction(1, 2))


@pytest.mark.parametrize("m,B", [(2, 200), (3, 60), (4, 12), (6, 9), (5, 4)])
def test_enumeration_consistency(m, B):
    xs = enumerate_torsors(m, B)
    keys = [(x.reduced_disc, x.rep) for x in xs]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert sorted(keys) == sorted((x.reduced_disc, x.rep) for x in iter_torsors(m, B))
    assert len(xs) == count_torsors(m, B)
    k = disc_exponent(m)
    for x in xs:
        assert canonicalize_torsor(x.rep, m) == x
        assert disc_height_at_most(x, B)
        # H^k is exactly the integer reduced discriminant.
        assert isinstance(x.reduced_disc, int) and x.reduced_disc >= 1
        assert round(disc_height(x) ** k) == x.reduced_disc


def test_enumeration_is_complete_for_small_m2():
    # Every squarefree rep with |rep| <= 2B has odd part <= B, so this is all of them.
    B = 60
    reps = {x.rep for x in enumerate_torsors(2, B)}
    expected = set()
    for d in range(-2 * B, 2 * B + 1):
        if d and all(e == 1 for _, e in factor(d)):
            odd = abs(d) >> (abs(d) & -abs(d)).bit_length() - 1
            if odd <= B:
                expected.add(d)
    assert reps == expected


def test_frozen_torsor_counts():
    assert count_torsors(2, 10**6) == oracles.quadratic_torsor_count(10**6) == 1621144
    for B, N in [(10**3, 5301), (10**4, 65055), (10**5, 769401), (10**6, 8881341)]:
        assert count_torsors(3, B) == oracles.cubic_torsor_count(B) == N


@pytest.mark.parametrize("B", [5, 20, 60])
def test_sextic_pattern_count(B):
    budget = B**3
    assert count_torsors(6, B) == 72 * oracles.sextic_pattern_count(budget)


@pytest.mark.parametrize("m", [2, 3, 5, 6, 10, 15, 8, 12, 9])
def test_field_count_fast_path(m):
    for B in (1, 4, 15):
        assert count_fields(m, B) == count_fields_brute(m, B)


def test_frozen_field_counts():
    assert [count_fields(6, B) for B in (10**3, 10**4, 10**5)] == [53332, 590240, 6313794]


def test_quadratic_disc_oracle():
    # Odd part of the field discriminant is the reduced discriminant.
    for d in range(-(10**4), 10**4 + 1):
        if d == 0 or any(e > 1 for _, e in factor(d)):
            continue
        x = canonicalize_torsor(d, 2)
        D = abs(exact_quadratic_disc(x))
        while D % 2 == 0:
            D //= 2
        assert D == x.reduced_disc


def test_local_disc_vs_toric():
    for m in (2, 3, 4, 6, 9, 10):
        for k in range(10**3 * m):
            props.check_disc_vs_toric(m, k, full=k < 20 * m)


@settings(max_examples=1000)
@given(nonzero_q, st.sampled_from([2, 3, 4, 5, 6, 12]))
def test_canonicalize_torsor_idempotent(q, m):
    c = canonicalize_torsor(q, m)
    assert canonicalize_torsor(c.rep, m) == c


@settings(max_examples=1000)
@given(nonzero_q, nonzero_q, st.sampled_from([2, 3, 4, 6]))
def test_class_arithmetic(q1, q2, m):
    c1, c2 = canonicalize_torsor(q1, m), canonicalize_torsor(q2, m)
    assert canonicalize_torsor(q1 * q2, m) == canonicalize_torsor(c1.rep * c2.rep, m)


@pytest.mark.parametrize("m", [4, 6])
def test_pullback_law(m):
    r = smallest_prime_factor(m)
    for e in (d for d in range(2, m + 1) if m % d == 0):
        for y in enumerate_torsors(e, 1000 ** (1 / disc_exponent(e))):
            j = embed(y, m)
            # Sum over p not dividing m of m (1 - gcd(eps, e)/e) log p.
            expect = 1
            for p, eps in y.exponents:
                if m % p:
                    expect *= p ** (m - m * math.gcd(eps, e) // e)
            assert j.reduced_disc == expect
            lam = sum(
                Fraction(e - math.gcd(eps, e), e) / Fraction(r - 1, r) * math.log(p)
                for p, eps in y.exponents
                if m % p
            )
            assert math.log(disc_height(j)) == pytest.approx(float(lam), abs=1e-9)

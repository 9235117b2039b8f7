"""mu_m-torsors over Q, i.e. classes in Q^x / (Q^x)^m.

A class is stored through its canonical integer representative: every prime
exponent reduced into ``[0, m)``, and the sign dropped when ``m`` is odd.
Heights use the standard discriminant family: at primes ``p`` not dividing
``m`` the local factor comes from the tame discriminant exponent
``m - gcd(v_p, m)``; at primes dividing ``m`` and at infinity it is 1.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .arith import (
    DomainError,
    factor,
    integer_root,
    prime_divisors,
    primes_up_to,
    smallest_prime_factor,
)


def _check_m(m: int) -> None:
    if m < 2:
        raise DomainError(f"m must be at least 2, got {m}")


def alpha(m: int) -> int:
    """m^2 - m^2/r with r the smallest prime of m."""
    _check_m(m)
    r = smallest_prime_factor(m)
    return m * m - m * m // r


def disc_exponent(m: int) -> int:
    """k = m - m/r, so that H^k is the reduced discriminant."""
    _check_m(m)
    return m - m // smallest_prime_factor(m)


@dataclass(frozen=True)
class TorsorClass:
    m: int
    rep: int
    reduced_disc: int
    exponents: tuple[tuple[int, int], ...] = field(default=(), compare=False, repr=False)

    @property
    def sign(self) -> int:
        return 1 if self.rep > 0 else -1


def _reduced_disc(m: int, exponents: Iterable[tuple[int, int]]) -> int:
    out = 1
    for p, e in exponents:
        if m % p:
            out *= p ** (m - math.gcd(e, m))
    return out


def _make_class(m: int, sign: int, exponents: Iterable[tuple[int, int]]) -> TorsorClass:
    exps = tuple(sorted((p, e) for p, e in exponents if e))
    rep = sign
    for p, e in exps:
        rep *= p**e
    return TorsorClass(m, rep, _reduced_disc(m, exps), exps)


def canonicalize_torsor(q: int | Fraction, m: int) -> TorsorClass:
    _check_m(m)
    q = Fraction(q)
    if q == 0:
        raise DomainError("0 does not define a torsor")
    exps: dict[int, int] = {}
    for p, e in factor(q.numerator):
        exps[p] = exps.get(p, 0) + e
    if q.denominator > 1:
        for p, e in factor(q.denominator):
            exps[p] = exps.get(p, 0) - e
    sign = -1 if (q < 0 and m % 2 == 0) else 1
    return _make_class(m, sign, ((p, e % m) for p, e in exps.items()))


def disc_height(x: TorsorClass) -> float:
    """``reduced_disc ** (m / alpha(m))`` in double precision."""
    if x.reduced_disc == 1:
        return 1.0
    return math.exp(math.log(x.reduced_disc) / disc_exponent(x.m))


def disc_height_at_most(x: TorsorClass, B: int | Fraction) -> bool:
    """Exact test of ``disc_height(x) <= B``."""
    B = Fraction(B)
    k = disc_exponent(x.m)
    return x.reduced_disc * B.denominator**k <= B.numerator**k


def disc_budget(m: int, B: int | Fraction) -> int:
    """Largest reduced discriminant allowed by ``H <= B``."""
    B = Fraction(B)
    if B < 1:
        raise DomainError("torsor height bound must be at least 1")
    k = disc_exponent(m)
    return B.numerator**k // B.denominator**k


def exact_quadratic_disc(x: TorsorClass) -> int:
    """Discriminant of the etale algebra Q[X]/(X^2 - rep)."""
    if x.m != 2:
        raise DomainError("exact discriminant is implemented for m = 2 only")
    d = x.rep
    if any(e > 1 for _, e in factor(d)):
        raise AssertionError(f"canonical quadratic representative {d} is not squarefree")
    return d if d % 4 == 1 else 4 * d


def _is_field(m: int, sign: int, exponents: Iterable[tuple[int, int]]) -> bool:
    exps = [(p, e) for p, e in exponents if e]
    for ell in prime_divisors(m):
        if all(e % ell == 0 for _, e in exps) and (ell % 2 or sign > 0):
            return False
    if m % 4 == 0 and sign < 0:
        # rep in -4 (Q^x)^4: -rep/4 is a fourth power.
        shifted = {p: e for p, e in exps}
        shifted[2] = shifted.get(2, 0) - 2
        if all(e % 4 == 0 for e in shifted.values()):
            return False
    return True


def is_field(x: TorsorClass) -> bool:
    """True iff X^m - rep is irreducible over Q."""
    return _is_field(x.m, x.sign, x.exponents)


# ---------------------------------------------------------------------------
# Enumeration by recursive descent on the reduced discriminant
# ---------------------------------------------------------------------------


class _Descent:
    """Exponent patterns at primes not dividing m, under a reduced-discriminant budget."""

    def __init__(self, m: int, budget: int):
        self.m = m
        self.budget = budget
        self.k = disc_exponent(m)
        self.bad = prime_divisors(m)
        top = integer_root(budget, self.k)
        self.primes = [int(p) for p in primes_up_to(top) if m % int(p)]
        costs: dict[int, list[int]] = {}
        for e in range(1, m):
            costs.setdefault(m - math.gcd(e, m), []).append(e)
        self.groups = sorted(costs.items())

    def invisible_multiplicity(self) -> int:
        return self.m ** len(self.bad) * (2 if self.m % 2 == 0 else 1)

    def patterns(self) -> Iterator[tuple[int, tuple[tuple[int, int], ...]]]:
        """Yield ``(reduced_disc, exponents)`` for every visible pattern."""
        ps, groups, k = self.primes, self.groups, self.k

        def walk(i, budget, disc, exps):
            yield disc, exps
            for j in range(i, len(ps)):
                p = ps[j]
                if p**k > budget:
                    break
                for cost, elist in groups:
                    pc = p**cost
                    if pc > budget:
                        break
                    for e in elist:
                        yield from walk(j + 1, budget // pc, disc * pc, exps + ((p, e),))

        yield from walk(0, self.budget, 1, ())

    def count(self) -> int:
        """Number of visible patterns, counted without listing them."""
        ps, k = self.primes, self.k
        groups = [(cost, len(elist)) for cost, elist in self.groups]
        n = len(ps)

        def rec(i, budget):
            total = 1
            for j in range(i, n):
                p = ps[j]
                if p**k > budget:
                    break
                if j + 1 < n and (p * ps[j + 1]) ** k > budget:
                    # Only single primes still fit from here on.
                    for cost, mult in groups:
                        hi = bisect.bisect_right(ps, integer_root(budget, cost))
                        if hi > j:
                            total += mult * (hi - j)
                    break
                for cost, mult in groups:
                    pc = p**cost
                    if pc > budget:
                        break
                    total += mult * rec(j + 1, budget // pc)
            return total

        return rec(0, self.budget)

    def weighted_sum(self, s: float) -> float:
        """Sum of ``reduced_disc ** (-s/k)`` over visible patterns."""
        total = 0.0
        for disc, _ in self.patterns():
            total += disc ** (-s / self.k)
        return total

    def invisible(self) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
        """All ``(sign, exponents at p | m)`` combinations."""
        combos: list[tuple[tuple[int, int], ...]] = [()]
        for p in self.bad:
            combos = [c + ((p, e),) for c in combos for e in range(self.m)]
        signs = (1, -1) if self.m % 2 == 0 else (1,)
        return [(sg, c) for sg in signs for c in combos]


def enumerate_torsors(m: int, B: int | Fraction) -> list[TorsorClass]:
    """All classes with ``disc_height <= B``, ordered by ``(reduced_disc, rep)``."""
    _check_m(m)
    desc = _Descent(m, disc_budget(m, B))
    inv = desc.invisible()
    out = [
        _make_class(m, sign, vis + hidden)
        for _, vis in desc.patterns()
        for sign, hidden in inv
    ]
    out.sort(key=lambda x: (x.reduced_disc, x.rep))
    return out


def iter_torsors(m: int, B: int | Fraction) -> Iterator[TorsorClass]:
    """Same classes as :func:`enumerate_torsors`, streamed in descent order."""
    _check_m(m)
    desc = _Descent(m, disc_budget(m, B))
    inv = desc.invisible()
    for _, vis in desc.patterns():
        for sign, hidden in inv:
            yield _make_class(m, sign, vis + hidden)


def count_torsors(m: int, B: int | Fraction) -> int:
    _check_m(m)
    desc = _Descent(m, disc_budget(m, B))
    return desc.invisible_multiplicity() * desc.count()


def count_fields_brute(m: int, B: int | Fraction) -> int:
    """Count of classes with ``H <= B`` whose algebra is a field, testing each class."""
    _check_m(m)
    desc = _Descent(m, disc_budget(m, B))
    inv = desc.invisible()
    total = 0
    for _, vis in desc.patterns():
        for sign, hidden in inv:
            if _is_field(m, sign, vis + hidden):
                total += 1
    return total


def count_fields(m: int, B: int | Fraction) -> int:
    """Number of classes with ``H <= B`` whose algebra is a field.

    When 4 does not divide m, a class fails to be a field iff it is an
    ell-th power for some prime ell | m, so for each visible pattern the
    invisible completions are counted by inclusion-exclusion over the
    squarefree d | m dividing every visible exponent.
    """
    _check_m(m)
    if m % 4 == 0:
        return count_fields_brute(m, B)
    desc = _Descent(m, disc_budget(m, B))
    bad = desc.bad
    by_gcd: dict[int, int] = {}
    for _, vis in desc.patterns():
        g = m
        for _, e in vis:
            g = math.gcd(g, e)
        by_gcd[g] = by_gcd.get(g, 0) + 1
    sq = [1]
    for p in bad:
        sq += [d * p for d in sq]
    total = 0
    for g, n in by_gcd.items():
        per = 0
        for d in sq:
            if g % d:
                continue
            mu = -1 if len([p for p in bad if d % p == 0]) % 2 else 1
            signs = 1 if (m % 2 or d % 2 == 0) else 2
            per += mu * (m // d) ** len(bad) * signs
        total += n * per
    return total


def torsor_dirichlet_sum(m: int, s: float, N: int) -> float:
    """Sum of ``H(x)^-s`` over classes with ``reduced_disc <= N``."""
    _check_m(m)
    if s <= 1:
        raise DomainError(f"height zeta series diverges at s={s}")
    if N < 1:
        raise DomainError("N must be positive")
    desc = _Descent(m, int(N))
    return desc.invisible_multiplicity() * desc.weighted_sum(s)


def embed(y: TorsorClass, m: int) -> TorsorClass:
    """Image of a class of T(e), e | m, under y -> y^(m/e)."""
    if m % y.m:
        raise DomainError(f"{y.m} does not divide {m}")
    q = m // y.m
    sign = y.sign if (q % 2 and m % 2 == 0) else 1
    return _make_class(m, sign, ((p, (e * q) % m) for p, e in y.exponents))

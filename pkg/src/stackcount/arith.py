"""Exact integer arithmetic shared by the rest of the package.

Factorization, p-adic valuations, the Moebius function and truncated Euler
products for the Riemann zeta function.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

DEFAULT_PRIME_BOUND = 10**6
TRIAL_DIVISION_BOUND = 10**6

# Deterministic Miller-Rabin witnesses, valid below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes ``p <= limit`` as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # Sieve on a power of two so repeated calls share the cached table.
    size = 1 << max(10, (int(limit) - 1).bit_length())
    ps = _sieve(size)
    return ps[: np.searchsorted(ps, limit, side="right")]


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(TRIAL_DIVISION_BOUND))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split_large(d, out)
    _split_large(n // d, out)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of ``|n|`` as ascending ``(prime, exponent)`` pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def value(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out


@lru_cache(maxsize=1 << 16)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    found: dict[int, int] = {}
    rem = n
    for p in _small_primes():
        if p * p > rem:
            break
        if rem % p == 0:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            found[p] = e
    if rem > 1:
        _split_large(rem, found)
    return tuple(sorted(found.items()))


def factor(n: int) -> Factorization:
    """Exact prime factorization of ``|n|``.

    >>> factor(360).as_dict()
    {2: 3, 3: 2, 5: 1}
    """
    n = int(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    return Factorization(_factor_cached(abs(n)))


def padic_valuation(q: int | Fraction, p: int) -> int:
    """Exponent of the prime ``p`` in the nonzero rational ``q``."""
    q = Fraction(q)
    if q == 0:
        raise DomainError("valuation of 0 is +infinity")
    if p < 2:
        raise DomainError(f"{p} is not a prime")
    v = 0
    num, den = abs(q.numerator), q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError("mobius is defined for n >= 1")
    f = factor(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def smallest_prime_factor(n: int) -> int:
    if n < 2:
        raise DomainError("smallest prime factor needs n >= 2")
    return factor(n).pairs[0][0]


def prime_divisors(n: int) -> tuple[int, ...]:
    return factor(n).primes()


def divisors(n: int) -> list[int]:
    """Positive divisors of ``n`` in ascending order."""
    divs = [1]
    for p, e in factor(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    out = n
    for p in prime_divisors(n):
        out = out // p * (p - 1)
    return out


def integer_root(n: int, k: int) -> int:
    """Largest integer ``x >= 0`` with ``x**k <= n``."""
    if n < 0 or k < 1:
        raise DomainError("integer_root needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    # Integer Newton iteration started above the root decreases monotonically.
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


@dataclass(frozen=True)
class EulerProductResult:
    """A truncated Euler product and a bound on its relative truncation error."""

    value: float
    tail_bound: float
    prime_bound: int

    def __float__(self) -> float:
        return self.value


def zeta_tail_bound(s: float, prime_bound: int) -> float:
    """Relative-error bound for dropping the Euler factors at primes > prime_bound.

    Uses sum_{n > P} n^-s <= P^(1-s)/(s-1) and -log(1-x) <= x/(1-x).
    """
    partial = prime_bound ** (1.0 - s) / (s - 1.0)
    return math.expm1(partial / (1.0 - prime_bound ** (-s)))


def zeta_euler(
    s: float,
    prime_bound: int = DEFAULT_PRIME_BOUND,
    excluded_primes: Iterable[int] = (),
) -> EulerProductResult:
    """Euler product of the Riemann zeta function over primes up to ``prime_bound``."""
    if s <= 1:
        raise DomainError(f"zeta Euler product diverges at s={s}")
    if prime_bound < 1:
        raise DomainError("prime_bound must be positive")
    ps = primes_up_to(prime_bound).astype(np.float64)
    excluded = set(int(p) for p in excluded_primes)
    if excluded:
        ps = ps[~np.isin(ps, list(excluded))]
    value = float(np.exp(-np.sum(np.log1p(-(ps ** (-s))))))
    return EulerProductResult(value, zeta_tail_bound(s, prime_bound), prime_bound)

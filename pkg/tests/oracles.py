"""Independent reference computations used to check the package.

Nothing here imports the package: the counts come from Moebius sums over
boxes and from plain sieves.
"""

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=4)
def mobius_table(n: int) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    isp = np.ones(n + 1, dtype=bool)
    isp[:2] = False
    for p in range(2, n + 1):
        if isp[p]:
            isp[2 * p :: p] = False
            mu[p::p] *= -1
            mu[p * p :: p * p] = 0
    return mu


def iroot(n: int, k: int) -> int:
    x = int(round(n ** (1 / k)))
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def primitive_in_box(a, bounds, first_odd=False) -> int:
    """Nonzero a-primitive integer tuples with |x_j| <= bounds[j]."""
    mu = mobius_table(10**6)
    total = 0
    k = 1
    while k == 1 or all(k**aj <= b for aj, b in zip(a, bounds)):
        if mu[k] and not (first_odd and k % 2 == 0):
            prod = 1
            for j, (aj, b) in enumerate(zip(a, bounds)):
                q = b // k**aj
                prod *= 2 * ((q + 1) // 2) if (first_odd and j == 0) else 2 * q + 1
            total += int(mu[k]) * (prod - (0 if first_odd else 1))
        k += 1
    return total


def squarefree_upto(x: int) -> int:
    mu = mobius_table(10**6)
    return sum(int(mu[k]) * (x // (k * k)) for k in range(1, math.isqrt(x) + 1))


def odd_squarefree_upto(x: int) -> int:
    mu = mobius_table(10**6)
    return sum(int(mu[k]) * ((x // (k * k) + 1) // 2) for k in range(1, math.isqrt(x) + 1, 2))


def schanuel_count(B: int) -> int:
    """Classes in P(1,1) with degree-2 toric height <= B."""
    X = iroot(B, 2)
    return primitive_in_box((1, 1), (X, X)) // 2


def p23_count(B: int) -> int:
    """Classes in P(2,3) with degree-5 toric height <= B."""
    X, Y = iroot(B**2, 5), iroot(B**3, 5)
    # (x, 0) is fixed by t = -1; every other class has two primitive representatives.
    on_axis = 2 * squarefree_upto(X)
    return (primitive_in_box((2, 3), (X, Y)) - on_axis) // 2 + on_axis


def p46_count(B: int, first_odd=False) -> int:
    """Classes in P(4,6) with degree-10 height <= B; both weights even so t = -1 acts trivially."""
    X, Y = iroot(B**4, 10), iroot(B**6, 10)
    return primitive_in_box((4, 6), (X, Y), first_odd)


def quadratic_torsor_count(B: int) -> int:
    """m = 2: four classes (sign, 2-adic part) over every odd squarefree n <= B."""
    return 4 * odd_squarefree_upto(B)


def cubic_torsor_count(B: int) -> int:
    """m = 3: H = product of the primes p != 3 in the support, each with 2 exponents; 3 hidden classes."""
    om = np.zeros(B + 1, dtype=np.int64)
    isp = np.ones(B + 1, dtype=bool)
    isp[:2] = False
    for p in range(2, B + 1):
        if isp[p]:
            isp[2 * p :: p] = False
            om[p::p] += 1
    mu = mobius_table(max(B, 10))[: B + 1]
    n = np.arange(B + 1)
    ok = (mu != 0) & (n % 3 != 0) & (n > 0)
    return 3 * int(np.sum(2 ** om[ok]))


def sextic_pattern_count(budget: int) -> int:
    """m = 6 visible patterns with reduced discriminant <= budget, by factoring every D."""
    mult = {5: 2, 4: 2, 3: 1}  # cost m - gcd(e, 6) -> number of exponents e
    spf = list(range(budget + 1))
    for p in range(2, math.isqrt(budget) + 1):
        if spf[p] == p:
            for q in range(p * p, budget + 1, p):
                if spf[q] == q:
                    spf[q] = p
    total = 0
    for D in range(1, budget + 1):
        n, ways = D, 1
        while n > 1 and ways:
            p, e = spf[n], 0
            while n % p == 0:
                n //= p
                e += 1
            ways *= 0 if p in (2, 3) else mult.get(e, 0)
        total += ways
    return total

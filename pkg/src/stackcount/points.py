"""Rational points of weighted projective stacks P(a) over Q.

A point is an n-tuple up to the rescaling ``t . x = (t^a_1 x_1, ..., t^a_n x_n)``
with ``t`` in Q^x.  Every class has a unique integral representative that is
a-primitive (no prime ``p`` with ``p^a_j | x_j`` for all ``j``) and
sign-normalized (the first nonzero coordinate of odd weight is positive).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterator, Sequence

import numpy as np

from .arith import DomainError, integer_root, padic_valuation, prime_divisors, primes_up_to

Rational = int | Fraction


@dataclass(frozen=True)
class Weights:
    a: tuple[int, ...]

    def __init__(self, a: Sequence[int]):
        a = tuple(int(x) for x in a)
        if not a or any(x < 1 for x in a):
            raise DomainError(f"weights must be a nonempty vector of positive integers, got {a}")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def total(self) -> int:
        """|a|, the anticanonical degree."""
        return sum(self.a)

    @property
    def gcd(self) -> int:
        return reduce(math.gcd, self.a)

    @property
    def lcm(self) -> int:
        return reduce(lambda x, y: x * y // math.gcd(x, y), self.a)

    def __iter__(self):
        return iter(self.a)

    def __len__(self) -> int:
        return len(self.a)

    def __str__(self) -> str:
        return ",".join(map(str, self.a))


def as_weights(a: Weights | Sequence[int]) -> Weights:
    return a if isinstance(a, Weights) else Weights(a)


@dataclass(frozen=True)
class StackPoint:
    """Canonical integral representative of a class in [P(a)(Q)]."""

    coords: tuple[int, ...]
    weights: Weights

    def __iter__(self):
        return iter(self.coords)


def _as_tuple(x: Sequence[Rational], w: Weights) -> tuple[Fraction, ...]:
    if isinstance(x, StackPoint):
        x = x.coords
    xs = tuple(Fraction(v) for v in x)
    if len(xs) != w.n:
        raise DomainError(f"expected {w.n} coordinates, got {len(xs)}")
    if all(v == 0 for v in xs):
        raise DomainError("the zero tuple is not a point of P(a)")
    return xs


def act(t: Rational, x: Sequence[Rational], a: Weights | Sequence[int]) -> tuple[Fraction, ...]:
    """The weighted action ``t . x``."""
    w = as_weights(a)
    t = Fraction(t)
    return tuple(t**aj * Fraction(xj) for aj, xj in zip(w.a, x))


def r_p(x: Sequence[Rational], a: Weights | Sequence[int], p: int) -> int:
    """Least ``k`` such that ``p^k . x`` is p-integral, i.e. lies in D^a_p."""
    w = as_weights(a)
    xs = _as_tuple(x, w)
    return max(-(padic_valuation(xj, p) // aj) for xj, aj in zip(xs, w.a) if xj != 0)


def _scaling_primes(xs: Sequence[Fraction]) -> set[int]:
    # r_p < 0 needs p | every nonzero numerator; r_p > 0 needs p | some denominator.
    nonzero = [v for v in xs if v != 0]
    num_gcd = reduce(math.gcd, (abs(v.numerator) for v in nonzero))
    den_lcm = reduce(lambda u, v: u * v // math.gcd(u, v), (v.denominator for v in nonzero))
    out: set[int] = set()
    if num_gcd > 1:
        out.update(prime_divisors(num_gcd))
    if den_lcm > 1:
        out.update(prime_divisors(den_lcm))
    return out


def _first_odd_sign(coords: Sequence[int], a: Sequence[int]) -> int:
    for xj, aj in zip(coords, a):
        if aj % 2 and xj != 0:
            return 1 if xj > 0 else -1
    return 0


def canonicalize(x: Sequence[Rational], a: Weights | Sequence[int]) -> StackPoint:
    w = as_weights(a)
    xs = _as_tuple(x, w)
    t = Fraction(1)
    for p in _scaling_primes(xs):
        t *= Fraction(p) ** r_p(xs, w, p)
    scaled = act(t, xs, w)
    coords = tuple(int(v) for v in scaled)
    if _first_odd_sign(coords, w.a) < 0:
        coords = tuple(-c if aj % 2 else c for c, aj in zip(coords, w.a))
    return StackPoint(coords, w)


def class_equal(x: Sequence[Rational], y: Sequence[Rational], a: Weights | Sequence[int]) -> bool:
    return canonicalize(x, a) == canonicalize(y, a)


def is_canonical(coords: Sequence[int], a: Weights | Sequence[int]) -> bool:
    w = as_weights(a)
    try:
        return canonicalize(coords, w).coords == tuple(coords)
    except DomainError:
        return False


# ---------------------------------------------------------------------------
# Bounded enumeration
# ---------------------------------------------------------------------------


def coordinate_bounds(a: Weights | Sequence[int], d: int, B: Rational) -> tuple[int, ...]:
    """Per-axis bounds ``floor(B^(a_j/d))``, computed exactly for rational ``B``."""
    w = as_weights(a)
    B = Fraction(B)
    if B <= 0:
        raise DomainError("height bound must be positive")
    if d < 1:
        raise DomainError("degree must be a positive integer")
    return tuple(integer_root(B.numerator**aj // B.denominator**aj, d) for aj in w.a)


def height_at_most(coords: Sequence[int], a: Weights | Sequence[int], d: int, B: Rational) -> bool:
    """Exact test of ``max_j |x_j|^(d/a_j) <= B`` for an integral tuple."""
    w = as_weights(a)
    B = Fraction(B)
    return all(
        abs(int(xj)) ** d * B.denominator**aj <= B.numerator**aj for xj, aj in zip(coords, w.a)
    )


@dataclass(frozen=True)
class ResidueCondition:
    """``coords[index] mod modulus`` lies in ``residues``."""

    index: int
    modulus: int
    residues: frozenset[int]

    def __init__(self, index: int, modulus: int, residues):
        if modulus < 1:
            raise DomainError("modulus must be positive")
        object.__setattr__(self, "index", int(index))
        object.__setattr__(self, "modulus", int(modulus))
        object.__setattr__(self, "residues", frozenset(int(r) % modulus for r in residues))

    def __call__(self, coords: Sequence[int]) -> bool:
        return coords[self.index] % self.modulus in self.residues

    def row_mask(self, xs: np.ndarray, rest: tuple[int, ...]) -> np.ndarray | bool:
        if self.index == 0:
            return np.isin(xs % self.modulus, list(self.residues))
        return rest[self.index - 1] % self.modulus in self.residues


class _RowScanner:
    """Scans the search box row by row, for a fixed tuple of trailing coordinates.

    Within a row the first coordinate varies over a numpy vector; the
    trailing coordinates decide which primes can still violate
    a-primitivity, so the check reduces to a few modular masks.
    """

    def __init__(self, w: Weights, bounds: tuple[int, ...]):
        self.w = w
        self.bounds = bounds
        X1 = bounds[0]
        self.xs = np.arange(-X1, X1 + 1, dtype=np.int64)
        self.a1 = w.a[0]
        self._mask_cache: dict[tuple[int, ...], np.ndarray] = {}
        free = self.xs != 0
        for p in primes_up_to(integer_root(X1, self.a1)):
            free &= self.xs % (int(p) ** self.a1) != 0
        self._free = free
        self._pos = self.xs > 0
        self._nonneg = self.xs >= 0
        self._ones = np.ones_like(self.xs, dtype=bool)

    def _primitive_mask(self, rest: tuple[int, ...]) -> np.ndarray:
        nonzero = [(x, aj) for x, aj in zip(rest, self.w.a[1:]) if x != 0]
        if not nonzero:
            return self._free
        g = reduce(math.gcd, (abs(x) for x, _ in nonzero))
        if g == 1:
            return self._ones
        bad = tuple(
            p
            for p in prime_divisors(g)
            if all(padic_valuation(x, p) >= aj for x, aj in nonzero)
        )
        if not bad:
            return self._ones
        mask = self._mask_cache.get(bad)
        if mask is None:
            mask = self._ones.copy()
            for p in bad:
                mask &= self.xs % (p**self.a1) != 0
            self._mask_cache[bad] = mask
        return mask

    def row(self, rest: tuple[int, ...]) -> np.ndarray | None:
        """Mask over ``xs`` of canonical tuples ``(x1,) + rest``; None if the row is empty."""
        rest_sign = _first_odd_sign(rest, self.w.a[1:])
        if self.a1 % 2:
            sign = self._pos if rest_sign < 0 else self._nonneg
        elif rest_sign < 0:
            return None
        else:
            sign = self._ones
        return self._primitive_mask(rest) & sign

    def rests(self, outer: range | None = None) -> Iterator[tuple[int, ...]]:
        """Trailing coordinate tuples, last coordinate outermost, ascending."""
        ranges = [range(-X, X + 1) for X in self.bounds[1:]]
        if not ranges:
            yield ()
            return
        if outer is not None:
            ranges[-1] = outer
        for rev in itertools.product(*reversed(ranges)):
            yield rev[::-1]


def enumerate_classes(
    a: Weights | Sequence[int], d: int, B: Rational
) -> Iterator[StackPoint]:
    """All classes of toric height ``max_j |x_j|^(d/a_j) <= B``, each once.

    Order: lexicographic in ``(x_n, ..., x_1)``, i.e. the last coordinate is
    the outermost loop.
    """
    w = as_weights(a)
    scanner = _RowScanner(w, coordinate_bounds(w, d, B))
    for rest in scanner.rests():
        mask = scanner.row(rest)
        if mask is None:
            continue
        for x1 in scanner.xs[mask]:
            yield StackPoint((int(x1),) + rest, w)


def _count_chunk(args) -> tuple[int, int]:
    w, bounds, outer, condition = args
    scanner = _RowScanner(w, bounds)
    total = inside = 0
    for rest in scanner.rests(outer):
        mask = scanner.row(rest)
        if mask is None:
            continue
        total += int(np.count_nonzero(mask))
        if condition is not None:
            inside += int(np.count_nonzero(mask & condition.row_mask(scanner.xs, rest)))
    return total, inside


def _split_range(lo: int, hi: int, parts: int) -> list[range]:
    size = hi - lo + 1
    cuts = [lo + size * k // parts for k in range(parts + 1)]
    return [range(cuts[k], cuts[k + 1]) for k in range(parts) if cuts[k] < cuts[k + 1]]


def count_classes(
    a: Weights | Sequence[int],
    d: int,
    B: Rational,
    condition: ResidueCondition | None = None,
    workers: int = 1,
) -> int | tuple[int, int]:
    """Number of classes counted by :func:`enumerate_classes`, without materializing them.

    With ``condition`` returns ``(total, inside)`` from a single pass.
    ``workers > 1`` partitions the outermost coordinate across processes.
    """
    w = as_weights(a)
    bounds = coordinate_bounds(w, d, B)
    if workers > 1 and w.n > 1:
        X = bounds[-1]
        jobs = [(w, bounds, r, condition) for r in _split_range(-X, X, workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_chunk, jobs))
        total = sum(t for t, _ in parts)
        inside = sum(i for _, i in parts)
    else:
        total, inside = _count_chunk((w, bounds, None, condition))
    return (total, inside) if condition is not None else total


def brute_force_classes(a: Weights | Sequence[int], d: int, B: Rational) -> list[StackPoint]:
    """Reference enumeration: every tuple in the box that is its own canonical form."""
    w = as_weights(a)
    bounds = coordinate_bounds(w, d, B)
    out = []
    for coords in itertools.product(*(range(-X, X + 1) for X in bounds)):
        if any(coords) and canonicalize(coords, w).coords == coords:
            out.append(StackPoint(coords, w))
    return out


# ---------------------------------------------------------------------------
# SL_n(Z) completion of the reduced weight vector
# ---------------------------------------------------------------------------


def _complete_primitive(b: list[int]) -> list[list[int]]:
    n = len(b)
    if n == 1:
        if abs(b[0]) != 1:
            raise DomainError("first column must be primitive")
        return [[b[0]]]
    g = reduce(math.gcd, b[:-1])
    head = _complete_primitive([x // g for x in b[:-1]])
    last = b[-1]
    # Solve g*s - last*t = 1 with the least t >= 0.
    t = 0 if g == 1 else (-pow(last, -1, g)) % g
    s = (1 + last * t) // g
    c = [row[0] for row in head]
    rows = [[g * c[i]] + head[i][1:] + [t * c[i]] for i in range(n - 1)]
    rows.append([last] + [0] * (n - 2) + [s])
    return rows


def weight_splitting_matrix(a: Weights | Sequence[int]) -> list[list[int]]:
    """Integer matrix of determinant 1 whose first column is ``a / gcd(a)``."""
    w = as_weights(a)
    return _complete_primitive([aj // w.gcd for aj in w.a])

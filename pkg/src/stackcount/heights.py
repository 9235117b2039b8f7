"""Toric and quasi-toric heights on [P(a)(Q)].

The local toric factor at a prime ``p`` is ``p^(d * r_p(x))``; at infinity it
is ``(max_j |x_j|^(1/a_j))^d``.  Quasi-toric families here multiply the local
factor at finitely many places by positive rational constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .arith import DomainError
from .points import Rational, Weights, _as_tuple, _scaling_primes, as_weights, height_at_most, r_p

INFINITY = "inf"

TORIC = "toric"
TWISTED = "twisted"
DISCRIMINANT = "discriminant"


@dataclass(frozen=True)
class HeightFamily:
    """A degree-``d`` family of local height factors on P(a)."""

    weights: Weights
    degree: int
    kind: str = TORIC
    twists: Mapping[int | str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "weights", as_weights(self.weights))
        if self.degree < 1:
            raise DomainError("degree must be a positive integer")
        if self.kind not in (TORIC, TWISTED, DISCRIMINANT):
            raise DomainError(f"unknown height family kind {self.kind!r}")
        twists = {k: Fraction(v) for k, v in dict(self.twists).items()}
        if any(c <= 0 for c in twists.values()):
            raise DomainError("twist constants must be positive")
        if twists and self.kind != TWISTED:
            raise DomainError("only twisted families carry twist constants")
        if self.kind == DISCRIMINANT:
            if self.weights.n != 1 or self.degree != self.weights.a[0]:
                raise DomainError("discriminant families live on P(m) with degree m")
        object.__setattr__(self, "twists", twists)

    @classmethod
    def toric(cls, a, d: int) -> "HeightFamily":
        return cls(as_weights(a), d)

    @classmethod
    def twisted(cls, a, d: int, twists: Mapping[int | str, Rational]) -> "HeightFamily":
        return cls(as_weights(a), d, TWISTED, dict(twists))

    @classmethod
    def discriminant(cls, m: int) -> "HeightFamily":
        return cls(Weights((m,)), m, DISCRIMINANT)

    @property
    def twist_product(self) -> Fraction:
        out = Fraction(1)
        for c in self.twists.values():
            out *= c
        return out


@dataclass(frozen=True)
class LocalHeightValue:
    """Value of a local height factor; at a prime it is ``p ** exponent`` exactly."""

    place: int | str
    value: float
    exponent: Fraction | None = None


def toric_local_factor(x: Sequence[Rational], a, d: int, p: int) -> LocalHeightValue:
    w = as_weights(a)
    k = d * r_p(x, w, p)
    return LocalHeightValue(p, float(Fraction(p) ** k), Fraction(k))


def _log_abs(v: Fraction) -> float:
    return math.log(abs(v.numerator)) - math.log(v.denominator)


def _log_arch(xs: Sequence[Fraction], w: Weights, d: int) -> float:
    return d * max(_log_abs(xj) / aj for xj, aj in zip(xs, w.a) if xj != 0)


def toric_arch_factor(x: Sequence[Rational], a, d: int) -> float:
    """``(max_j |x_j|^(1/a_j))^d`` as a float."""
    w = as_weights(a)
    return math.exp(_log_arch(_as_tuple(x, w), w, d))


def arch_factor_at_most(x: Sequence[int], a, d: int, B: Rational) -> bool:
    """Exact comparison of the archimedean factor of an integral tuple with ``B``."""
    return height_at_most(x, a, d, B)


def height(x: Sequence[Rational], family: HeightFamily) -> float:
    """Global height as the product of all local factors of any representative."""
    if family.kind == DISCRIMINANT:
        raise DomainError("discriminant heights are computed on torsor classes")
    w, d = family.weights, family.degree
    xs = _as_tuple(x, w)
    log_h = _log_arch(xs, w, d)
    for p in _scaling_primes(xs):
        log_h += d * r_p(xs, w, p) * math.log(p)
    for c in family.twists.values():
        log_h += _log_abs(c)
    return math.exp(log_h)


def torus_local_pairing(s: Sequence[complex], e: Sequence[int], a, p: int) -> complex:
    """``prod_j p^(-e_j s_j)`` on the torus class with valuation vector ``e`` in D^a_p.

    At ``s = (1, ..., 1)`` this is the reciprocal of the local height of the
    class in the degree-|a| toric family.
    """
    w = as_weights(a)
    if len(e) != w.n or len(s) != w.n:
        raise DomainError("dimension mismatch")
    if any(ej < 0 for ej in e) or all(ej >= aj for ej, aj in zip(e, w.a)):
        raise DomainError(f"valuation vector {tuple(e)} is outside the D^a range")
    out = complex(1.0)
    for ej, sj in zip(e, s):
        out *= complex(p) ** (-ej * complex(sj))
    return out

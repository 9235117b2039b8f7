"""Local Fourier transforms, height zeta partial sums and predicted leading constants."""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np

from .arith import (
    DEFAULT_PRIME_BOUND,
    DomainError,
    EulerProductResult,
    divisors,
    mobius,
    prime_divisors,
    primes_up_to,
    smallest_prime_factor,
    zeta_euler,
)
from .points import Weights, as_weights
from .torsors import alpha, torsor_dirichlet_sum

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class Constant:
    """A predicted constant and an absolute bound on its truncation error."""

    value: float
    tail: float = 0.0

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return f"{self.value:.12g} +- {self.tail:.3g}"


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StackCharacter:
    """Unramified character of the local torus class group of P(a).

    ``z[j]`` is the value of the j-th component at the uniformizer; the
    values must satisfy ``prod_j z_j^a_j = 1``.
    """

    weights: Weights
    z: tuple[complex, ...]
    ramified: bool = False

    def __post_init__(self):
        w = as_weights(self.weights)
        object.__setattr__(self, "weights", w)
        z = tuple(complex(v) for v in self.z)
        object.__setattr__(self, "z", z)
        if len(z) != w.n:
            raise DomainError("character dimension does not match weights")
        if any(abs(abs(v) - 1) > UNIT_TOL for v in z):
            raise DomainError("character values must lie on the unit circle")
        prod = complex(1)
        for v, aj in zip(z, w.a):
            prod *= v**aj
        if abs(prod - 1) > UNIT_TOL:
            raise DomainError(f"prod z_j^a_j = {prod} is not 1")

    @classmethod
    def trivial(cls, a) -> "StackCharacter":
        w = as_weights(a)
        return cls(w, (1,) * w.n)

    @classmethod
    def random(cls, a, rng: random.Random) -> "StackCharacter":
        w = as_weights(a)
        angles = [rng.uniform(0, 2 * math.pi) for _ in range(w.n - 1)]
        rest = -sum(aj * t for aj, t in zip(w.a, angles)) + 2 * math.pi * rng.randrange(w.a[-1])
        angles.append(rest / w.a[-1])
        return cls(w, tuple(cmath.exp(1j * t) for t in angles))


@dataclass(frozen=True)
class TorsorCharacter:
    """Character of Q_p^x/(Q_p^x)^m with value ``exp(2 pi i k/m)`` at p."""

    m: int
    k: int = 0
    ramified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % self.m)

    def value(self, j: int = 1) -> complex:
        return cmath.exp(2j * math.pi * (self.k * j % self.m) / self.m)


def _check_s(s: Sequence[complex]) -> tuple[complex, ...]:
    s = tuple(complex(x) for x in s)
    if any(x.real <= 0 for x in s):
        raise DomainError("transforms require Re(s_j) > 0")
    return s


# ---------------------------------------------------------------------------
# Toric transforms
# ---------------------------------------------------------------------------


def toric_transform_closed(a, p: int, s: Sequence[complex], chi: StackCharacter | None = None) -> complex:
    """prod_j L_p(s_j, chi_j) / zeta_p(a.s)."""
    w = as_weights(a)
    s = _check_s(s)
    chi = chi or StackCharacter.trivial(w)
    if chi.ramified:
        return 0j
    out = 1 - complex(p) ** (-sum(aj * sj for aj, sj in zip(w.a, s)))
    for zj, sj in zip(chi.z, s):
        out /= 1 - zj * complex(p) ** (-sj)
    return out


def toric_transform_brute(
    a,
    p: int,
    s: Sequence[complex],
    chi: StackCharacter | None = None,
    cutoff: int = 200,
    enumerate_valuations: bool = False,
) -> complex:
    """Sum of prod_j (z_j p^-s_j)^e_j over valuation vectors e in [0, cutoff]^n within D^a.

    The D^a range is the box minus the corner where every ``e_j >= a_j``;
    by default the sum is organized that way, from explicit finite term
    sums.  ``enumerate_valuations=True`` visits every vector instead.
    """
    w = as_weights(a)
    s = _check_s(s)
    chi = chi or StackCharacter.trivial(w)
    if chi.ramified:
        return 0j
    ws = [zj * complex(p) ** (-sj) for zj, sj in zip(chi.z, s)]
    powers = [[wj**k for k in range(cutoff + 1)] for wj in ws]
    if enumerate_valuations:
        total = 0j
        for e in itertools.product(range(cutoff + 1), repeat=w.n):
            if all(ej >= aj for ej, aj in zip(e, w.a)):
                continue
            term = complex(1)
            for j, ej in enumerate(e):
                term *= powers[j][ej]
            total += term
        return total
    box = corner = complex(1)
    for j, aj in enumerate(w.a):
        box *= sum(powers[j])
        corner *= sum(powers[j][aj:])
    return box - corner


# ---------------------------------------------------------------------------
# Discriminant transforms and height zeta sums
# ---------------------------------------------------------------------------


def disc_exponents(m: int) -> list[Fraction]:
    """Exponents (m^2 - m gcd(j, m))/alpha(m) for j = 0..m-1."""
    al = alpha(m)
    return [Fraction(m * m - m * math.gcd(j, m), al) for j in range(m)]


def disc_transform_closed(m: int, p: int, s: complex, chi: TorsorCharacter | None = None) -> complex:
    if m % p == 0:
        raise DomainError(f"p={p} divides m={m}; the tame formula does not apply")
    if complex(s).real <= 0:
        raise DomainError("transform requires Re(s) > 0")
    chi = chi or TorsorCharacter(m)
    if chi.ramified:
        return 0j
    return sum(
        complex(p) ** (-complex(s) * float(lam)) * chi.value(j)
        for j, lam in enumerate(disc_exponents(m))
    )


def lfactor_ratio_bound(m: int, sigma: float, p: int) -> float:
    """Right-hand side of the comparison between the discriminant transform and L-factors."""
    al = alpha(m)
    r = smallest_prime_factor(m)
    x = sigma * (1 + 1 / al)
    # log(zeta_p(x)/zeta_p(2x)) = log(1 + p^-x)
    log_bound = 2 ** (r - 1) * m**3 * math.log1p(p ** (-x))
    return math.exp(log_bound) if log_bound < 700 else math.inf


def lfactor_product(m: int, p: int, s: complex, chi: TorsorCharacter) -> complex:
    """prod_{j=1}^{r-1} L_p(s, chi^(m j / r))."""
    r = smallest_prime_factor(m)
    out = complex(1)
    for j in range(1, r):
        out /= 1 - chi.value(m * j // r) * complex(p) ** (-complex(s))
    return out


def dirichlet_partial(m: int, s: float, N: int) -> float:
    """Sum of H(x)^-s over torsor classes with reduced discriminant <= N."""
    return torsor_dirichlet_sum(m, s, N)


def invisible_weight(m: int) -> int:
    """Number of classes sharing each visible pattern: exponents at p | m, and the sign."""
    return m ** len(prime_divisors(m)) * (2 if m % 2 == 0 else 1)


def dirichlet_euler_product(m: int, s: float, prime_bound: int = DEFAULT_PRIME_BOUND) -> EulerProductResult:
    """The limit of :func:`dirichlet_partial` as N grows, as a truncated Euler product."""
    if s <= 1:
        raise DomainError(f"height zeta series diverges at s={s}")
    ps = primes_up_to(prime_bound).astype(np.float64)
    ps = ps[np.array([m % int(p) != 0 for p in ps], dtype=bool)] if len(ps) else ps
    local = np.zeros_like(ps)
    for lam in disc_exponents(m):
        local += ps ** (-s * float(lam))
    value = invisible_weight(m) * float(np.exp(np.sum(np.log(local))))
    # Every nonzero exponent is >= 1, so log(local) <= (m-1) p^-s.
    tail = math.expm1((m - 1) * prime_bound ** (1 - s) / (s - 1))
    return EulerProductResult(value, tail, prime_bound)


# ---------------------------------------------------------------------------
# Leading constants for torsor counts
# ---------------------------------------------------------------------------

Poly = dict[Fraction, int]


def _poly_mul(f: Poly, g: Poly) -> Poly:
    out: Poly = {}
    for ef, cf in f.items():
        for eg, cg in g.items():
            out[ef + eg] = out.get(ef + eg, 0) + cf * cg
    return {e: c for e, c in out.items() if c}


def _embedded_exponents(m: int, e: int) -> list[Fraction]:
    r = smallest_prime_factor(m)
    return [Fraction(e - math.gcd(eps, e), e) / Fraction(r - 1, r) for eps in range(e)]


def embedded_constant(m: int, e: int, prime_bound: int = DEFAULT_PRIME_BOUND) -> Constant:
    """lim (s-1)^(r-1) of the height zeta function of T(e) pulled back to T(m).

    Local factors: ``e`` classes at each p | m (height 1), ``|mu_e(Q)|`` signs,
    and at p not dividing m the sum over exponents of ``p^(-lambda)`` where
    ``lambda = (1 - gcd(eps, e)/e)/(1 - 1/r)``.  Convergence is accelerated by
    dividing out ``zeta(lambda)`` for every exponent ``lambda > 1``, which leaves
    local factors ``1 + O(p^-2)``.
    """
    r = smallest_prime_factor(m)
    if m % e or e % r:
        raise DomainError(f"need e | m and r | e (m={m}, e={e}, r={r})")
    bad = prime_divisors(m)
    lams = _embedded_exponents(m, e)
    mult: dict[Fraction, int] = {}
    for lam in lams:
        if lam > 1:
            mult[lam] = mult.get(lam, 0) + 1
    if sum(1 for lam in lams if lam == 1) != r - 1:
        raise AssertionError("pole order mismatch")

    local: Poly = {}
    for lam in lams:
        local[lam] = local.get(lam, 0) + 1
    one_minus_x = {Fraction(0): 1, Fraction(1): -1}
    for _ in range(r - 1):
        local = _poly_mul(local, one_minus_x)
    for lam, c in mult.items():
        for _ in range(c):
            local = _poly_mul(local, {Fraction(0): 1, lam: -1})
    if local.pop(Fraction(0), 0) != 1 or any(mu < 2 for mu in local):
        raise AssertionError("accelerated local factor is not 1 + O(p^-2)")
    K = sum(abs(c) for c in local.values())

    ps = primes_up_to(prime_bound).astype(np.float64)
    ps = ps[np.array([m % int(p) != 0 for p in ps], dtype=bool)]
    G = np.ones_like(ps)
    for mu, c in local.items():
        G += c * ps ** (-float(mu))
    log_value = float(np.sum(np.log(G)))

    log_value += len(bad) * math.log(e) + (math.log(2) if e % 2 == 0 else 0.0)
    log_value += (r - 1) * sum(math.log1p(-1 / p) for p in bad)
    for lam, c in mult.items():
        z = float(mpmath.zeta(mpmath.mpf(lam.numerator) / lam.denominator))
        z *= math.prod(1 - p ** (-float(lam)) for p in bad)
        log_value += c * math.log(z)
    value = math.exp(log_value)
    P = prime_bound
    if K >= P * P:
        raise DomainError("prime_bound too small for a tail bound")
    rel = math.expm1(K / (P * (1 - K / (P * P))))
    return Constant(value, value * rel)


def torsor_leading_constant(m: int, prime_bound: int = DEFAULT_PRIME_BOUND) -> Constant:
    """Coefficient c with #{x : H(x) <= B} ~ c B log(B)^(r-2)."""
    r = smallest_prime_factor(m)
    c = embedded_constant(m, m, prime_bound)
    f = math.factorial(r - 2)
    return Constant(c.value / f, c.tail / f)


def field_count_constant(m: int, prime_bound: int = DEFAULT_PRIME_BOUND) -> Constant:
    """Coefficient of B log(B)^(r-2) in the count of torsors that are fields."""
    if m % 4 == 0:
        raise DomainError(
            "the field-count constant is only available when 4 does not divide m; "
            "for 4 | m over Q use the brute-force field count"
        )
    r = smallest_prime_factor(m)
    f = math.factorial(r - 2)
    value = tail = 0.0
    for d in divisors(m):
        mu = mobius(d)
        if mu == 0 or (m // d) % r:
            continue
        c = embedded_constant(m, m // d, prime_bound)
        value += mu * c.value
        tail += c.tail
    return Constant(value / f, tail / f)


def secondary_exponent(m: int) -> float | None:
    """Exponent theta of the next term B^theta in torsor counts with r = 2, if any."""
    lams = sorted(lam for lam in _embedded_exponents(m, m) if lam > 1)
    return float(1 / lams[0]) if lams else None


# ---------------------------------------------------------------------------
# Constants for stacks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldInvariants:
    r1: int
    r2: int
    h: int
    reg: float
    w: int
    disc: int
    zeta_at: Callable[[float], float | EulerProductResult]

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0 or self.r1 + 2 * self.r2 < 1:
            raise DomainError("invalid signature")
        if self.h < 1 or self.w < 1 or self.disc < 1:
            raise DomainError("class number, roots of unity and |disc| must be >= 1")

    @classmethod
    def rationals(cls, prime_bound: int = DEFAULT_PRIME_BOUND) -> "FieldInvariants":
        return cls(1, 0, 1, 1.0, 2, 1, lambda s: zeta_euler(s, prime_bound))


def toric_peyre_constant(
    a,
    inv: FieldInvariants | None = None,
    twists: Mapping[object, Fraction | int] | None = None,
) -> Constant:
    """Leading coefficient c of #{x : H(x) <= B} ~ c B for the degree-|a| toric height.

    ``h/zeta_F(|a|) * (2^r1 (2 pi)^r2 / sqrt(disc))^n * |a|^(r1+r2-1) * Reg * |mu_gcd(a)(F)| / w``,
    divided by the product of the twist constants for twisted families.
    """
    w = as_weights(a)
    inv = inv or FieldInvariants.rationals()
    if w.total < 2:
        raise DomainError("|a| must be at least 2")
    z = inv.zeta_at(w.total)
    zval = float(z)
    rel = getattr(z, "tail_bound", 0.0)
    archimedean = (2**inv.r1 * (2 * math.pi) ** inv.r2 / math.sqrt(inv.disc)) ** w.n
    roots = math.gcd(w.gcd, inv.w)
    value = inv.h / zval * archimedean * w.total ** (inv.r1 + inv.r2 - 1) * inv.reg * roots / inv.w
    if twists:
        for c in twists.values():
            value /= float(Fraction(c))
    return Constant(value, value * rel)


# ---------------------------------------------------------------------------
# Local volumes for equidistribution
# ---------------------------------------------------------------------------


def local_volume_ratio(
    a,
    p: int,
    condition: Callable[[tuple[int, ...]], bool],
    k: int = 1,
) -> Fraction:
    """omega_p(W)/omega_p(all) for W defined by residues of the coordinates mod p^k.

    The local height is identically 1 on D^a_p, so the ratio is the Haar
    volume of W intersected with D^a_p, divided by vol(D^a_p) = 1 - p^-|a|.
    """
    w = as_weights(a)
    if k < 1:
        raise DomainError("k must be at least 1")
    q = p**k
    cell = Fraction(1, q**w.n)
    inside = Fraction(0)
    for c in itertools.product(range(q), repeat=w.n):
        if not condition(c):
            continue
        # Volume of the part of c + p^k Z_p^n outside D^a_p.
        outside = Fraction(1)
        for cj, aj in zip(c, w.a):
            if k >= aj:
                outside *= Fraction(1, q) if cj % p**aj == 0 else 0
            else:
                outside *= Fraction(1, p**aj) if cj == 0 else 0
            if not outside:
                break
        inside += cell - outside
    return inside / (1 - Fraction(1, p**w.total))


def arch_sign_ratio(a, allowed: set[tuple[int, ...]] | Sequence[tuple[int, ...]]) -> Fraction:
    """Fraction of R^n occupied by the allowed sign patterns (entries +1/-1).

    The pattern set must be stable under ``t = -1``, which flips the signs of
    the odd-weight coordinates; otherwise it does not describe a set of classes.
    """
    w = as_weights(a)
    allowed = {tuple(int(v) for v in pat) for pat in allowed}
    for pat in allowed:
        if len(pat) != w.n or any(v not in (1, -1) for v in pat):
            raise DomainError(f"bad sign pattern {pat}")
        flipped = tuple(-v if aj % 2 else v for v, aj in zip(pat, w.a))
        if flipped not in allowed:
            raise DomainError(f"sign patterns are not stable under t = -1: {pat}")
    return Fraction(len(allowed), 2**w.n)


def local_class_group_order(m: int, p: int) -> int:
    """|Q_p^x / (Q_p^x)^m| by counting m-th powers of residues mod p^K.

    K = 2 v_p(m) + 1 suffices by Hensel's lemma.
    """
    v = 0
    mm = m
    while mm % p == 0:
        mm //= p
        v += 1
    q = p ** (2 * v + 1)
    units = [u for u in range(1, q) if u % p]
    powers = {pow(u, m, q) for u in units}
    return m * len(units) // len(powers)


# ---------------------------------------------------------------------------
# Fitting counts over a bound ladder
# ---------------------------------------------------------------------------


def count_basis(r: int, theta: float | None = None) -> list[Callable[[float], float]]:
    """Basis for least-squares fits of N(B) with leading term B log(B)^(r-2).

    For r > 2 the second function is B log(B)^(r-3); for r = 2 it is
    B^theta when a secondary exponent is known.
    """
    lead = lambda B: B * math.log(B) ** (r - 2)  # noqa: E731
    if r > 2:
        return [lead, lambda B: B * math.log(B) ** (r - 3)]
    if theta is not None:
        return [lead, lambda B: B**theta]
    return [lead]


def fit_leading(bounds: Sequence[float], counts: Sequence[int], basis) -> tuple[float, ...]:
    """Least-squares coefficients, weighting each point by 1/N(B)."""
    if len(bounds) < len(basis):
        raise DomainError(f"need at least {len(basis)} bounds to fit {len(basis)} coefficients")
    B = [float(b) for b in bounds]
    N = np.array([float(c) for c in counts])
    A = np.array([[f(b) for f in basis] for b in B]) / N[:, None]
    coef, *_ = np.linalg.lstsq(A, np.ones(len(B)), rcond=None)
    return tuple(float(c) for c in coef)

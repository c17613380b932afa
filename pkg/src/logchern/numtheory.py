"""Exact number theory used by the root-cover error terms.

Dedekind sums s(q, p), Hirzebruch-Jung (negative-regular) continued
fractions and their lengths l(q, p), the combined term
c(q, p) = 12 s(q, p) + l(q, p), and the bad set of residues whose sum or
length is too large for the sqrt(p)-size error estimates.

Everything here is exact.  The only floating point value is the reported
size bound of the bad set, which is transcendental anyway.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from sympy import isprime, nextprime, prevprime, primerange

__all__ = [
    "HJExpansion",
    "BadSet",
    "CensusRow",
    "dedekind_sum",
    "dedekind_sum_direct",
    "hj_expansion",
    "hj_length",
    "c_value",
    "mod_inverse",
    "is_bad",
    "bad_set",
    "bad_set_bound",
    "census_row",
    "census",
    "is_prime",
    "primes_in",
    "spaced_primes",
]


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


def primes_in(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi."""
    if hi < 2 or hi < lo:
        return []
    return [int(p) for p in primerange(max(lo, 2), hi + 1)]


def spaced_primes(lo: int, hi: int, n: int) -> list[int]:
    """About n primes in [lo, hi], geometrically spaced; duplicates dropped."""
    if n < 1 or hi < max(lo, 2):
        return []
    lo = max(lo, 2)
    out: list[int] = []
    for k in range(n):
        target = lo * (hi / lo) ** (k / (n - 1)) if n > 1 else lo
        q = int(nextprime(math.ceil(target) - 1))
        if q > hi:
            q = int(prevprime(hi + 1))
        if lo <= q <= hi and q not in out:
            out.append(q)
    return out


def _check_pair(q: int, p: int) -> None:
    if not (0 < q < p):
        raise ValueError(f"need 0 < q < p, got q={q}, p={p}")
    if math.gcd(q, p) != 1:
        raise ValueError(f"q={q} and p={p} are not coprime")


def _twelve_s(q: int, p: int) -> tuple[int, int]:
    """Return (num, den) with num/den == 12 s(q, p), in lowest terms.

    Runs the reciprocity law down the Euclidean algorithm:
    12 s(b, a) = -12 s(a mod b, b) + (a^2 + b^2 + 1)/(a b) - 3.
    """
    num, den, sign = 0, 1, 1
    a, b = p, q
    while b > 0 and a != 1:
        tn = a * a + b * b + 1 - 3 * a * b
        td = a * b
        num = num * td + sign * tn * den
        den *= td
        g = math.gcd(num, den)
        num //= g
        den //= g
        a, b = b, a % b
        sign = -sign
    return num, den


def dedekind_sum(q: int, p: int) -> Fraction:
    """Dedekind sum s(q, p) for 0 < q < p coprime, in O(log p) steps."""
    _check_pair(q, p)
    num, den = _twelve_s(q, p)
    return Fraction(num, 12 * den)


def _sawtooth(x: Fraction) -> Fraction:
    if x.denominator == 1:
        return Fraction(0)
    return x - math.floor(x) - Fraction(1, 2)


def dedekind_sum_direct(q: int, p: int) -> Fraction:
    """s(q, p) by the defining sum over k = 1..p-1.  O(p); oracle only."""
    _check_pair(q, p)
    return sum(
        (_sawtooth(Fraction(k, p)) * _sawtooth(Fraction(k * q, p)) for k in range(1, p)),
        Fraction(0),
    )


@dataclass(frozen=True)
class HJExpansion:
    """p/q = b1 - 1/(b2 - 1/(... - 1/bl)), all bi >= 2."""

    q: int
    p: int
    coefficients: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.coefficients)

    def value(self) -> Fraction:
        acc = Fraction(self.coefficients[-1])
        for b in reversed(self.coefficients[:-1]):
            acc = b - 1 / acc
        return acc


def hj_expansion(q: int, p: int) -> HJExpansion:
    """Negative-regular continued fraction of p/q (ceiling at each step)."""
    if not (0 < q < p):
        raise ValueError(f"need 0 < q < p, got q={q}, p={p}")
    coeffs = []
    a, b = p, q
    while b > 0:
        c = -(-a // b)
        coeffs.append(c)
        a, b = b, c * b - a
    return HJExpansion(q, p, tuple(coeffs))


def hj_length(q: int, p: int) -> int:
    """l(q, p) without expanding.

    If p/q = [a1; a2, ..., an] is the regular continued fraction, the
    negative one is [a1+1, 2 x (a2-1), a3+2, 2 x (a4-1), ...], hence
    l = ceil(n/2) + sum over even positions of (a_i - 1).
    """
    if not (0 < q < p):
        raise ValueError(f"need 0 < q < p, got q={q}, p={p}")
    n = 0
    total = 0
    a, b = p, q
    while b:
        n += 1
        quo, rem = divmod(a, b)
        if n % 2 == 0:
            total += quo - 1
        a, b = b, rem
    return total + (n + 1) // 2


def c_value(q: int, p: int) -> Fraction:
    """c(q, p) = 12 s(q, p) + l(q, p)."""
    _check_pair(q, p)
    num, den = _twelve_s(q, p)
    return Fraction(num, den) + hj_length(q, p)


def mod_inverse(v: int, p: int) -> int:
    """v' in (0, p) with v v' = 1 mod p."""
    if v % p == 0:
        raise ValueError(f"{v} is not invertible modulo {p}")
    return pow(v, -1, p)


def _exceeds_sqrt_bound(num: int, den: int, offset: int, p: int) -> bool:
    # num/den > 3 sqrt(p) + offset, decided exactly
    lhs = num - offset * den
    return lhs > 0 and lhs * lhs > 9 * p * den * den


def is_bad(q: int, p: int) -> bool:
    """Membership predicate for the bad set.

    q is bad when l(q, p) > 3 sqrt(p) + 2 or 12 |s(q, p)| > 3 sqrt(p) + 5.
    Outside the bad set every node term obeys l < 3 sqrt(p) + 2 and
    |c| < 6 sqrt(p) + 7.
    """
    if _exceeds_sqrt_bound(hj_length(q, p), 1, 2, p):
        return True
    num, den = _twelve_s(q, p)
    return _exceeds_sqrt_bound(abs(num), den, 5, p)


def bad_set_bound(p: int) -> float:
    return math.sqrt(p) * (math.log(p) + 2 * math.log(2))


@dataclass(frozen=True)
class BadSet:
    p: int
    members: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def bound(self) -> float:
        return bad_set_bound(self.p)

    def within_bound(self) -> bool:
        return self.size < self.bound

    def __contains__(self, q: object) -> bool:
        return q in self.members


def bad_set(p: int) -> BadSet:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return BadSet(p, frozenset(q for q in range(1, p) if is_bad(q, p)))


@dataclass(frozen=True)
class CensusRow:
    p: int
    size: int
    bound: float
    max_l: int
    max_12s: Fraction

    @property
    def ok(self) -> bool:
        return self.size < self.bound


def census_row(p: int) -> CensusRow:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    size = 0
    max_l = 0
    best_num, best_den = 0, 1
    for q in range(1, p):
        length = hj_length(q, p)
        num, den = _twelve_s(q, p)
        num = abs(num)
        if length > max_l:
            max_l = length
        if num * best_den > best_num * den:
            best_num, best_den = num, den
        if _exceeds_sqrt_bound(length, 1, 2, p) or _exceeds_sqrt_bound(num, den, 5, p):
            size += 1
    return CensusRow(p, size, bad_set_bound(p), max_l, Fraction(best_num, best_den))


def census(primes: Iterable[int], workers: int = 1) -> Iterator[CensusRow]:
    """Census rows in the order given; composites are skipped."""
    ps = [p for p in primes if is_prime(p)]
    if workers <= 1:
        yield from map(census_row, ps)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(census_row, ps, chunksize=8)

"""Quadratic-field arithmetic.

Fundamental discriminants, the Kronecker character, conductors, prime
splitting, ideal counting and character sums.  Everything here is exact
integer arithmetic except L(1,chi), which is summed to 1e-12.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np


class SplitType(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def _squarefree(n: int) -> bool:
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_fundamental_discriminant(d: int) -> bool:
    if d == 0 or d == 1:
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _validate_fundamental(d: int) -> None:
    if d % 4 not in (0, 1):
        raise ValueError(f"d={d} is not a fundamental discriminant: d mod 4 = {d % 4}, need 0 or 1")
    if not is_fundamental_discriminant(d):
        if d % 4 == 1 and not _squarefree(d):
            raise ValueError(f"d={d} is not a fundamental discriminant: d = 1 mod 4 but not squarefree")
        raise ValueError(f"d={d} is not a fundamental discriminant: d/4 must be squarefree and = 2,3 mod 4")


def _jacobi(a: int, n: int) -> int:
    # Jacobi symbol (a|n) for odd n >= 1 by binary reciprocity.
    assert n >= 1 and n % 2 == 1
    a %= n
    result = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(d: int, n: int) -> int:
    """Kronecker character (d|n) for a fundamental discriminant d, n >= 1."""
    _validate_fundamental(d)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 1
    # split off the even part of n
    e = 0
    m = n
    while m % 2 == 0:
        m //= 2
        e += 1
    if e > 0:
        if d % 2 == 0:
            return 0
        k2 = 1 if d % 8 in (1, 7) else -1  # (d|2), d odd
        two_part = k2 ** (e % 2) if k2 == -1 else 1
    else:
        two_part = 1
    return two_part * _jacobi(d, m)


@dataclass(frozen=True)
class QuadraticField:
    """Quadratic field data keyed by its fundamental discriminant."""

    d_K: int
    q: int
    parity_a: int
    r1: int
    r2: int

    def chi(self, n: int) -> int:
        return kronecker(self.d_K, n)

    def split_type(self, p: int) -> SplitType:
        return split_type(p, self)


def build_field(d_K: int) -> QuadraticField:
    """Construct a QuadraticField, validating the discriminant."""
    if d_K == 1:
        raise ValueError("d_K = 1 is excluded (not a quadratic field)")
    _validate_fundamental(d_K)
    # conductor rule as stated; the first branch cannot fire for a
    # fundamental discriminant (those are 0 or 1 mod 4), so q = |d_K|
    q = 4 * abs(d_K) if d_K % 4 == 2 else abs(d_K)
    if d_K > 0:
        r1, r2, parity_a = 2, 0, 0
    else:
        r1, r2, parity_a = 0, 1, 1
    return QuadraticField(d_K=d_K, q=q, parity_a=parity_a, r1=r1, r2=r2)


def split_type(p: int, F: QuadraticField) -> SplitType:
    c = F.chi(p)
    if c == 1:
        return SplitType.SPLIT
    if c == -1:
        return SplitType.INERT
    return SplitType.RAMIFIED


@lru_cache(maxsize=32)
def _primes_upto(n: int) -> tuple[int, ...]:
    if n < 2:
        return ()
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p:: p] = False
    return tuple(int(p) for p in np.nonzero(sieve)[0])


def primes_upto(n: int) -> list[int]:
    return list(_primes_upto(int(n)))


def ideal_count(n: int, F: QuadraticField) -> int:
    """f_K(n): number of integral ideals of norm n, via f_K = 1 * chi."""
    if n < 1:
        raise ValueError("n must be >= 1")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += F.chi(d)
            if d != n // d:
                total += F.chi(n // d)
        d += 1
    return total


def ideal_count_sieve(N: int, F: QuadraticField) -> np.ndarray:
    """f_K(n) for 1 <= n <= N as an int64 array (index 0 unused)."""
    chi = chi_values(N, F)
    out = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        c = chi[d]
        if c:
            out[d::d] += c
    return out


def chi_values(N: int, F: QuadraticField) -> np.ndarray:
    """chi(n) for 0 <= n <= N, filled periodically from one period."""
    period = np.array([kronecker(F.d_K, a) if math.gcd(a, F.q) == 1 else 0
                       for a in range(1, F.q + 1)], dtype=np.int64)
    out = np.zeros(N + 1, dtype=np.int64)
    idx = (np.arange(1, N + 1) - 1) % F.q
    out[1:] = period[idx]
    return out


@dataclass(frozen=True)
class PrimeIdeal:
    norm: int
    p: int
    split_type: SplitType
    log_norm: float


@dataclass
class PrimeIdealStream:
    """All prime ideals of norm <= X, sorted by norm, with multiplicity."""

    X: float
    ideals: list[PrimeIdeal] = field(default_factory=list)

    @property
    def norms(self) -> list[int]:
        return [i.norm for i in self.ideals]


def prime_ideal_norms(F: QuadraticField, X: float) -> PrimeIdealStream:
    if X < 2:
        raise ValueError("X must be >= 2")
    ideals: list[tuple[int, PrimeIdeal]] = []
    for p in primes_upto(int(X)):
        st = split_type(p, F)
        if st is SplitType.SPLIT:
            ideals.append((p, PrimeIdeal(p, p, st, math.log(p))))
            ideals.append((p, PrimeIdeal(p, p, st, math.log(p))))
        elif st is SplitType.RAMIFIED:
            ideals.append((p, PrimeIdeal(p, p, st, math.log(p))))
        else:
            if p * p <= X:
                ideals.append((p * p, PrimeIdeal(p * p, p, st, math.log(p * p))))
    ideals.sort(key=lambda t: t[0])
    return PrimeIdealStream(X=X, ideals=[i for _, i in ideals])


def l_one_chi(F: QuadraticField) -> float:
    """L(1,chi) to better than 1e-12.

    Sums complete period blocks; the block tail is corrected with an
    Euler-Maclaurin estimate (raw blocks alone decay only like 1/K).
    """
    q = F.q
    chi = [F.chi(a) if math.gcd(a, q) == 1 else 0 for a in range(1, q + 1)]

    K = 2000  # blocks summed explicitly
    s = 0.0
    for k in range(K):
        base = k * q
        s += math.fsum(chi[a - 1] / (base + a) for a in range(1, q + 1))

    # tail = sum_{k>=K} B(k) with B(x) = sum_a chi(a)/(xq+a), estimated by
    # Euler-Maclaurin: int_K^inf B + B(K)/2 - B'(K)/12 + B'''(K)/720
    def B(x: float, order: int = 0) -> float:
        sign = (-1) ** order * math.factorial(order)
        return math.fsum(sign * chi[a - 1] * q**order / (x * q + a) ** (order + 1)
                         for a in range(1, q + 1))

    integral = -math.fsum(chi[a - 1] * math.log(K * q + a) for a in range(1, q + 1)) / q
    tail = integral + B(K) / 2.0 - B(K, 1) / 12.0 + B(K, 3) / 720.0
    return s + tail


def gauss_sum(F: QuadraticField) -> complex:
    """G(chi) = sum_{n mod q} chi(n) e(n/q)."""
    q = F.q
    return sum(F.chi(n) * cmath.exp(2j * cmath.pi * n / q)
               for n in range(1, q + 1) if math.gcd(n, q) == 1)

"""Arithmetic leading constants for moment asymptotics.

The generalized divisor coefficients d_k, the Euler-product constant
a(k) in both its Galois (per-rational-prime) and quadratic
(split/inert/ramified) forms, the theta-integral local factors B_p and
the local a(k)=b(k) identity, the ideal Mertens product, and the
residue of zeta_K at s=1.

All Euler products are truncated with certified tail bounds: each local
factor is 1 + O(p^{-2}), so the tail over p > P is at most
exp(c * sum_{p>P} p^{-2}) - 1 <= exp(2c/(P log P)) - 1 with c measured
from the factors themselves (times a safety margin).  Since the tail
only decays like 1/P, tolerances much below 1e-8 are out of reach;
equality checks between two products should fix a common cutoff instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .fields import (QuadraticField, SplitType, l_one_chi,
                     prime_ideal_norms, primes_upto, split_type)
from .specfn import gamma_c

_SERIES_TOL = 1e-17
_SERIES_CAP = 500


def d_k(m: int, k: float) -> float:
    """d_k(p^m) = Gamma(m+k)/(m! Gamma(k)); binomial(m+k-1, m) for
    integer k."""
    if m < 0:
        raise ValueError("m >= 0 required")
    if k <= 0:
        raise ValueError("k > 0 required")
    val = 1.0
    for i in range(1, m + 1):
        val *= (k + i - 1) / i
    return val


def _dk_sq_series(j: float, x: float) -> float:
    """sum_{m>=0} d_j(p^m)^2 x^m for 0 < x < 1."""
    total = 0.0
    d = 1.0
    m = 0
    xp = 1.0
    while m < _SERIES_CAP:
        term = d * d * xp
        total += term
        if m > 4 and term < _SERIES_TOL * total:
            break
        m += 1
        d *= (j + m - 1) / m
        xp *= x
    return total


@dataclass(frozen=True)
class EulerProductValue:
    value: float
    cutoff: int
    tail_bound: float


@dataclass(frozen=True)
class GaloisSplitData:
    """Splitting data of a degree-n Galois field: p -> (g_p, e_p, f_p)."""

    n: int
    classifier: Callable[[int], tuple[int, int, int]]

    def check(self, p: int) -> tuple[int, int, int]:
        g, e, f = self.classifier(p)
        if g * e * f != self.n:
            raise ValueError(f"efg != n at p={p}: ({g},{e},{f})")
        return g, e, f


def quadratic_split_data(F: QuadraticField) -> GaloisSplitData:
    def classify(p: int) -> tuple[int, int, int]:
        st = split_type(p, F)
        if st is SplitType.SPLIT:
            return 2, 1, 1
        if st is SplitType.INERT:
            return 1, 1, 2
        return 1, 2, 1

    return GaloisSplitData(n=2, classifier=classify)


def trivial_split_data() -> GaloisSplitData:
    """Degree-1 data: reproduces the classical a(k) of the zeta moments."""
    return GaloisSplitData(n=1, classifier=lambda p: (1, 1, 1))


def _galois_local_factor(p: int, k: float, D: GaloisSplitData) -> float:
    # one rational prime: product over the g ideals above p of
    # (1 - N(p)^{-1})^{n k^2} (sum_m d_{gk}(p^m)^2 p^{-fm})^{1/g}
    g, _e, f = D.check(p)
    return ((1.0 - p**(-f)) ** (g * D.n * k * k)
            * _dk_sq_series(g * k, p**(-f)))


def _certified_product(local: Callable[[int], float], k: float,
                       tol: float) -> EulerProductValue:
    from bisect import bisect_right

    cutoff = 16000
    prev = 0
    log_val = 0.0
    while True:
        primes = primes_upto(cutoff)
        for p in primes[bisect_right(primes, prev):]:
            log_val += math.log(local(p))
        prev = cutoff
        # measure the local c with |factor - 1| <= c / p^2 near the
        # cutoff (x2 safety); sum_{p>P} p^{-2} <= 2/(P log P) for P large
        c_est = max(abs(local(p) - 1.0) * p * p for p in primes[-25:])
        tail = math.expm1(2.0 * c_est * 2.0 / (cutoff * math.log(cutoff)))
        if tail < tol:
            value = math.exp(log_val)
            return EulerProductValue(value=value, cutoff=cutoff,
                                     tail_bound=tail * max(1.0, abs(value)))
        if cutoff >= 64_000_000:
            raise RuntimeError(
                f"tail bound {tail:.2e} above tol at cutoff {cutoff}")
        cutoff *= 2


def a_k_galois(k: float, D: GaloisSplitData, tol: float = 1e-6) -> EulerProductValue:
    """a(k) as a certified Euler product from Galois splitting data."""
    if tol <= 0:
        raise ValueError("tol > 0 required")
    if k <= -0.5:
        raise ValueError("product diverges for k <= -1/2")
    if k == 0:
        return EulerProductValue(value=1.0, cutoff=0, tail_bound=0.0)
    return _certified_product(lambda p: _galois_local_factor(p, k, D), k, tol)


def quadratic_local_factor(p: int, st: SplitType, k: float) -> float:
    """One rational prime's factor of the quadratic a(k)."""
    if st is SplitType.SPLIT:
        return (1.0 - 1.0 / p) ** (4 * k * k) * _dk_sq_series(2 * k, 1.0 / p)
    if st is SplitType.INERT:
        return ((1.0 - 1.0 / p**2) ** (2 * k * k)
                * _dk_sq_series(k, 1.0 / p**2))
    return (1.0 - 1.0 / p) ** (2 * k * k) * _dk_sq_series(k, 1.0 / p)


def a_k_quadratic(k: float, F: QuadraticField,
                  tol: float = 1e-6) -> EulerProductValue:
    """a(k) = prod over split/inert/ramified rational primes."""
    if tol <= 0:
        raise ValueError("tol > 0 required")
    if k <= -0.5:
        raise ValueError("product diverges for k <= -1/2")
    if k == 0:
        return EulerProductValue(value=1.0, cutoff=0, tail_bound=0.0)
    return _certified_product(
        lambda p: quadratic_local_factor(p, split_type(p, F), k), k, tol)


def b_p_theta(p: int, st: SplitType, k: int, tol: float = 1e-11) -> float:
    """B_p at zero shifts: int_0^1 |1-e(theta)p^{-1/2}|^{-2k}
    |1-chi(p)e(theta)p^{-1/2}|^{-2k} dtheta.

    Periodic trapezoid with node doubling (spectral convergence).
    Integer k only: the identity with the d_k sums rests on the
    binomial expansion of integer powers.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError("integer k >= 1 required")
    rp = p ** -0.5
    chi_p = {SplitType.SPLIT: 1, SplitType.INERT: -1, SplitType.RAMIFIED: 0}[st]

    import numpy as np

    def quad(n: int) -> float:
        theta = np.arange(n) / n
        e = np.exp(2j * math.pi * theta)
        f = np.abs(1.0 - e * rp) ** (-2 * k)
        if chi_p:
            f = f * np.abs(1.0 - chi_p * e * rp) ** (-2 * k)
        return float(f.mean())

    n = 64
    prev = quad(n)
    for _ in range(14):
        n *= 2
        cur = quad(n)
        if abs(cur - prev) <= tol / 4:
            return cur
        prev = cur
    raise RuntimeError(f"theta quadrature did not converge at {n} nodes")


def closed_form_local_sum(p: int, st: SplitType, k: float) -> float:
    """The d_k local sum that b_p_theta must reproduce."""
    if st is SplitType.SPLIT:
        return _dk_sq_series(2 * k, 1.0 / p)
    if st is SplitType.INERT:
        return _dk_sq_series(k, 1.0 / p**2)
    return _dk_sq_series(k, 1.0 / p)


def a_equals_b_check(F: QuadraticField, k: int, prime_cut: int) -> dict:
    """Per-prime |closed form - theta integral| for p <= prime_cut."""
    diffs = {}
    for p in primes_upto(prime_cut):
        st = split_type(p, F)
        diffs[p] = abs(closed_form_local_sum(p, st, k) - b_p_theta(p, st, k))
    return {"max_diff": max(diffs.values()), "per_prime": diffs}


def mertens_ideal(F: QuadraticField, X: float) -> float:
    """prod_{N(p) <= X} (1 - 1/N(p))^{-1}."""
    if X < 10:
        raise ValueError("X >= 10 required")
    log_val = 0.0
    for ideal in prime_ideal_norms(F, X).ideals:
        log_val -= math.log1p(-1.0 / ideal.norm)
    return math.exp(log_val)


def mertens_predicted(F: QuadraticField, X: float) -> float:
    """chi_K e^gamma log X with chi_K = L(1, chi)."""
    from .specfn import EULER_GAMMA
    return l_one_chi(F) * math.exp(EULER_GAMMA) * math.log(X)


def mertens_classical(X: float) -> float:
    """prod_{p <= X} (1 - 1/p)^{-1} (the chi = 1 consistency case)."""
    log_val = -sum(math.log1p(-1.0 / p) for p in primes_upto(int(X)))
    return math.exp(log_val)


def residue_chiK(F: QuadraticField) -> float:
    """Residue of zeta_K at s=1; equals L(1, chi)."""
    return l_one_chi(F)

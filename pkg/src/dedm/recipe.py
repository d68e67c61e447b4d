"""Moment-recipe machinery for non-primitive L-functions.

The permutation set Xi indexing recipe main terms, the contour-integral
identity behind them (verified numerically), the Barnes-G leading
constants as multidimensional contour integrals, the moment-conjecture
evaluators, Dirichlet-power coefficients alpha_{L,k} by convolution
sieve, the renormalized Euler product a_L(k), and the coefficient-sum /
Selberg-regularity / ideal-count-variance diagnostics.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .constants import EulerProductValue, _certified_product, d_k
from .fields import (QuadraticField, build_field, chi_values,
                     ideal_count_sieve, l_one_chi, primes_upto)
from .gridval import series_point
from .specfn import barnes_g, g_of_k


# ---------------------------------------------------------------------------
# non-primitive L-function specifications


@dataclass(frozen=True)
class FactorSpec:
    """One distinct primitive factor L_j^{e_j} of L = prod L_j^{e_j}."""

    e: int
    Q: float
    d: int
    coeff: str  # "one" | "kronecker:<fundamental discriminant>"

    def __post_init__(self):
        if self.e < 1 or self.d < 1 or self.Q <= 0:
            raise ValueError("need e >= 1, d >= 1, Q > 0")
        if self.coeff != "one":
            kind, _, arg = self.coeff.partition(":")
            if kind != "kronecker" or not arg.lstrip("-").isdigit():
                raise ValueError(f"unknown coefficient stream {self.coeff!r}")

    def char_field(self) -> QuadraticField | None:
        if self.coeff == "one":
            return None
        return build_field(int(self.coeff.partition(":")[2]))

    def coeff_values(self, N: int) -> np.ndarray:
        """alpha_{L_j}(n) for 0 <= n <= N (index 0 unused)."""
        F = self.char_field()
        if F is None:
            out = np.ones(N + 1, dtype=np.int64)
            out[0] = 0
            return out
        return chi_values(N, F)

    def char_at(self, p: int) -> int:
        F = self.char_field()
        return 1 if F is None else F.chi(p)


@dataclass(frozen=True)
class NonPrimitiveSpec:
    factors: tuple[FactorSpec, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("at least one factor required")
        streams = [f.coeff for f in self.factors]
        if len(set(streams)) != len(streams):
            raise ValueError("factors must be distinct primitives")

    @property
    def n_L(self) -> int:
        return sum(f.e ** 2 for f in self.factors)


def zeta_spec() -> NonPrimitiveSpec:
    """The Riemann zeta function as a one-factor spec."""
    return NonPrimitiveSpec(factors=(FactorSpec(e=1, Q=1.0, d=1, coeff="one"),))


def zetaK_spec(F: QuadraticField) -> NonPrimitiveSpec:
    """zeta_K = zeta * L(chi): two factors of multiplicity one."""
    return NonPrimitiveSpec(factors=(
        FactorSpec(e=1, Q=1.0, d=1, coeff="one"),
        FactorSpec(e=1, Q=float(F.q), d=1, coeff=f"kronecker:{F.d_K}"),
    ))


def spec_from_json(text: str) -> NonPrimitiveSpec:
    """Ingest {"factors": [{"e":..,"Q":..,"d":..,"coeff":..}, ...]}."""
    data = json.loads(text)
    return NonPrimitiveSpec(factors=tuple(
        FactorSpec(e=int(f["e"]), Q=float(f["Q"]), d=int(f["d"]),
                   coeff=str(f["coeff"]))
        for f in data["factors"]))


@dataclass(frozen=True)
class ShiftTuple:
    """2k small complex shifts for the recipe main terms."""

    shifts: tuple[complex, ...]

    def __post_init__(self):
        if len(self.shifts) % 2 != 0 or not self.shifts:
            raise ValueError("need an even, positive number of shifts")

    @property
    def k(self) -> int:
        return len(self.shifts) // 2


# ---------------------------------------------------------------------------
# Xi permutations and the contour identity


def xi_permutations(k: int) -> list[tuple[int, ...]]:
    """All binomial(2k, k) permutations tau of {1..2k} increasing on
    {1..k} and on {k+1..2k}, in lexicographic order."""
    if not 1 <= k <= 6:
        raise ValueError("1 <= k <= 6 required")
    universe = range(1, 2 * k + 1)
    out = []
    for first in itertools.combinations(universe, k):
        rest = tuple(v for v in universe if v not in first)
        out.append(first + rest)
    return out


def f_pole(s: complex) -> complex:
    """The simplest admissible f: simple pole of residue 1 plus a
    constant."""
    return 1.0 / s + 1.0


def f_zeta(s: complex) -> complex:
    """f(s) = zeta(1 + s)."""
    return series_point(1.0 + s)


def _one(_a, _b) -> float:
    return 1.0


def contour_sum_check(F_test: Callable | None, k: int, shifts: ShiftTuple,
                      radius: float | None = None,
                      f: Callable[[complex], complex] = f_pole,
                      n_nodes: int | None = None) -> tuple[complex, complex]:
    """Both sides of the permutation-sum = contour-integral identity.

    lhs sums K(a;b) = F(a;b) prod_{i,j<=k} f(a_i-b_j) over the Xi
    permutations of the shifts; rhs is the 2k-fold contour integral
    (-1)^k/(k!^2 (2pi i)^{2k}) of K(z) Delta^2(z) over the full
    denominator prod_{i=1}^{2k} prod_{j=1}^{2k} (z_i - alpha_j),
    by periodic trapezoid sums on circles enclosing all shifts.

    The integrand is regular at z_i = z_j (Delta^2 cancels the f poles),
    so the circles need only avoid exact node collisions: each variable
    gets a slightly distinct radius.

    The permutation side cancels catastrophically for shifts much below
    1e-2 (individual terms grow like max|f| ~ 1/|shift| per pair);
    compare the sides at moderate shifts.
    """
    if F_test is None:
        F_test = _one
    if shifts.k != k:
        raise ValueError("shift tuple length != 2k")
    if k > 2:
        raise ValueError("k <= 2 supported (quadrature budget)")
    if n_nodes is None:
        n_nodes = 64 if k == 1 else 40  # 40^4 nodes keep k=2 in memory
    alphas = np.array(shifts.shifts, dtype=np.complex128)
    max_shift = float(np.max(np.abs(alphas)))
    if radius is None:
        radius = 2.0 * max_shift + 0.05
    if radius <= 2.0 * max_shift:
        raise ValueError("radius must exceed 2 max|shift|")

    lhs = 0.0 + 0.0j
    for tau in xi_permutations(k):
        a = [shifts.shifts[i - 1] for i in tau[:k]]
        b = [shifts.shifts[i - 1] for i in tau[k:]]
        term = complex(F_test(a, b))
        for ai in a:
            for bj in b:
                term *= f(ai - bj)
        lhs += term

    N = n_nodes
    theta = 2.0 * math.pi * np.arange(N) / N
    # distinct radii keep nodes of different variables from colliding
    z = [radius * (1.0 + 0.013 * m) * np.exp(1j * theta)
         for m in range(2 * k)]
    # per-variable weight z/N (absorbs dz/(2 pi i)) over the denominator
    wv = [zm / N / np.prod(zm[:, None] - alphas[None, :], axis=1)
          for zm in z]
    # f tables for the k x k cross pairs (i <= k < j)
    ftab = {}
    for i in range(k):
        for j in range(k, 2 * k):
            diff = z[i][:, None] - z[j][None, :]
            ftab[(i, j)] = np.array(
                [[f(d) for d in row] for row in diff], dtype=np.complex128)

    idx = np.indices((N,) * (2 * k)).reshape(2 * k, -1)
    zz = [z[m][idx[m]] for m in range(2 * k)]
    vand = np.ones(idx.shape[1], dtype=np.complex128)
    for m in range(2 * k):
        for mm in range(m + 1, 2 * k):
            vand *= (zz[mm] - zz[m]) ** 2
    integ = vand if F_test is _one else vand * F_test(zz[:k], zz[k:])
    for i in range(k):
        for j in range(k, 2 * k):
            integ *= ftab[(i, j)][idx[i], idx[j]]
    for m in range(2 * k):
        integ *= wv[m][idx[m]]
    rhs = (-1) ** k / math.factorial(k) ** 2 * complex(np.sum(integ))
    return lhs, rhs


def leading_constant_gk(k: int, n_nodes: int = 32,
                        radius: float = 0.7) -> float:
    """The shift-zero leading constant as a 2k-fold contour integral:

    (-1)^k/(2^{k^2} k!^2 (2pi i)^{2k}) contour-integral of
    Delta^2(u) e^{sum u_j - u_{k+j}} / (prod_{i,j<=k}(u_i - u_{k+j})
    prod_j u_j^{2k}) du;  must equal G(k+1)^2/G(2k+1).
    """
    if not 1 <= k <= 2:
        raise ValueError("k in {1, 2} (4k-dimensional quadrature budget)")
    N = n_nodes
    theta = 2.0 * math.pi * np.arange(N) / N
    z = [radius * (1.0 + 0.029 * m) * np.exp(1j * theta)
         for m in range(2 * k)]
    idx = np.indices((N,) * (2 * k)).reshape(2 * k, -1)
    zz = [z[m][idx[m]] for m in range(2 * k)]
    integ = np.ones(idx.shape[1], dtype=np.complex128)
    for m in range(2 * k):
        for mm in range(m + 1, 2 * k):
            integ *= (zz[mm] - zz[m]) ** 2
    expo = np.zeros(idx.shape[1], dtype=np.complex128)
    for j in range(k):
        expo += zz[j] - zz[k + j]
        for i in range(k):
            integ /= zz[i] - zz[k + j]
    integ *= np.exp(expo)
    for m in range(2 * k):
        integ *= (zz[m] / N) / zz[m] ** (2 * k)
    val = ((-1) ** k / (2 ** (k * k) * math.factorial(k) ** 2)
           * complex(np.sum(integ)))
    return float(val.real)


# ---------------------------------------------------------------------------
# conjecture evaluators


def gl_multinomial(spec: NonPrimitiveSpec, k: int) -> int:
    """g_L(k) = multinomial(n_L k^2; (e_1 k)^2, ..) prod g(e_j k)
    d_j^{(e_j k)^2}, exactly (the result is asserted integral)."""
    if k < 1:
        raise ValueError("integer k >= 1 required")
    parts = [(f.e * k) ** 2 for f in spec.factors]
    total = spec.n_L * k * k
    assert sum(parts) == total
    num = math.factorial(total)
    for p in parts:
        num, r = divmod(num, math.factorial(p))
        assert r == 0
    for f, p in zip(spec.factors, parts):
        num *= g_of_k(f.e * k) * f.d ** p
    return num


def _barnes_ratio(m: int) -> float:
    return barnes_g(m + 1) ** 2 / barnes_g(2 * m + 1)


def conjecture_eval(spec: NonPrimitiveSpec, k: int, T: float,
                    a_L: float | None = None) -> float:
    """Predicted 2k-th moment: a_L(k) prod_j G(e_jk+1)^2/G(2e_jk+1)
    (log(Q_j T^{d_j}))^{(e_j k)^2}."""
    if k < 0:
        raise ValueError("k >= 0 required")
    if k == 0:
        return 1.0
    if a_L is None:
        a_L = a_L_constant(spec, k).value
    val = a_L
    for f in spec.factors:
        val *= (_barnes_ratio(f.e * k)
                * (math.log(f.Q) + f.d * math.log(T)) ** ((f.e * k) ** 2))
    return val


def conjecture_log_power(spec: NonPrimitiveSpec, k: int) -> int:
    """Leading log power of the predicted moment: n_L k^2."""
    return spec.n_L * k * k


# ---------------------------------------------------------------------------
# Dirichlet-power coefficients and a_L(k)


def alpha_Lk(spec: NonPrimitiveSpec, k: int, N: int) -> np.ndarray:
    """Coefficients of L(s)^k up to N by repeated Dirichlet convolution
    of the factor streams (exact integer arithmetic)."""
    if k < 1:
        raise ValueError("integer k >= 1 required")
    if N > 10 ** 6:
        raise ValueError("N <= 1e6 supported")
    out = np.zeros(N + 1, dtype=np.int64)
    out[1] = 1
    for f in spec.factors:
        stream = f.coeff_values(N)
        for _ in range(f.e * k):
            acc = np.zeros(N + 1, dtype=np.int64)
            for d in range(1, N + 1):
                c = stream[d]
                if c:
                    acc[d::d] += c * out[1: N // d + 1]
            out = acc
    return out


def _local_power_coeffs(cs: Sequence[int], es: Sequence[int], k: int,
                        depth: int) -> np.ndarray:
    # coefficients of prod_j (1 - c_j x)^{-e_j k} through x^depth
    poly = np.zeros(depth + 1)
    poly[0] = 1.0
    for c, e in zip(cs, es):
        if c == 0:
            continue
        E = e * k
        fac = np.array([d_k(m, E) * c ** m for m in range(depth + 1)])
        new = np.zeros(depth + 1)
        for m in range(depth + 1):
            if poly[m]:
                new[m:] += poly[m] * fac[: depth + 1 - m]
        poly = new
    return poly


def _cross_pairs(spec: NonPrimitiveSpec) -> list[tuple[int, int, float]]:
    # (i, j, L_{ij}(1)) for each unordered factor pair; the product
    # character must itself be a Kronecker character we can evaluate
    out = []
    fs = spec.factors
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            Fi, Fj = fs[i].char_field(), fs[j].char_field()
            if Fi is None and Fj is None:
                raise ValueError("duplicate principal factors")
            if Fi is not None and Fj is not None:
                raise ValueError(
                    "cross pair of two Kronecker characters unsupported")
            out.append((i, j, l_one_chi(Fi if Fi is not None else Fj)))
    return out


def a_L_constant(spec: NonPrimitiveSpec, k: int,
                 tol: float = 1e-6) -> EulerProductValue:
    """a_L(k) = prod_p (1-1/p)^{n_L k^2} sum_n |alpha_{L,k}(p^n)|^2 p^{-n}.

    The raw factors are 1 + 2k^2 (sum over cross pairs of chi_i chi_j(p))
    / p + O(p^{-2}), conditionally convergent; each factor is multiplied
    by (1 - chi_i chi_j(p)/p)^{2 e_i e_j k^2} per cross pair and the
    product compensated by the exact L_{ij}(1)^{2 e_i e_j k^2}.
    """
    if k < 0:
        raise ValueError("k >= 0 required")
    if k == 0:
        return EulerProductValue(value=1.0, cutoff=0, tail_bound=0.0)
    es = [f.e for f in spec.factors]
    nLk2 = spec.n_L * k * k
    pairs = _cross_pairs(spec) if len(spec.factors) > 1 else []

    def local(p: int) -> float:
        cs = [f.char_at(p) for f in spec.factors]
        depth = max(4, int(62.0 / math.log2(p)) + 2)
        poly = _local_power_coeffs(cs, es, k, depth)
        x = 1.0 / p
        f_p = float(np.polyval((poly ** 2)[::-1], x)) * (1.0 - x) ** nLk2
        for i, j, _ in pairs:
            f_p *= (1.0 - cs[i] * cs[j] * x) ** (2 * es[i] * es[j] * k * k)
        return f_p

    base = _certified_product(local, k, tol)
    comp = 1.0
    for i, j, L1 in pairs:
        comp *= L1 ** (2 * es[i] * es[j] * k * k)
    return EulerProductValue(value=base.value * comp, cutoff=base.cutoff,
                             tail_bound=base.tail_bound * comp)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class CoeffSumReport:
    N: int
    empirical: float          # sum_{n<=N} |alpha_{L,k}(n)|^2 / n
    fitted_leading: float     # leading log-power coefficient from the fit
    predicted: float          # a_L(k) / (n_L k^2)!
    condition: float


def coeff_sum_check(spec: NonPrimitiveSpec, k: int, N: int,
                    a_L: float | None = None) -> CoeffSumReport:
    """Partial sums of |alpha_{L,k}(n)|^2/n against the predicted
    a_L(k)/(n_L k^2)! log^{n_L k^2} growth, via a polynomial-in-log fit
    of the partial sums at N/4, N/2, N (leading power fixed, lower
    coefficients free)."""
    if N > 10 ** 6:
        raise ValueError("N <= 1e6 supported")
    al = alpha_Lk(spec, k, N).astype(np.float64)
    n = np.arange(N + 1, dtype=np.float64)
    n[0] = 1.0
    partial = np.cumsum(al * al / n)
    D = spec.n_L * k * k
    pts = [N // 4, N // 2, N]
    powers = list(range(D, max(D - 3, -1), -1))
    A = np.array([[math.log(x) ** pw for pw in powers] for x in pts])
    b = np.array([partial[x] for x in pts])
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    cond = float(np.linalg.cond(A))
    if a_L is None:
        a_L = a_L_constant(spec, k).value
    predicted = a_L / math.factorial(D)
    return CoeffSumReport(N=N, empirical=float(partial[N]),
                          fitted_leading=float(coef[0]),
                          predicted=predicted, condition=cond)


@dataclass(frozen=True)
class SelbergReport:
    x_grid: np.ndarray
    band: np.ndarray          # sum |alpha_L(p)|^2/p - n_L log log x
    orth: dict[str, np.ndarray]  # per Kronecker factor: sum chi(p)/p
    band_width: float
    orth_max: float


def selberg_checks(spec: NonPrimitiveSpec, x_max: float = 1e7,
                   x_min: float = 1e3) -> SelbergReport:
    """Selberg-class regularity and orthogonality partial sums on a
    geometric grid."""
    if x_max > 1e7:
        raise ValueError("x_max <= 1e7 supported")
    ps = np.array(primes_upto(int(x_max)), dtype=np.int64)
    fields = [(f.coeff, f.char_field()) for f in spec.factors]
    char_vals = []
    for _, F in fields:
        if F is None:
            char_vals.append(np.ones(ps.shape[0]))
        else:
            chi = chi_values(F.q, F)
            char_vals.append(chi[ps % F.q].astype(np.float64))
    alpha = np.zeros(ps.shape[0])
    for f, cv in zip(spec.factors, char_vals):
        alpha += f.e * cv
    inv_p = 1.0 / ps
    reg = np.cumsum(alpha * alpha * inv_p)
    n_grid = int(math.ceil(math.log(x_max / x_min) / math.log(math.sqrt(2.0))))
    xs = x_min * math.sqrt(2.0) ** np.arange(n_grid + 1)
    pos = np.searchsorted(ps, xs, side="right") - 1
    band = reg[pos] - spec.n_L * np.log(np.log(xs))
    orth = {}
    for (name, F), cv in zip(fields, char_vals):
        if F is not None:
            orth[name] = np.cumsum(cv * inv_p)[pos]
    orth_max = max((float(np.max(np.abs(v))) for v in orth.values()),
                   default=0.0)
    return SelbergReport(x_grid=xs, band=band, orth=orth,
                         band_width=float(np.max(band) - np.min(band)),
                         orth_max=orth_max)


@dataclass(frozen=True)
class IdealVarianceReport:
    T_grid: np.ndarray
    c_values: np.ndarray      # sum_{m<=T} f_K(m)^2 / (T log T)
    slope: float              # log-log slope of the sum with log T removed
    top_decade_drift: float


def chandra_nara_check(F: QuadraticField, T_max: int = 10 ** 6) -> IdealVarianceReport:
    """sum_{m<=T} f_K(m)^2 ~ c T log T on a geometric T grid.

    The reported slope is the log-log slope of (sum / log T) against T,
    i.e. the power of T after removing the known logarithmic factor.
    """
    if T_max > 10 ** 7:
        raise ValueError("T_max <= 1e7 supported")
    fk = ideal_count_sieve(T_max, F).astype(np.float64)
    cum = np.cumsum(fk * fk)
    n_grid = 24
    Ts = np.geomspace(T_max / 100.0, T_max, n_grid)
    idx = np.minimum(Ts.astype(np.int64), T_max)
    sums = cum[idx]
    c_vals = sums / (idx * np.log(idx))
    y = np.log(sums / np.log(idx))
    x = np.log(idx.astype(np.float64))
    slope = float(np.polyfit(x, y, 1)[0])
    top = c_vals[Ts >= T_max / 10.0]
    drift = float(np.max(top) / np.min(top) - 1.0)
    return IdealVarianceReport(T_grid=Ts, c_values=c_vals, slope=slope,
                               top_decade_drift=drift)

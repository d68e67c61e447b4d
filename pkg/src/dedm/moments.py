"""Numerical moments of zeta_K, P_K and Z_K, and the twisted-moment
main-term apparatus.

Moment integrals use Simpson quadrature on uniform grids over the sharp
window [T, 2T], normalized by 1/T.  The second half implements the
local weights of the twisted second moment: the norm-indexed Moebius
function mu', the weights delta and delta', the B-function at zero
shifts, Z', the c_2 main term, the Euler factor G(p) and the sum S
computed both as a nested triple sum and as a product of G(p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import hybrid, lfun
from .constants import a_k_quadratic
from .fields import (QuadraticField, SplitType, gauss_sum, l_one_chi,
                     primes_upto, split_type)
from .gridval import critical_grid, dirichlet_polynomial_grid
from .specfn import EULER_GAMMA, barnes_g

SELECTORS = ("zetaK", "P", "Z", "zetaK_Pinv")

_STEP_NUMERATOR = 0.05

CSV_HEADER = "T,X,k,value,predicted,ratio,grid_step,n_points"


@dataclass(frozen=True)
class MomentResult:
    """One 1/T-normalized moment over [T, 2T] with its prediction."""

    T: float
    X: float
    k: float
    value: float
    predicted: float
    ratio: float
    grid_step: float
    n_points: int

    def csv_row(self) -> str:
        return (f"{self.T:.6g},{self.X:.6g},{self.k:.6g},"
                f"{self.value:.12g},{self.predicted:.12g},{self.ratio:.12g},"
                f"{self.grid_step:.12g},{self.n_points}")


def max_grid_step(F: QuadraticField, T: float) -> float:
    """Step bound 0.05/log(qT): >~ 60 points per mean zero gap."""
    return _STEP_NUMERATOR / math.log(F.q * T)


def _simpson_mean(y: np.ndarray, h: float, T: float) -> float:
    # composite Simpson over an odd-length grid spanning exactly [T, 2T]
    n = y.shape[0]
    if n % 2 != 1:
        raise ValueError("Simpson needs an odd number of points")
    s = y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2])
    return float(s) * h / 3.0 / T


def _grid_params(F: QuadraticField, T: float,
                 grid_step: float | None) -> tuple[float, int]:
    bound = max_grid_step(F, T)
    if grid_step is None:
        grid_step = bound
    if grid_step > bound * (1 + 1e-12):
        raise ValueError(
            f"grid_step {grid_step:.3g} exceeds the bound {bound:.3g}")
    n_int = int(math.ceil(T / grid_step))
    if n_int % 2 == 1:
        n_int += 1
    # exact-span step, <= requested
    return T / n_int, n_int + 1


def _gk_squared(k: float) -> float:
    # (G(k+1)^2/G(2k+1))^2 for integer k; 1.0 otherwise (prediction
    # bands in this artifact only use integer k)
    if k == int(k) and k >= 1:
        ki = int(k)
        return (barnes_g(ki + 1) ** 2 / barnes_g(2 * ki + 1)) ** 2
    return 1.0


@lru_cache(maxsize=16)
def _a_k_cached(d_K: int, k: float) -> float:
    from .fields import build_field
    return a_k_quadratic(k, build_field(d_K)).value


def _predicted(f: str, F: QuadraticField, T: float, k: float,
               X: float) -> float:
    if k == 0:
        return 1.0
    L1 = l_one_chi(F)
    if f == "P":
        a = _a_k_cached(F.d_K, k)
        return a * (L1 * math.exp(EULER_GAMMA) * math.log(X)) ** (2 * k * k)
    if f in ("Z", "zetaK_Pinv"):
        # stated for k=1 only; scale the k=1 shape for other k
        base = (math.log(T) * math.log(F.q * T)
                / (math.exp(EULER_GAMMA) * math.log(X)) ** 2)
        return base ** (k * k)
    # zetaK: the k=1 case is the Motohashi main term; general k the
    # quadratic moment conjecture a(k) L^{2k^2} (g-factor)^2 (logT log qT)^{k^2}
    a = _a_k_cached(F.d_K, k)
    return (a * L1 ** (2 * k * k) * _gk_squared(k)
            * (math.log(T) * math.log(F.q * T)) ** (k * k))


def moment_integral(f: str, F: QuadraticField, T: float, k: float,
                    X: float, grid_step: float | None = None,
                    zeros: lfun.ZeroTable | None = None,
                    cfg: hybrid.HybridConfig | None = None) -> MomentResult:
    """(1/T) int_T^{2T} |f(1/2+it)|^{2k} dt by Simpson quadrature.

    f selects zeta_K, the sharp Euler product P, the zero-product Z, or
    the ratio zeta_K/P (a Z surrogate needing no zero table).  Z needs a
    merged zero table covering [T - W, 2T + W].
    """
    if f not in SELECTORS:
        raise ValueError(f"unknown integrand {f!r}; choose from {SELECTORS}")
    if T < 100:
        raise ValueError("T >= 100 required")
    if k < 0:
        raise ValueError("k >= 0 required")
    h, n_pts = _grid_params(F, T, grid_step)
    if f == "Z":
        if cfg is None:
            cfg = hybrid.HybridConfig(X=X)
        if zeros is None:
            raise ValueError("Z moment needs a zero table")
        need = 2 * T + cfg.W
        if need > zeros.t_max + 1e-9:
            raise hybrid.CoverageError(
                f"zero table reaches t_max={zeros.t_max}, need {need:.1f}")
    if k == 0:
        value = 1.0
    elif f == "P":
        absP = hybrid.p_abs_grid(T, h, n_pts, F, X)
        value = _simpson_mean(absP ** (2 * k), h, T)
    elif f == "Z":
        t = T + h * np.arange(n_pts)
        abs2 = hybrid.z_abs2_grid(t, F, cfg, zeros)
        value = _simpson_mean(abs2 ** k, h, T)
    else:
        grid = critical_grid(F, T, 2 * T, h)
        zk = np.abs(grid.zetaK[:n_pts])
        if f == "zetaK_Pinv":
            zk = zk / hybrid.p_abs_grid(T, h, n_pts, F, X)
        value = _simpson_mean(zk ** (2 * k), h, T)
    predicted = _predicted(f, F, T, k, X)
    ratio = value / predicted if predicted > 0 else float("nan")
    return MomentResult(T=T, X=X, k=k, value=value, predicted=predicted,
                        ratio=ratio, grid_step=h, n_points=n_pts)


def splitting_ratio(F: QuadraticField, T: float, X: float, k: float,
                    zeros: lfun.ZeroTable,
                    cfg: hybrid.HybridConfig | None = None,
                    grid_step: float | None = None) -> float:
    """I_k / (moment of |P|^{2k} * moment of |Z|^{2k}) over [T, 2T]."""
    if k == 0:
        return 1.0
    mi = moment_integral("zetaK", F, T, k, X, grid_step)
    mp = moment_integral("P", F, T, k, X, grid_step)
    mz = moment_integral("Z", F, T, k, X, grid_step, zeros=zeros, cfg=cfg)
    return mi.value / (mp.value * mz.value)


def mv_mean_value(coeffs: np.ndarray, T: float,
                  grid_step: float = 0.1) -> tuple[float, float]:
    """Mean square of a Dirichlet polynomial vs its diagonal.

    empirical = (1/T) int_T^{2T} |sum a(n) n^{-1/2-it}|^2 dt (Simpson);
    diagonal = sum |a(n)|^2/n, the Montgomery-Vaughan main term.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    N = coeffs.shape[0] - 1
    if N * N > T:
        raise ValueError("requires N <= sqrt(T)")
    n_int = int(math.ceil(T / grid_step))
    if n_int % 2 == 1:
        n_int += 1
    h = T / n_int
    vals = dirichlet_polynomial_grid(coeffs, 0.5, T, h, n_int + 1)
    empirical = _simpson_mean(np.abs(vals) ** 2, h, T)
    n = np.arange(1, N + 1, dtype=np.float64)
    diagonal = float(np.sum(coeffs[1:] ** 2 / n))
    return empirical, diagonal


# ---------------------------------------------------------------------------
# local weights of the twisted second moment


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def in_norm_image(n: int, F: QuadraticField) -> bool:
    """Whether n is the norm of an integral ideal: every inert prime
    divides n to an even power."""
    return all(e % 2 == 0 for p, e in _factorize(n).items()
               if split_type(p, F) is SplitType.INERT)


def mobius_prime(n: int, F: QuadraticField) -> int:
    """mu'(n): (-1)^r on products of r distinct prime norms, else 0."""
    if n < 1:
        raise ValueError("n >= 1 required")
    fac = _factorize(n)
    if not all(e % 2 == 0 for p, e in fac.items()
               if split_type(p, F) is SplitType.INERT):
        raise ValueError(f"{n} is not an ideal norm for d_K={F.d_K}")
    sign = 1
    for p, e in fac.items():
        st = split_type(p, F)
        if st is SplitType.INERT:
            if e > 2:
                return 0
        elif e > 1:
            return 0
        sign = -sign
    return sign


def delta_weight(h: int, F: QuadraticField) -> float:
    """delta(h): 0 unless the inert part of h is a square, else the
    product over split p | h of (1 + h_p (p-1)/(p+1))."""
    if h < 1:
        raise ValueError("h >= 1 required")
    val = 1.0
    for p, e in _factorize(h).items():
        st = split_type(p, F)
        if st is SplitType.INERT:
            if e % 2 == 1:
                return 0.0
        elif st is SplitType.SPLIT:
            val *= 1.0 + e * (p - 1.0) / (p + 1.0)
    return val


def delta_prime_weight(m: int, F: QuadraticField) -> float:
    """delta'(m): split p give (1 + m_p (p-1)/(p+1)); inert p give
    (1 + m_p (p+1)/(p-1)); ramified p contribute nothing."""
    if m < 1:
        raise ValueError("m >= 1 required")
    val = 1.0
    for p, e in _factorize(m).items():
        st = split_type(p, F)
        if st is SplitType.SPLIT:
            val *= 1.0 + e * (p - 1.0) / (p + 1.0)
        elif st is SplitType.INERT:
            val *= 1.0 + e * (p + 1.0) / (p - 1.0)
    return val


def _f_coeff(m: int, st: SplitType) -> float:
    # ideal-count local coefficient f_K(p^m)
    if st is SplitType.SPLIT:
        return float(m + 1)
    if st is SplitType.INERT:
        return 1.0 if m % 2 == 0 else 0.0
    return 1.0


def b_shift_zero(h: int, k: int, F: QuadraticField,
                 term_tol: float = 1e-14) -> float:
    """B at zero shifts by direct j-series summation per prime p | hk.

    Each local factor is the ratio of sum_j f(p^{k_p+j}) f(p^{h_p+j}) p^{-j}
    to the same series with h_p = k_p = 0; the product must reproduce
    delta(h) delta(k).
    """
    if h < 1 or k < 1:
        raise ValueError("h, k >= 1 required")
    if math.gcd(h, k) != 1:
        raise ValueError("(h, k) = 1 required")
    fac_h = _factorize(h)
    fac_k = _factorize(k)
    val = 1.0
    for p in sorted(set(fac_h) | set(fac_k)):
        st = split_type(p, F)
        eh = fac_h.get(p, 0)
        ek = fac_k.get(p, 0)
        x = 1.0 / p
        num = den = 0.0
        xj = 1.0
        j = 0
        while True:
            tn = _f_coeff(ek + j, st) * _f_coeff(eh + j, st) * xj
            td = _f_coeff(j, st) ** 2 * xj
            num += tn
            den += td
            if j > 1 and max(tn, td) < term_tol:
                break
            xj *= x
            j += 1
        val *= num / den
    return val


def zprime_zero(m: int, n: int, F: QuadraticField) -> complex:
    """Z' at zero shifts: conj(G(chi)) L(1,chi)^4/L(2,chi^2) delta'(m)delta'(n).

    chi^2 is principal mod q, so L(2,chi^2) = zeta(2) prod_{p|q}(1-p^{-2}).
    """
    L2 = math.pi ** 2 / 6.0
    for p in _factorize(F.q):
        L2 *= 1.0 - 1.0 / p ** 2
    return (gauss_sum(F).conjugate() * l_one_chi(F) ** 4 / L2
            * delta_prime_weight(m, F) * delta_prime_weight(n, F))


@dataclass(frozen=True)
class C2Term:
    """Main term of the twisted second moment; the O-term is a separate
    bound field, never added in."""

    main: float
    o_bound: float


def c2_main_term(h: int, k: int, F: QuadraticField, T: float) -> C2Term:
    """(6/pi^2) L(1,chi)^2 prod_{p|d_K}(1+1/p)^{-1} delta(h_k) delta(k_h)
    * log T * log qT, with h_k = h/(h,k)."""
    if h < 1 or k < 1:
        raise ValueError("h, k >= 1 required")
    if T < 100:
        raise ValueError("T >= 100 required")
    g = math.gcd(h, k)
    h_k, k_h = h // g, k // g
    pref = 6.0 / math.pi ** 2 * l_one_chi(F) ** 2
    for p in _factorize(abs(F.d_K)):
        pref /= 1.0 + 1.0 / p
    dd = delta_weight(h_k, F) * delta_weight(k_h, F)
    main = pref * dd * math.log(T) * math.log(F.q * T)
    return C2Term(main=main, o_bound=dd * math.log(T) * math.log(h_k * k_h + 2))


# ---------------------------------------------------------------------------
# the sum S and its Euler factors


def euler_factor_G(p: int, st: SplitType, regime: str,
                   F: QuadraticField) -> float:
    """Local factor G of S in the norm variable N = N(p):

    G = 1 + (2 a1 d1 + a1^2)/N + (2 a2 d2 + a2^2 + 2 a1 a2 d1)/N^2

    with a_j = alpha(N^j), d_j = delta(N^j) in the given regime
    (regime "small": N <= sqrt(X); "large": sqrt(X) < N <= X).
    """
    if regime not in ("small", "large"):
        raise ValueError("regime must be 'small' or 'large'")
    if st is SplitType.SPLIT:
        N = p
        a1 = -2.0
        a2 = 1.0 if regime == "small" else 2.0
    elif st is SplitType.RAMIFIED:
        N = p
        a1 = -1.0
        a2 = 0.0 if regime == "small" else 0.5
    else:
        N = p * p
        a1 = -1.0
        a2 = 0.0 if regime == "small" else 0.5
    d1 = delta_weight(N, F)
    d2 = delta_weight(N * N, F)
    return (1.0 + (2.0 * a1 * d1 + a1 * a1) / N
            + (2.0 * a2 * d2 + a2 * a2 + 2.0 * a1 * a2 * d1) / (N * N))


@dataclass(frozen=True)
class NestedCaps:
    N: int = 100_000

    def __post_init__(self):
        if self.N > 10 ** 5:
            raise ValueError("caps.N <= 1e5 supported")


@dataclass(frozen=True)
class SEstimate:
    value: float
    method: str
    tail: float


def _smooth_numbers(X: float, cap: int) -> list[int]:
    # all integers <= cap whose prime factors are <= X, sorted
    ps = primes_upto(int(X))
    vals = [1]
    for p in ps:
        new = []
        for v in vals:
            w = v * p
            while w <= cap:
                new.append(w)
                w *= p
        vals.extend(new)
    return sorted(vals)


def _nested_S(F: QuadraticField, X: float, cap: int,
              alpha: hybrid.AlphaCoeffs) -> float:
    smooth = _smooth_numbers(X, cap)
    fac = {n: _factorize(n) for n in smooth}

    def mu_prime(l: int) -> int:
        f = fac[l]
        sign = 1
        for p, e in f.items():
            st = split_type(p, F)
            if st is SplitType.INERT:
                if e != 2:
                    return 0
            elif e != 1:
                return 0
            sign = -sign
        return sign

    def delta_of(f1: dict, f2: dict) -> float:
        val = 1.0
        merged = dict(f1)
        for p, e in f2.items():
            merged[p] = merged.get(p, 0) + e
        for p, e in merged.items():
            st = split_type(p, F)
            if st is SplitType.INERT:
                if e % 2 == 1:
                    return 0.0
            elif st is SplitType.SPLIT:
                val *= 1.0 + e * (p - 1.0) / (p + 1.0)
        return val

    mu_support = [(l, mu_prime(l)) for l in smooth]
    mu_support = [(l, m) for l, m in mu_support if m != 0]

    total = 0.0
    for g in smooth:
        inner_total = 0.0
        for l, mu in mu_support:
            gl = g * l
            if gl > cap:
                break
            inner = 0.0
            for m in smooth:
                glm = gl * m
                if glm > cap:
                    break
                a = alpha.coeffs.get(glm, 0.0)
                if a == 0.0:
                    continue
                d = delta_of(fac[l], fac[m])
                if d:
                    inner += a * d / m
            inner_total += mu / (l * l) * inner * inner
        total += inner_total / g
    return total


def main_sum_S(F: QuadraticField, X: float, method: str = "euler",
               caps: NestedCaps | None = None) -> SEstimate:
    """S = sum_g 1/g sum_l mu'(l)/l^2 (sum_m alpha(glm) delta(lm)/m)^2,
    either as the truncated nested sum or as the product of G(p)."""
    if method == "euler":
        sqrtX = math.sqrt(X)
        val = 1.0
        for p in primes_upto(int(X)):
            st = split_type(p, F)
            N = p * p if st is SplitType.INERT else p
            if N > X:
                continue
            regime = "small" if N <= sqrtX else "large"
            val *= euler_factor_G(p, st, regime, F)
        return SEstimate(value=val, method="euler", tail=0.0)
    if method != "nested":
        raise ValueError("method must be 'nested' or 'euler'")
    caps = caps or NestedCaps()
    alpha = hybrid.p_inverse_coeffs(F, X, caps.N)
    full = _nested_S(F, X, caps.N, alpha)
    half = _nested_S(F, X, caps.N // 2, alpha)
    return SEstimate(value=full, method="nested", tail=abs(full - half))


# ---------------------------------------------------------------------------
# theorem-scale diagnostics


def theorem2_check(F: QuadraticField, T: float, X: float, k: float = 1.0,
                   grid_step: float | None = None) -> float:
    """Moment of |P|^{2k} against a(k) (L(1,chi) e^gamma log X)^{2k^2}."""
    if X > 1.2 * math.log(T) ** 2:
        raise ValueError("X exceeds the desk-scale regime 1.2 (log T)^2")
    return moment_integral("P", F, T, k, X, grid_step).ratio


def theorem3_check(F: QuadraticField, T: float, X: float,
                   zeros: lfun.ZeroTable,
                   cfg: hybrid.HybridConfig | None = None,
                   grid_step: float | None = None) -> float:
    """Moment of |Z|^2 against log T log qT / (e^gamma log X)^2."""
    return moment_integral("Z", F, T, 1.0, X, grid_step,
                           zeros=zeros, cfg=cfg).ratio

"""Hybrid product zeta_K ~ P_K * Z_K and its ingredients.

P_K is a smoothed Euler product over prime-ideal norms <= X; Z_K is a
smoothed Hadamard product over critical-line zeros, driven by the
transform U(z) = int u(x) E1(z log x) dx of a mass-1 bump u supported
on [e^{1-1/X}, e].  This module builds the kernel and its transforms,
evaluates both factors, verifies the log-derivative explicit formula,
and expands the inverse Euler product's Dirichlet coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import gridval, lfun, specfn
from .fields import (QuadraticField, SplitType, l_one_chi, prime_ideal_norms,
                     primes_upto, split_type)

_N_NODES = 200


@dataclass(frozen=True)
class SmoothingKernel:
    """Mass-1 smooth bump on [e^{1-1/X}, e] with its quadrature rule."""

    X: float
    lo: float
    hi: float
    nodes: np.ndarray    # quadrature abscissae in (lo, hi)
    weights: np.ndarray  # already include the normalization ( sum w u = 1 )
    u_vals: np.ndarray   # u at the nodes
    shape: str

    @property
    def wu(self) -> np.ndarray:
        return self.weights * self.u_vals


@dataclass(frozen=True)
class HybridConfig:
    X: float
    zero_window: float | None = None  # half-width W; default 40/log X
    l: int = 4                        # error-exponent used in reports only

    def __post_init__(self):
        if self.X < 2:
            raise ValueError("X >= 2 required")
        if self.W < 20.0 / math.log(self.X) - 1e-12:
            raise ValueError("zero_window must be >= 20/log X")
        if self.l < 1:
            raise ValueError("l >= 1 required")

    @property
    def W(self) -> float:
        if self.zero_window is None:
            return 40.0 / math.log(self.X)
        return self.zero_window


def recommended_window(X: float) -> float:
    """Zero window large enough that the U-tail over excluded zeros is
    negligible; the tail only starts decaying once |t-gamma| log X >> X."""
    return max(40.0, 6.0 * X) / math.log(X)


def kernel_build(X: float, shape: str = "bump") -> SmoothingKernel:
    """Kernel u with compact support [e^{1-1/X}, e] and unit mass.

    shape="bump": C exp(-1/(1-w^2)); shape="sine2": C sin^2 on the same
    support (the alternative admissible kernel for consistency checks).
    """
    if X < 2:
        raise ValueError("X >= 2 required")
    lo = math.exp(1.0 - 1.0 / X)
    hi = math.e
    x01, w01 = np.polynomial.legendre.leggauss(_N_NODES)
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x01 + 1.0)
    weights = w01 * half
    if shape == "bump":
        w = (2.0 * nodes - (lo + hi)) / (hi - lo)
        u = np.exp(-1.0 / (1.0 - w * w))
    elif shape == "sine2":
        u = np.sin(math.pi * (nodes - lo) / (hi - lo)) ** 2
    else:
        raise ValueError(f"unknown kernel shape {shape!r}")
    mass = float(weights @ u)
    u = u / mass
    return SmoothingKernel(X=X, lo=lo, hi=hi, nodes=nodes,
                           weights=weights, u_vals=u, shape=shape)


def u_cap(z: complex, K: SmoothingKernel) -> complex:
    """U(z) = int u(x) E1(z log x) dx."""
    z = complex(z)
    if abs(z) < 1e-12:
        raise ValueError("U is logarithmically singular at z=0")
    return complex(K.wu @ specfn.e1_v(z * np.log(K.nodes)))


def u_cap_v(z: np.ndarray, K: SmoothingKernel) -> np.ndarray:
    """Vectorized U over an array of nonzero z."""
    z = np.asarray(z, dtype=np.complex128)
    args = z[:, None] * np.log(K.nodes)[None, :]
    return specfn.e1_v(args.ravel()).reshape(args.shape) @ K.wu


def u_hat(z: complex, K: SmoothingKernel) -> complex:
    """Mellin transform u^(z) = int u(x) x^{z-1} dx."""
    return complex(K.wu @ np.exp((complex(z) - 1.0) * np.log(K.nodes)))


def u_hat_v(z: np.ndarray, K: SmoothingKernel) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    return np.exp((z[:, None] - 1.0) * np.log(K.nodes)[None, :]) @ K.wu


def v_of(t: float, K: SmoothingKernel) -> float:
    """v(t) = int_t^inf u(x) dx; 1 below the support, 0 above it."""
    if t <= K.lo:
        return 1.0
    if t >= K.hi:
        return 0.0
    # re-quadrature on [t, hi] of the same normalized bump
    x01, w01 = np.polynomial.legendre.leggauss(_N_NODES)
    half = 0.5 * (K.hi - t)
    xs = t + half * (x01 + 1.0)
    if K.shape == "bump":
        w = (2.0 * xs - (K.lo + K.hi)) / (K.hi - K.lo)
        u = np.exp(-1.0 / (1.0 - w * w))
        # same normalization as the kernel's
        wfull = (2.0 * K.nodes - (K.lo + K.hi)) / (K.hi - K.lo)
        norm = float(K.weights @ np.exp(-1.0 / (1.0 - wfull * wfull)))
    else:
        u = np.sin(math.pi * (xs - K.lo) / (K.hi - K.lo)) ** 2
        norm = float(K.weights @ np.sin(math.pi * (K.nodes - K.lo)
                                        / (K.hi - K.lo)) ** 2)
    return float(w01 @ u) * half / norm


# ---------------------------------------------------------------------------
# P_K


def p_log_terms(F: QuadraticField, X: float) -> list[tuple[int, float]]:
    """(N(p)^m, 1/m) for all prime-ideal powers with norm <= X."""
    terms: list[tuple[int, float]] = []
    if X < 2:
        return terms
    for ideal in prime_ideal_norms(F, X).ideals:
        nm = ideal.norm
        m = 1
        while nm**m <= X:
            terms.append((nm**m, 1.0 / m))
            m += 1
    terms.sort()
    return terms


def p_eval(s: complex, F: QuadraticField, X: float) -> complex:
    """P_K(s, X) = exp( sum over N(a)=N(p)^m <= X of 1/(m N(p)^{ms}) )."""
    s = complex(s)
    if s.real < 0:
        raise ValueError("Re s >= 0 required")
    import cmath
    acc = 0.0 + 0.0j
    for n, c in p_log_terms(F, X):
        acc += c * cmath.exp(-s * math.log(n))
    return cmath.exp(acc)


def p_tilde_eval(s: complex, F: QuadraticField, X: float,
                 K: SmoothingKernel | None = None) -> complex:
    """Smoothed Euler product: as p_eval but with each term weighted by
    v(e^{log N(a)/log X}).

    This is the product the truncation argument actually controls; the
    sharp-cutoff p_eval differs from it by a factor 1 + O(X^{-sigma}
    log X), which is substantial at desk-scale X and sigma = 1/2.
    """
    s = complex(s)
    if K is None:
        K = kernel_build(X)
    logX = math.log(X)
    import cmath
    acc = 0.0 + 0.0j
    for n, c in p_log_terms(F, X):
        w = v_of(math.exp(math.log(n) / logX), K)
        if w:
            acc += c * w * cmath.exp(-s * math.log(n))
    return cmath.exp(acc)


def p_abs_grid(t0: float, h: float, npts: int, F: QuadraticField,
               X: float, sigma: float = 0.5) -> np.ndarray:
    """|P_K(sigma+it, X)| on a uniform t-grid (log P as a short
    Dirichlet polynomial via the recurrence kernel)."""
    terms = p_log_terms(F, X)
    nmax = max(n for n, _ in terms) if terms else 1
    coeff = np.zeros(nmax + 1)
    for n, c in terms:
        coeff[n] += c
    logp = gridval.dirichlet_polynomial_grid(coeff, sigma, t0, h, npts)
    return np.exp(logp.real)


# ---------------------------------------------------------------------------
# Z_K


class CoverageError(RuntimeError):
    """Zero table does not cover the needed window."""


def _window_gammas(zeros: lfun.ZeroTable, t: float, W: float) -> np.ndarray:
    g = zeros.ordinates
    if t + W > zeros.t_max + 1e-9:
        raise CoverageError(
            f"zero table reaches t_max={zeros.t_max}, need {t + W:.1f}")
    sel = g[(g >= t - W) & (g <= t + W)]
    if t - W < 0:
        refl = -g[(g > 0) & (-g >= t - W)]
        sel = np.concatenate([sel, refl])
    return sel


def z_eval(s: complex, F: QuadraticField, cfg: HybridConfig,
           zeros: lfun.ZeroTable, K: SmoothingKernel | None = None) -> complex:
    """Z_K(s, X) = exp(-sum_{|Im s - gamma| <= W} U((s - rho) log X))."""
    s = complex(s)
    if K is None:
        K = kernel_build(cfg.X)
    logX = math.log(cfg.X)
    gam = _window_gammas(zeros, s.imag, cfg.W)
    if gam.size == 0:
        return 1.0 + 0.0j
    z_args = (s - (0.5 + 1j * gam)) * logX
    if np.any(np.abs(z_args) < 1e-12):
        raise ValueError("s coincides with a zero rho")
    import cmath
    return cmath.exp(-complex(np.sum(u_cap_v(z_args, K))))


@dataclass(frozen=True)
class ZTable:
    """Uniform table of g(y) = Re U(iy) + gamma_E + log y (even, smooth)."""

    y_step: float
    g: np.ndarray
    y_max: float


def build_z_table(K: SmoothingKernel, cfg: HybridConfig,
                  y_step: float = 0.02, margin: float = 8.0) -> ZTable:
    y_max = cfg.W * math.log(cfg.X) + margin
    n = int(math.ceil(y_max / y_step)) + 2
    y = y_step * np.arange(n)
    ln_nodes = np.log(K.nodes)
    g = np.empty(n)
    # g(0) = -int u(x) log log x dx
    g[0] = -float(K.wu @ np.log(ln_nodes))
    args = y[1:, None] * ln_nodes[None, :]
    ci_vals = _ci_array(args.ravel()).reshape(args.shape)
    g[1:] = -(ci_vals @ K.wu) + specfn.EULER_GAMMA + np.log(y[1:])
    return ZTable(y_step=y_step, g=g, y_max=y_step * (n - 1))


def _ci_array(x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape)
    small = x < 1.0
    if np.any(small):
        xs = x[small]
        s = np.zeros_like(xs)
        term = np.ones_like(xs)
        for n in range(1, 30):
            term *= -xs * xs / ((2 * n) * (2 * n - 1))
            s += term / (2 * n)
        out[small] = specfn.EULER_GAMMA + np.log(xs) + s
    if np.any(~small):
        out[~small] = -specfn.e1_v(1j * x[~small]).real
    return out


@njit(cache=True)
def _z_log_abs2_kernel(t, gammas, W, logX, g_tab, y_step, euler_gamma):
    n = t.shape[0]
    out = np.zeros(n)
    j0 = 0
    j1 = 0
    m = gammas.shape[0]
    for i in range(n):
        ti = t[i]
        while j0 < m and gammas[j0] < ti - W:
            j0 += 1
        if j1 < j0:
            j1 = j0
        while j1 < m and gammas[j1] <= ti + W:
            j1 += 1
        acc = 0.0
        for j in range(j0, j1):
            y = abs(ti - gammas[j]) * logX
            if y < 1e-14:
                acc += 400.0  # |Z| -> 0 at a zero
                continue
            pos = y / y_step
            k = int(pos)
            if k + 1 >= g_tab.shape[0]:
                g_y = g_tab[g_tab.shape[0] - 1]
            else:
                frac = pos - k
                g_y = g_tab[k] * (1.0 - frac) + g_tab[k + 1] * frac
            acc += g_y - euler_gamma - math.log(y)
        out[i] = -2.0 * acc
    return out


def z_abs2_grid(t: np.ndarray, F: QuadraticField, cfg: HybridConfig,
                zeros: lfun.ZeroTable, K: SmoothingKernel | None = None,
                table: ZTable | None = None) -> np.ndarray:
    """|Z_K(1/2+it, X)|^2 on an ascending t-array (t - W > 0 required)."""
    t = np.asarray(t, dtype=np.float64)
    if t[0] - cfg.W < 0:
        raise ValueError("fast path requires t - W > 0 (no reflected zeros)")
    if t[-1] + cfg.W > zeros.t_max + 1e-9:
        raise CoverageError(
            f"zero table reaches t_max={zeros.t_max}, need {t[-1] + cfg.W:.1f}")
    if K is None:
        K = kernel_build(cfg.X)
    if table is None:
        table = build_z_table(K, cfg)
    log_abs2 = _z_log_abs2_kernel(t, zeros.ordinates, cfg.W, math.log(cfg.X),
                                  table.g, table.y_step, specfn.EULER_GAMMA)
    return np.exp(log_abs2)


# ---------------------------------------------------------------------------
# residuals


def hybrid_residual(t: float, F: QuadraticField, cfg: HybridConfig,
                    zeros: lfun.ZeroTable,
                    K: SmoothingKernel | None = None,
                    weighted: bool = True) -> float:
    """|zeta_K(1/2+it) - P Z_K| / (|zeta_K(1/2+it)| + 1e-12).

    With weighted=True (default) P is the v-weighted Euler product,
    whose error against zeta_K/Z_K is O(X^{l+2}/(|s| log X)^l) plus
    window truncation only; weighted=False uses the sharp cutoff, which
    adds a 1 + O(X^{-1/2} log X) factor on the critical line.
    """
    if t < 2:
        raise ValueError("t >= 2 required")
    if K is None:
        K = kernel_build(cfg.X)
    s = 0.5 + 1j * t
    zk = lfun.zetaK_eval(s, F)
    p = (p_tilde_eval(s, F, cfg.X, K) if weighted
         else p_eval(s, F, cfg.X))
    pz = p * z_eval(s, F, cfg, zeros, K)
    return abs(zk - pz) / (abs(zk) + 1e-12)


_TRIVIAL_TERMS = 15
_ZERO_SUM_WINDOW = 300.0


def explicit_formula_residual(s: complex, F: QuadraticField,
                              K: SmoothingKernel,
                              zeros: lfun.ZeroTable) -> float:
    """|LHS - RHS| of the smoothed log-derivative formula.

    Left side: -zeta_K'/zeta_K(s) by central differencing of log zeta_K.
    Right side: smoothed prime-ideal sum minus zero and trivial-zero
    sums plus the pole term u^(1-(s-1)log X)/(s-1); the pole term's
    sign and unit coefficient are forced by the s->1 limit (u^(1)=1
    must reproduce the +1/(s-1) singularity of -zeta_K'/zeta_K).
    """
    s = complex(s)
    if s.real < 1.2:
        raise ValueError("Re s >= 1.2 required for the reference value")
    X = K.X
    logX = math.log(X)
    h = 1e-3
    import cmath
    lhs = -(cmath.log(lfun.zetaK_eval(s + h, F) / lfun.zetaK_eval(s - h, F))
            / (2 * h))

    # Lambda(a) = log N(p) for a = p^m
    prime_sum = 0.0 + 0.0j
    for ideal in prime_ideal_norms(F, X).ideals:
        lam = math.log(ideal.norm)  # log of the prime ideal's norm
        m = 1
        while ideal.norm**m <= X:
            nn = float(ideal.norm**m)
            weight = v_of(math.exp(math.log(nn) / logX), K)
            prime_sum += lam * nn**(-s) * weight
            m += 1

    t0 = s.imag
    g = zeros.ordinates
    need = abs(t0) + _ZERO_SUM_WINDOW
    if need > zeros.t_max + 1e-9:
        raise CoverageError(
            f"zero table reaches t_max={zeros.t_max}, need {need:.1f}")
    gam_all = np.concatenate([g[(g <= need)], -g[(g <= need)]])
    gam = gam_all[np.abs(t0 - gam_all) <= _ZERO_SUM_WINDOW]
    rho = 0.5 + 1j * gam
    zero_sum = complex(np.sum(u_hat_v(1.0 - (s - rho) * logX, K) / (s - rho)))

    triv_even = sum(u_hat(1.0 - (s + 2 * m) * logX, K) / (s + 2 * m)
                    for m in range(1, _TRIVIAL_TERMS + 1))
    triv_odd = sum(u_hat(1.0 - (s + 2 * j + 1) * logX, K) / (s + 2 * j + 1)
                   for j in range(_TRIVIAL_TERMS + 1))
    pole = u_hat(1.0 - (s - 1.0) * logX, K) / (s - 1.0)

    rhs = (prime_sum - zero_sum - (F.r1 + F.r2) * triv_even
           - F.r2 * triv_odd + pole)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# inverse Euler product coefficients


@dataclass(frozen=True)
class AlphaCoeffs:
    """Dirichlet coefficients of P_K(s,X)^{-1} up to N_max (X-smooth norms)."""

    X: float
    N_max: int
    coeffs: dict[int, float] = field(default_factory=dict)

    def alpha(self, n: int) -> float:
        return self.coeffs.get(n, 0.0)

    def in_WX(self, n: int) -> bool:
        return n in self.coeffs


def _block_coeffs(p: int, st: SplitType, X: float) -> list[tuple[int, float]]:
    # local factor of R_s(s,X) Q_i(2s, sqrt X) Q_r(s,X) at p, as
    # (p-power, coefficient); regimes split at sqrt X in the norm.
    sqrtX = math.sqrt(X)
    if st is SplitType.SPLIT:
        if p <= sqrtX:
            return [(1, 1.0), (p, -2.0), (p * p, 1.0)]
        return [(1, 1.0), (p, -2.0), (p * p, 2.0)]
    if st is SplitType.INERT:
        nrm = p * p
        if nrm > X:
            return [(1, 1.0)]
        if nrm <= sqrtX:
            return [(1, 1.0), (nrm, -1.0)]
        return [(1, 1.0), (nrm, -1.0), (nrm * nrm, 0.5)]
    # ramified
    if p <= sqrtX:
        return [(1, 1.0), (p, -1.0)]
    return [(1, 1.0), (p, -1.0), (p * p, 0.5)]


def p_inverse_coeffs(F: QuadraticField, X: float, N_max: int) -> AlphaCoeffs:
    """alpha(n) with P_K(1/2+it,X)^{-1} ~ sum alpha(n) n^{-1/2-it}."""
    if N_max > 10**6:
        raise ValueError("N_max <= 1e6 supported")
    coeffs = {1: 1.0}
    for p in primes_upto(int(X)):
        st = split_type(p, F)
        block = _block_coeffs(p, st, X)
        if len(block) == 1:
            continue
        new: dict[int, float] = {}
        for n, c in coeffs.items():
            for q, d in block:
                if n * q <= N_max:
                    new[n * q] = new.get(n * q, 0.0) + c * d
        coeffs = new
    return AlphaCoeffs(X=X, N_max=N_max, coeffs=coeffs)

"""Self-contained special functions.

Complex Gamma and log-Gamma (Lanczos), Barnes G at integers, the
exponential integral E1, the cosine integral Ci and Euler's constant.
External libraries appear only in the test suite, as oracles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class SpecialFnConfig:
    target_abs_tol: float = 1e-13
    e1_series_cutoff: float = 4.0  # series below, continued fraction above

    def __post_init__(self):
        if self.target_abs_tol <= 0 or self.e1_series_cutoff <= 0:
            raise ValueError("tolerances and thresholds must be positive")


def euler_gamma() -> float:
    return EULER_GAMMA


# Lanczos approximation, g = 7, 9 terms; ~1e-13 relative over the right
# half plane including large imaginary parts.
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_series(z: complex) -> complex:
    a = complex(_LANCZOS_C[0])
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        a += c / (z + i - 1)
    return a


def gamma_c(z: complex) -> complex:
    """Complex Gamma function; raises at nonpositive integer poles."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise ValueError(f"Gamma pole at z={z}")
    if z.real < 0.5:
        # reflection; sin overflows for |Im z| >~ 700 but then Gamma
        # itself under/overflows in doubles anyway
        return math.pi / (cmath.sin(math.pi * z) * gamma_c(1.0 - z))
    zz = z - 1.0
    a = _lanczos_series(z)
    t = zz + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (zz + 0.5) * cmath.exp(-t) * a


def _log_sin_pi(z: complex) -> complex:
    # log sin(pi z) without overflow for large |Im z|
    if z.imag > 0:
        return 1j * math.pi * z + cmath.log((1 - cmath.exp(-2j * math.pi * z)) / (2j))
    return -1j * math.pi * z + cmath.log((1 - cmath.exp(2j * math.pi * z)) / (-2j))


def loggamma_c(z: complex) -> complex:
    """log Gamma(z), principal-branch based; continuous on vertical lines
    in the right half plane (the only use made of it here)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise ValueError(f"Gamma pole at z={z}")
    if z.real < 0.1:
        return math.log(math.pi) - _log_sin_pi(z) - loggamma_c(1.0 - z)
    zz = z - 1.0
    a = _lanczos_series(z)
    t = zz + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zz + 0.5) * cmath.log(t) - t + cmath.log(a)


def loggamma_v(z: np.ndarray) -> np.ndarray:
    """Vectorized loggamma for arrays with Re z >= 0.1."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z.real < 0.1):
        raise ValueError("loggamma_v requires Re z >= 0.1")
    zz = z - 1.0
    a = np.full_like(z, _LANCZOS_C[0])
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        a += c / (z + (i - 1))
    t = zz + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zz + 0.5) * np.log(t) - t + np.log(a)


def barnes_g(n: int) -> int:
    """Barnes G at a positive integer: G(n) = prod_{j=1}^{n-2} j!."""
    if n < 1:
        raise ValueError("n must be >= 1")
    g = 1
    f = 1
    for j in range(1, n - 1):
        f *= j
        g *= f
    return g


def g_of_k(k: int) -> int:
    """g(k) = (k^2)! G(k+1)^2 / G(2k+1), exactly (it is an integer)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    num = math.factorial(k * k) * barnes_g(k + 1) ** 2
    den = barnes_g(2 * k + 1)
    q, r = divmod(num, den)
    if r != 0:
        raise ArithmeticError(f"g({k}) is not integral; internal error")
    return q


_E1_SERIES_TERMS = 60
_E1_CF_ITERS = 200


def e1(z: complex) -> complex:
    """Exponential integral E1(z), principal branch.

    Power series for |z| < 4, modified Lentz continued fraction above.
    Absolute error <= 1e-12 on 1e-6 <= |z| <= 700.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("E1 is singular at z=0")
    if abs(z) < 4.0:
        s = 0.0 + 0.0j
        term = 1.0 + 0.0j
        for n in range(1, _E1_SERIES_TERMS + 1):
            term *= -z / n
            s += term / n
        return -EULER_GAMMA - cmath.log(z) - s
    # E1(z) = exp(-z) / (z + 1/(1 + 1/(z + 2/(1 + 2/(z + ...)))))
    tiny = 1e-300
    f = tiny
    C = f
    D = 0.0 + 0.0j
    b = z
    a = 1.0 + 0.0j
    # modified Lentz on the even/odd ladder a_1=1,b_1=z; a_2=1,b_2=1; ...
    n_half = 1
    odd = True
    for _ in range(_E1_CF_ITERS):
        D = b + a * D
        if D == 0:
            D = tiny
        C = b + a / C
        if C == 0:
            C = tiny
        D = 1.0 / D
        delta = C * D
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        if odd:
            a = complex(n_half)
            b = 1.0 + 0.0j
            odd = False
        else:
            a = complex(n_half)
            b = z
            n_half += 1
            odd = True
    return cmath.exp(-z) * f


def e1_v(z: np.ndarray) -> np.ndarray:
    """Vectorized E1 over a complex array (entries nonzero)."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    small = np.abs(z) < 4.0
    if np.any(small):
        zs = z[small]
        s = np.zeros_like(zs)
        term = np.ones_like(zs)
        for n in range(1, _E1_SERIES_TERMS + 1):
            term *= -zs / n
            s += term / n
        out[small] = -EULER_GAMMA - np.log(zs) - s
    if np.any(~small):
        zl = z[~small]
        tiny = 1e-300
        f = np.full_like(zl, tiny)
        C = f.copy()
        D = np.zeros_like(zl)
        b = zl.copy()
        a = np.ones_like(zl)
        n_half = 1
        odd = True
        for _ in range(_E1_CF_ITERS):
            D = b + a * D
            D[D == 0] = tiny
            C = b + a / C
            C[C == 0] = tiny
            D = 1.0 / D
            delta = C * D
            f *= delta
            if np.all(np.abs(delta - 1.0) < 1e-16):
                break
            if odd:
                a = np.full_like(zl, float(n_half))
                b = np.ones_like(zl)
                odd = False
            else:
                a = np.full_like(zl, float(n_half))
                b = zl.copy()
                n_half += 1
                odd = True
        out[~small] = np.exp(-zl) * f
    return out


def ci(x: float) -> float:
    """Cosine integral Ci(x) for x > 0."""
    if x <= 0:
        raise ValueError("Ci requires x > 0")
    if x < 1.0:
        s = 0.0
        term = 1.0
        for n in range(1, 30):
            term *= -x * x / ((2 * n) * (2 * n - 1))
            s += term / (2 * n)
        return EULER_GAMMA + math.log(x) + s
    return -e1(1j * x).real

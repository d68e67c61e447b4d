"""zeta(s), L(s,chi), zeta_K(s): evaluation, rotation, zero location.

Both factors of zeta_K = zeta * L are evaluated by Euler-Maclaurin
(gridval), extended by the functional equation to the left half plane.
Critical-line zeros are located by a sign scan of the rotated (Hardy)
real function on a fine grid, refined by bisection on an 8-point
interpolant, and audited against the expected zero count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import gridval, specfn
from .fields import QuadraticField, build_field

_LN_PI = math.log(math.pi)


class IncompleteScanError(RuntimeError):
    """Zero count disagrees with the expected count beyond +-2."""


@dataclass(frozen=True)
class LComponent:
    """One primitive factor of zeta_K: the zeta factor or the L factor."""

    kind: str  # "zeta" | "Lchi"
    F: QuadraticField | None
    conductor: int
    parity_a: int

    def __post_init__(self):
        if self.kind == "zeta":
            if self.conductor != 1 or self.parity_a != 0:
                raise ValueError("zeta component must have q=1, a=0")
        elif self.kind == "Lchi":
            if self.F is None or self.conductor != self.F.q:
                raise ValueError("conductor inconsistent with the field")
            if self.parity_a != self.F.parity_a:
                raise ValueError("parity inconsistent with the field")
        else:
            raise ValueError(f"unknown component kind {self.kind!r}")


def zeta_component(F: QuadraticField | None = None) -> LComponent:
    return LComponent(kind="zeta", F=F, conductor=1, parity_a=0)


def lchi_component(F: QuadraticField) -> LComponent:
    return LComponent(kind="Lchi", F=F, conductor=F.q, parity_a=F.parity_a)


# ---------------------------------------------------------------------------
# evaluation


def zeta_eval(s: complex) -> complex:
    """zeta(s); Euler-Maclaurin, functional equation for Re s < 0."""
    s = complex(s)
    if s == 1:
        raise ValueError("zeta has a pole at s=1")
    if s.real >= 0.0:
        return gridval.series_point(s)
    # zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)
    pref = cexp = None
    pref = (2.0 ** s) * math.pi ** (s - 1) if abs(s.imag) < 30 else None
    if pref is not None:
        return pref * _sin_half(s) * specfn.gamma_c(1.0 - s) * gridval.series_point(1.0 - s)
    # log form for large |Im s| (Gamma under/overflows in parts)
    logv = (s * math.log(2.0) + (s - 1) * _LN_PI
            + _log_sin_half(s) + specfn.loggamma_c(1.0 - s))
    return cexp_safe(logv) * gridval.series_point(1.0 - s)


def _sin_half(s: complex) -> complex:
    import cmath
    return cmath.sin(math.pi * s / 2.0)


def _log_sin_half(s: complex) -> complex:
    return specfn._log_sin_pi(s / 2.0)


def cexp_safe(z: complex) -> complex:
    if z.real > 700.0:
        raise OverflowError("functional-equation prefactor overflows")
    if z.real < -745.0:
        return 0.0 + 0.0j
    import cmath
    return cmath.exp(z)


def lchi_eval(s: complex, F: QuadraticField) -> complex:
    """L(s,chi) for the field's Kronecker character; entire in s."""
    s = complex(s)
    if s.real >= 0.0:
        return gridval.series_point(s, F)
    # Lambda(s) = (q/pi)^{s/2} Gamma((s+a)/2) L(s) = Lambda(1-s), eps=+1
    a = F.parity_a
    logpref = ((0.5 - s) * math.log(F.q / math.pi)
               + specfn.loggamma_c((1.0 - s + a) / 2.0)
               - specfn.loggamma_c((s + a) / 2.0))
    return cexp_safe(logpref) * gridval.series_point(1.0 - s, F)


def zetaK_eval(s: complex, F: QuadraticField) -> complex:
    s = complex(s)
    if s == 1:
        raise ValueError("zeta_K has a pole at s=1")
    return zeta_eval(s) * lchi_eval(s, F)


def completed(s: complex, c: LComponent) -> complex:
    """Lambda(s) = (q/pi)^{s/2} Gamma((s+a)/2) x (component value)."""
    s = complex(s)
    a = c.parity_a
    logpref = 0.5 * s * math.log(c.conductor / math.pi) + specfn.loggamma_c((s + a) / 2.0)
    val = zeta_eval(s) if c.kind == "zeta" else lchi_eval(s, c.F)
    return cexp_safe(logpref) * val


def fe_residual(s: complex, c: LComponent) -> float:
    """|Lambda(s) - Lambda(1-s)| / |Lambda(s)| (root number +1)."""
    lam = completed(s, c)
    return abs(lam - completed(1.0 - s, c)) / abs(lam)


# ---------------------------------------------------------------------------
# rotation and zero counting


def hardy_theta(t: np.ndarray | float, c: LComponent) -> np.ndarray | float:
    """Phase theta_c(t) with e^{i theta} c(1/2+it) real."""
    scalar = np.isscalar(t)
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    z = (0.5 + c.parity_a) / 2.0 + 0.5j * t_arr
    th = specfn.loggamma_v(z).imag + 0.5 * t_arr * math.log(c.conductor / math.pi)
    return float(th[0]) if scalar else th


def hardy_rotation(t: float, c: LComponent) -> complex:
    """The unit e^{i theta_c(t)}."""
    import cmath
    return cmath.exp(1j * hardy_theta(t, c))


def zero_density_expected(c: LComponent, t: float) -> float:
    """(1/pi) log(q (t/2pi)^d), d=1: twice the mean zero density per
    unit ordinate (the expected count integrates half of it)."""
    if t < 2:
        raise ValueError("t >= 2 required")
    return math.log(c.conductor * (t / (2 * math.pi))) / math.pi


def expected_zero_count(c: LComponent, t: float) -> float:
    """Expected number of zeros with 0 < gamma <= t: theta_c(t)/pi + 1."""
    if t <= 0:
        return 0.0
    return hardy_theta(t, c) / math.pi + 1.0


@dataclass(frozen=True)
class ZeroTable:
    component: LComponent
    t_max: float
    ordinates: np.ndarray  # ascending positive reals
    resolution: float

    def __post_init__(self):
        o = self.ordinates
        if o.size and not np.all(np.diff(o) > 0):
            raise ValueError("ordinates must be strictly increasing")


def default_scan_step(q: int, t_max: float) -> float:
    return 0.25 / math.log(q * t_max + 10.0)


_BARY_W = np.array([1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0])


def _interp_batch(vals: np.ndarray, t0: float, h: float, i0: np.ndarray,
                  t: np.ndarray) -> np.ndarray:
    # 8-point equispaced barycentric interpolation; window starts at i0
    nodes_t = t0 + h * (i0[:, None] + np.arange(8))
    f = vals[i0[:, None] + np.arange(8)]
    d = t[:, None] - nodes_t
    hit = np.abs(d) < 1e-14 * max(1.0, abs(t0))
    d[hit] = 1.0
    w = _BARY_W / d
    out = (w * f).sum(axis=1) / w.sum(axis=1)
    row_hit = hit.any(axis=1)
    if np.any(row_hit):
        out[row_hit] = f[hit][: row_hit.sum()]
    return out


def _refine_zeros(vals: np.ndarray, t0: float, h: float,
                  idx: np.ndarray) -> np.ndarray:
    # bisection on the interpolant inside each bracket [idx, idx+1]
    n = vals.shape[0]
    i0 = np.clip(idx - 3, 0, n - 8)
    lo = t0 + h * idx
    hi = lo + h
    flo = vals[idx]
    n_iter = int(math.ceil(math.log2(h / 1e-10))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        fm = _interp_batch(vals, t0, h, i0, mid)
        left = (flo * fm) <= 0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fm)
    return 0.5 * (lo + hi)


def _scan_once(c: LComponent, F: QuadraticField, t_max: float,
               step: float) -> np.ndarray:
    grid = gridval.critical_grid(F, 0.0, t_max + 2 * step, step,
                                 want_zeta=c.kind == "zeta",
                                 want_lchi=c.kind == "Lchi")
    vals = grid.zeta if c.kind == "zeta" else grid.lchi
    theta = hardy_theta(grid.t, c)
    rot = (np.exp(1j * theta) * vals).real
    sign = np.sign(rot)
    sign[sign == 0] = 1.0
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    zeros = _refine_zeros(rot, grid.t0, grid.step, idx)
    return zeros[(zeros > 0) & (zeros <= t_max)]


def find_zeros(c: LComponent, t_max: float, step: float | None = None) -> ZeroTable:
    """Scan (0, t_max] for critical-line zeros of the component.

    Sign scan at `step`, bisection refinement to ~1e-9, count audit
    against expected_zero_count; on audit failure one rescan at step/8,
    then IncompleteScanError.
    """
    if t_max < 1:
        raise ValueError("t_max >= 1 required")
    max_step = default_scan_step(c.conductor, t_max)
    if step is None:
        step = max_step
    if step > max_step * (1 + 1e-9):
        raise ValueError(f"step {step} too coarse; need <= {max_step:.6f}")
    F = c.F if c.F is not None else build_field(-4)
    # root-number sanity: the rotation construction assumes eps = +1
    if fe_residual(0.6 + 5j, c) > 1e-6:
        raise RuntimeError("functional-equation residual too large; "
                           "component is not self-dual with root number +1")
    expected = expected_zero_count(c, t_max)
    for attempt_step in (step, step / 8.0):
        zeros = _scan_once(c, F, t_max, attempt_step)
        if abs(zeros.size - expected) <= 2.0:
            return ZeroTable(component=c, t_max=t_max, ordinates=zeros,
                             resolution=attempt_step)
    raise IncompleteScanError(
        f"found {zeros.size} zeros to t={t_max}, expected {expected:.1f}; "
        f"rescan at step/8 did not close the gap")


def merge_tables(tz: ZeroTable, tl: ZeroTable) -> ZeroTable:
    """Sorted union (with multiplicity) of two component zero tables."""
    merged = np.sort(np.concatenate([tz.ordinates, tl.ordinates]))
    return ZeroTable(component=tl.component,
                     t_max=min(tz.t_max, tl.t_max), ordinates=merged,
                     resolution=max(tz.resolution, tl.resolution))


def merged_zeros(F: QuadraticField, t_max: float,
                 step: float | None = None) -> ZeroTable:
    """Zeros of zeta_K: the merged zeta and L tables, freshly scanned."""
    return merge_tables(find_zeros(zeta_component(F), t_max, step),
                        find_zeros(lchi_component(F), t_max, step))


# ---------------------------------------------------------------------------
# zero cache files


def cache_filename(kind: str, d_K: int, t_max: float) -> str:
    return f"zeros_{kind}_dk{d_K}_t{t_max:g}.txt"


def save_zero_table(table: ZeroTable, path: str) -> None:
    c = table.component
    d_K = c.F.d_K if c.F is not None else 0
    lines = [f"# component={'zeta' if c.kind == 'zeta' else 'Lchi'} "
             f"d_K={d_K} q={c.conductor} t_max={table.t_max:g} "
             f"step={table.resolution:.12g}"]
    lines += [f"{g:.12f}" for g in table.ordinates]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_zero_table(path: str) -> ZeroTable:
    with open(path) as fh:
        header = fh.readline().strip()
        ordinates = np.array([float(line) for line in fh if line.strip()])
    if not header.startswith("# component="):
        raise ValueError(f"{path}: not a zero-cache file")
    fields = dict(item.split("=", 1) for item in header[2:].split())
    kind = fields["component"]
    d_K = int(fields["d_K"])
    F = build_field(d_K) if d_K not in (0, 1) else None
    c = zeta_component(F) if kind == "zeta" else lchi_component(F)
    return ZeroTable(component=c, t_max=float(fields["t_max"]),
                     ordinates=ordinates, resolution=float(fields["step"]))


def ensure_zero_cache(F: QuadraticField, t_max: float, cache_dir: str,
                      step: float | None = None) -> tuple[ZeroTable, ZeroTable]:
    """Load or compute-and-save the two component tables covering t_max."""
    os.makedirs(cache_dir, exist_ok=True)
    out = []
    for c in (zeta_component(F), lchi_component(F)):
        # any cached table at least as deep will do; prefer the deepest
        prefix = f"zeros_{c.kind}_dk{F.d_K}_t"
        best = None
        for name in os.listdir(cache_dir):
            if name.startswith(prefix) and name.endswith(".txt"):
                try:
                    depth = float(name[len(prefix):-4])
                except ValueError:
                    continue
                if depth >= t_max and (best is None or depth > best[0]):
                    best = (depth, name)
        if best is not None:
            table = load_zero_table(os.path.join(cache_dir, best[1]))
            if table.t_max >= t_max:
                out.append(table)
                continue
        table = find_zeros(c, t_max, step)
        save_zero_table(table, os.path.join(
            cache_dir, cache_filename(c.kind, F.d_K, t_max)))
        out.append(table)
    return tuple(out)

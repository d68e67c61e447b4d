"""Batch experiment harness.

Three subcommands wire the library into reproducible runs: `zeros`
builds or refreshes the component zero caches, `run` executes a panel
of checks over a (T, X, k) grid and writes a CSV/JSON report, and
`constants` prints the leading-constant table.  CSV is canonical; the
JSON report mirrors it field-for-field.  Exit code 0 means every report
row passed its threshold.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import constants, hybrid, lfun, moments, recipe
from .fields import build_field, l_one_chi
from .specfn import g_of_k

CHECKS = ("hybrid", "moment", "splitting", "theorem2", "theorem3",
          "constants", "recipe", "coeffsum")
CSV_HEADER = "check,d_K,T,X,k,value,target,status,detail"

_HYBRID_SAMPLES = 12
_HYBRID_MEDIAN_MAX = 0.05
_MOMENT_BAND = (0.5, 2.0)
_SPLITTING_BAND = (0.7, 1.4)
_THEOREM2_BAND = (0.8, 1.25)
_THEOREM3_BAND = (0.6, 1.5)


@dataclass(frozen=True)
class ExperimentConfig:
    d_K: int = -4
    T: tuple[float, ...] = (1000.0, 5000.0)
    X: tuple[float, ...] = (10.0, 16.0)
    k: tuple[int, ...] = (1,)
    grid_step: float | None = None
    cache_dir: str = ".zero-cache"
    out: str = "report.csv"
    format: str = "csv"
    workers: int = 1
    deterministic: bool = True
    checks: tuple[str, ...] = CHECKS

    def __post_init__(self):
        if not (self.T and self.X and self.k):
            raise ValueError("T, X and k lists must be nonempty")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise ValueError("workers >= 1 required")
        for c in self.checks:
            if c not in CHECKS:
                raise ValueError(f"unknown check name {c!r}")


def config_from_json(text: str) -> ExperimentConfig:
    data = json.loads(text)
    kwargs = {}
    for field in ExperimentConfig.__dataclass_fields__:
        if field in data:
            v = data[field]
            kwargs[field] = tuple(v) if isinstance(v, list) else v
    return ExperimentConfig(**kwargs)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _row(check, d_K, T, X, k, value, target, status, detail=""):
    return {"check": check, "d_K": _fmt(d_K), "T": _fmt(T), "X": _fmt(X),
            "k": _fmt(k), "value": _fmt(value), "target": target,
            "status": status, "detail": detail}


def _band_row(check, d_K, T, X, k, value, band, detail=""):
    lo, hi = band
    status = "pass" if lo <= value <= hi else "fail"
    # no comma in the target: fields must stay comma-free for the CSV
    return _row(check, d_K, T, X, k, value, f"[{lo:g}..{hi:g}]", status,
                detail)


# ---------------------------------------------------------------------------
# report rows


def _make_tasks(config: ExperimentConfig, F, zeros):
    """One zero-argument callable per report row, in config order."""
    tasks = []
    d_K = config.d_K

    def add(fn):
        tasks.append(fn)

    for name in config.checks:
        if name == "hybrid":
            for T in config.T:
                for X in config.X:
                    add(lambda T=T, X=X: _hybrid_row(config, F, zeros, T, X))
        elif name == "moment":
            for T in config.T:
                for X in config.X:
                    for k in config.k:
                        add(lambda T=T, X=X, k=k:
                            _moment_row(config, F, T, X, k))
        elif name == "splitting":
            for T in config.T:
                for X in config.X:
                    for k in config.k:
                        add(lambda T=T, X=X, k=k:
                            _splitting_row(config, F, zeros, T, X, k))
        elif name == "theorem2":
            for T in config.T:
                for X in config.X:
                    add(lambda T=T, X=X: _theorem2_row(config, F, T, X))
        elif name == "theorem3":
            for T in config.T:
                for X in config.X:
                    add(lambda T=T, X=X:
                        _theorem3_row(config, F, zeros, T, X))
        elif name == "constants":
            for k in config.k:
                add(lambda k=k: _constants_row(F, d_K, k))
        elif name == "recipe":
            add(lambda: _recipe_gk_row(d_K))
            add(lambda: _recipe_al_row(F, d_K))
        elif name == "coeffsum":
            add(lambda: _coeffsum_row(F, d_K))
            add(lambda: _selberg_row(F, d_K))
            add(lambda: _chandra_row(F, d_K))
    return tasks


def _hybrid_row(config, F, zeros, T, X):
    cfg = hybrid.HybridConfig(X=X, zero_window=hybrid.recommended_window(X))
    rng = random.Random(7 if config.deterministic else None)
    K = hybrid.kernel_build(X)
    res = sorted(hybrid.hybrid_residual(T + rng.random() * T, F, cfg,
                                        zeros, K)
                 for _ in range(_HYBRID_SAMPLES))
    med = statistics.median(res)
    status = "pass" if med < _HYBRID_MEDIAN_MAX else "fail"
    return _row("hybrid", config.d_K, T, X, None, med,
                f"<{_HYBRID_MEDIAN_MAX:g}", status,
                f"max={res[-1]:.4g} n={_HYBRID_SAMPLES}")


def _moment_row(config, F, T, X, k):
    r = moments.moment_integral("zetaK", F, T, float(k), X,
                                grid_step=config.grid_step)
    return _band_row("moment", config.d_K, T, X, k, r.ratio, _MOMENT_BAND,
                     f"value={r.value:.6g} n={r.n_points}")


def _splitting_row(config, F, zeros, T, X, k):
    v = moments.splitting_ratio(F, T, X, float(k), zeros,
                                grid_step=config.grid_step)
    return _band_row("splitting", config.d_K, T, X, k, v, _SPLITTING_BAND)


def _theorem2_row(config, F, T, X):
    if X > 1.2 * math.log(T) ** 2:
        return _row("theorem2", config.d_K, T, X, 1, None, "", "error",
                    "X exceeds 1.2 log^2 T")
    v = moments.theorem2_check(F, T, X, grid_step=config.grid_step)
    return _band_row("theorem2", config.d_K, T, X, 1, v, _THEOREM2_BAND)


def _theorem3_row(config, F, zeros, T, X):
    v = moments.theorem3_check(F, T, X, zeros, grid_step=config.grid_step)
    return _band_row("theorem3", config.d_K, T, X, 1, v, _THEOREM3_BAND)


def _constants_row(F, d_K, k):
    a = constants.a_k_quadratic(float(k), F)
    if k >= 1:
        chk = constants.a_equals_b_check(F, int(k), 30)
        status = "pass" if chk["max_diff"] < 1e-9 else "fail"
        detail = f"tail={a.tail_bound:.2g} a=b max_diff={chk['max_diff']:.2g}"
    else:
        status, detail = "pass", f"tail={a.tail_bound:.2g}"
    return _row("constants", d_K, None, None, k, a.value, "a(k)", status,
                detail)


def _recipe_gk_row(d_K):
    v = recipe.leading_constant_gk(1)
    status = "pass" if abs(v - 1.0) < 1e-6 else "fail"
    return _row("recipe", d_K, None, None, 1, v, "gk(1)=1", status)


def _recipe_al_row(F, d_K):
    aL = recipe.a_L_constant(recipe.zetaK_spec(F), 1).value
    ref = constants.a_k_quadratic(1.0, F).value * l_one_chi(F) ** 2
    rel = abs(aL / ref - 1.0)
    status = "pass" if rel < 1e-8 else "fail"
    return _row("recipe", d_K, None, None, 1, aL, "a_L(1)=a(1)L^2", status,
                f"rel={rel:.2g}")


def _coeffsum_row(F, d_K):
    r = recipe.coeff_sum_check(recipe.zetaK_spec(F), 1, 10 ** 6)
    rel = abs(r.fitted_leading / r.predicted - 1.0)
    status = "pass" if rel < 0.3 else "fail"
    return _row("coeffsum", d_K, None, None, 1, r.fitted_leading,
                "a_L(1)/2 within 30%", status, f"rel={rel:.3g}")


def _selberg_row(F, d_K):
    s = recipe.selberg_checks(recipe.zetaK_spec(F))
    ok = s.band_width < 1.5 and s.orth_max < 1.0
    return _row("coeffsum", d_K, None, None, None, s.band_width,
                "band<1.5 orth<1", "pass" if ok else "fail",
                f"orth_max={s.orth_max:.4g}")


def _chandra_row(F, d_K):
    c = recipe.chandra_nara_check(F)
    ok = abs(c.slope - 1.0) <= 0.02
    return _row("coeffsum", d_K, None, None, None, c.slope,
                "slope=1.00+-0.02", "pass" if ok else "fail",
                f"drift={c.top_decade_drift:.3g}")


# ---------------------------------------------------------------------------
# report serialization


def render_report(rows: list[dict], fmt: str) -> str:
    if fmt == "csv":
        lines = [CSV_HEADER]
        # free-text fields (error details) may contain commas; keep the
        # row parseable by plain split(",")
        lines += [",".join(r[c].replace(",", ";")
                           for c in CSV_HEADER.split(","))
                  for r in rows]
        return "\n".join(lines) + "\n"
    return json.dumps(rows, indent=2) + "\n"


def write_report(rows: list[dict], config: ExperimentConfig) -> None:
    with open(config.out, "w") as fh:
        fh.write(render_report(rows, config.format))
    # the other format is mirrored next to the canonical file
    other = "json" if config.format == "csv" else "csv"
    base, _ = os.path.splitext(config.out)
    with open(f"{base}.{other}" if base else config.out + "." + other,
              "w") as fh:
        fh.write(render_report(rows, other))


# ---------------------------------------------------------------------------
# subcommands


def cmd_zeros(d_K: int, t_max: float, step: float | None,
              cache_dir: str) -> int:
    F = build_field(d_K)
    try:
        tz, tl = lfun.ensure_zero_cache(F, t_max, cache_dir, step)
    except (ValueError, lfun.IncompleteScanError) as e:
        print(f"dedm zeros: {e}", file=sys.stderr)
        return 2
    for tab, kind in ((tz, "zeta"), (tl, "Lchi")):
        exp = lfun.expected_zero_count(tab.component, t_max)
        n = int((tab.ordinates <= t_max).sum())
        print(f"{kind}: {n} zeros to t={t_max:g} (expected {exp:.1f})")
    return 0


def cmd_run(config: ExperimentConfig) -> int:
    F = build_field(config.d_K)
    zeros = None
    needs_zeros = {"hybrid", "splitting", "theorem3"} & set(config.checks)
    if needs_zeros:
        w = max(hybrid.recommended_window(X) for X in config.X)
        t_need = 2.0 * max(config.T) + w + 1.0
        tz, tl = lfun.ensure_zero_cache(F, t_need, config.cache_dir)
        zeros = lfun.merge_tables(tz, tl)
    tasks = _make_tasks(config, F, zeros)

    def run_one(fn):
        try:
            return fn()
        except Exception as e:  # per-row error string, hard failure
            return _row("error", config.d_K, None, None, None, None, "",
                        "error", f"{type(e).__name__}: {e}")

    if config.workers == 1:
        rows = [run_one(fn) for fn in tasks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as ex:
            rows = list(ex.map(run_one, tasks))
    write_report(rows, config)
    n_bad = sum(r["status"] != "pass" for r in rows)
    print(f"{len(rows)} rows, {len(rows) - n_bad} pass, {n_bad} fail "
          f"-> {config.out}")
    return 0 if n_bad == 0 else 1


def cmd_constants(d_K: int, k_list: list[int]) -> int:
    F = build_field(d_K)
    spec = recipe.zetaK_spec(F)
    L1 = l_one_chi(F)
    print(f"d_K={d_K}  L(1,chi)={L1:.10f}")
    print("k  a(k)            a_L(k)          g(k)  g_L(k)  "
          "mertens(1e3)/pred")
    mert = (constants.mertens_ideal(F, 1000.0)
            / constants.mertens_predicted(F, 1000.0))
    for k in k_list:
        if k == 0:
            print("0  1               1               1     1       1")
            continue
        a = constants.a_k_quadratic(float(k), F)
        aL = recipe.a_L_constant(spec, k)
        print(f"{k}  {a.value:<15.10g} {aL.value:<15.10g} "
              f"{g_of_k(k):<5d} {recipe.gl_multinomial(spec, k):<7d} "
              f"{mert:.6f}")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def _env(name: str) -> str | None:
    return os.environ.get(f"DEDM_{name}")


def _resolve(flag_val, env_name, cast, default):
    if flag_val is not None:
        return flag_val
    raw = _env(env_name)
    if raw is not None:
        return cast(raw)
    return default


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(","))


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(","))


def _strs(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(","))


def _bool(s: str) -> bool:
    return s.lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dedm")
    sub = ap.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeros", help="build/refresh the zero caches")
    z.add_argument("--dk", type=int, default=None)
    z.add_argument("--tmax", type=float, default=None)
    z.add_argument("--step", type=float, default=None)
    z.add_argument("--cache-dir", default=None)

    r = sub.add_parser("run", help="run a check panel and write a report")
    r.add_argument("--config", default=None,
                   help="JSON file with ExperimentConfig fields")
    r.add_argument("--dk", type=int, default=None)
    r.add_argument("--tmax", type=_floats, default=None,
                   help="comma-separated T list")
    r.add_argument("--X", type=_floats, default=None)
    r.add_argument("--k", type=_ints, default=None)
    r.add_argument("--grid-step", type=float, default=None)
    r.add_argument("--cache-dir", default=None)
    r.add_argument("--out", default=None)
    r.add_argument("--format", choices=("csv", "json"), default=None)
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--deterministic", action="store_const", const=True,
                   default=None)
    r.add_argument("--checks", type=_strs, default=None)

    c = sub.add_parser("constants", help="print the constants table")
    c.add_argument("--dk", type=int, default=None)
    c.add_argument("--k", type=_ints, default=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "zeros":
            return cmd_zeros(
                _resolve(args.dk, "DK", int, -4),
                _resolve(args.tmax, "TMAX", float, 500.0),
                _resolve(args.step, "STEP", float, None),
                _resolve(args.cache_dir, "CACHE_DIR", str, ".zero-cache"))
        if args.command == "constants":
            return cmd_constants(
                _resolve(args.dk, "DK", int, -4),
                list(_resolve(args.k, "K", _ints, (0, 1, 2))))
        base = ExperimentConfig()
        if args.config is not None:
            with open(args.config) as fh:
                base = config_from_json(fh.read())
        config = replace(
            base,
            d_K=_resolve(args.dk, "DK", int, base.d_K),
            T=_resolve(args.tmax, "TMAX", _floats, base.T),
            X=_resolve(args.X, "X", _floats, base.X),
            k=_resolve(args.k, "K", _ints, base.k),
            grid_step=_resolve(args.grid_step, "GRID_STEP", float,
                               base.grid_step),
            cache_dir=_resolve(args.cache_dir, "CACHE_DIR", str,
                               base.cache_dir),
            out=_resolve(args.out, "OUT", str, base.out),
            format=_resolve(args.format, "FORMAT", str, base.format),
            workers=_resolve(args.workers, "WORKERS", int, base.workers),
            deterministic=_resolve(args.deterministic, "DETERMINISTIC",
                                   _bool, base.deterministic),
            checks=_resolve(args.checks, "CHECKS", _strs, base.checks))
        return cmd_run(config)
    except (ValueError, OSError) as e:
        print(f"dedm: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

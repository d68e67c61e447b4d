import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dedm import gridval, lfun
from dedm.fields import build_field


def _mp_lchi(s, F):
    with mpmath.workdps(25):
        val = mpmath.mpc(F.q) ** (-s) * mpmath.fsum(
            F.chi(a) * mpmath.zeta(s, mpmath.mpf(a) / F.q)
            for a in range(1, F.q + 1) if math.gcd(a, F.q) == 1)
    return complex(val)


def test_zeta_eval_oracles():
    assert abs(lfun.zeta_eval(2.0) - math.pi ** 2 / 6) < 1e-12
    assert abs(lfun.zeta_eval(0.0) + 0.5) < 1e-12
    assert abs(lfun.zeta_eval(0.5 + 14.134725142j)) < 1e-6


def test_zeta_eval_vs_mpmath_strip():
    rng = random.Random(11)
    for _ in range(25):
        s = complex(rng.uniform(0.05, 2.5), rng.uniform(-100, 100))
        ref = complex(mpmath.zeta(s))
        assert abs(lfun.zeta_eval(s) - ref) <= 1e-10 * abs(ref)


def test_lchi_eval_oracles(F4):
    assert abs(lfun.lchi_eval(1.0, F4) - math.pi / 4) < 1e-12
    assert abs(lfun.lchi_eval(0.0, F4) - 0.5) < 1e-12
    # real on the real axis
    assert abs(lfun.lchi_eval(1.7, F4).imag) < 1e-13


def test_lchi_eval_vs_mpmath(F4):
    F5 = build_field(5)
    rng = random.Random(12)
    for F in (F4, F5):
        for _ in range(15):
            s = complex(rng.uniform(0.1, 2.5), rng.uniform(-80, 80))
            ref = _mp_lchi(s, F)
            assert abs(lfun.lchi_eval(s, F) - ref) <= 1e-10 * max(abs(ref), 1e-4)


def test_zetaK_eval_product_and_residue(F4):
    s = 2.0
    ref = lfun.zeta_eval(s) * lfun.lchi_eval(s, F4)
    assert lfun.zetaK_eval(s, F4) == ref
    with mpmath.workdps(25):
        oracle = complex(mpmath.zeta(2)) * _mp_lchi(2.0, F4)
    assert abs(ref - oracle) < 1e-10
    near = 1.0 + 1e-6
    assert abs((near - 1.0) * lfun.zetaK_eval(near, F4) - math.pi / 4) < 1e-5


def test_zetaK_conjugate_symmetry(F4):
    for s in (0.5 + 3.3j, 1.2 - 7.0j, 0.75 + 40.0j):
        a = lfun.zetaK_eval(np.conj(s), F4)
        b = np.conj(lfun.zetaK_eval(s, F4))
        assert abs(a - b) <= 1e-12 * abs(b)


def test_functional_equation_residuals(F4):
    rng = random.Random(13)
    for c in (lfun.zeta_component(F4), lfun.lchi_component(F4)):
        for _ in range(15):
            s = complex(rng.uniform(0.2, 0.8), rng.uniform(-100, 100))
            assert lfun.fe_residual(s, c) <= 1e-8


def test_hardy_rotation_real_on_line(F4):
    cz = lfun.zeta_component(F4)
    cl = lfun.lchi_component(F4)
    rot0 = lfun.hardy_rotation(0.0, cz) * lfun.zeta_eval(0.5)
    assert abs(rot0.real + 1.4603545) < 1e-6
    for t, c in ((20.0, cz), (10.0, cl), (333.0, cz), (250.5, cl)):
        s = 0.5 + 1j * t
        v = lfun.zeta_eval(s) if c.kind == "zeta" else lfun.lchi_eval(s, F4)
        rotated = lfun.hardy_rotation(t, c) * v
        assert abs(rotated.imag) <= 1e-9 * max(1.0, abs(rotated))


def test_find_zeros_small_tables(F4):
    tz = lfun.find_zeros(lfun.zeta_component(F4), 30.0)
    assert tz.ordinates.size == 3
    assert abs(tz.ordinates[0] - 14.134725) < 1e-5
    tl = lfun.find_zeros(lfun.lchi_component(F4), 10.0)
    assert abs(tl.ordinates[0] - 6.0209489) < 1e-4
    empty = lfun.find_zeros(lfun.zeta_component(F4), 5.0)
    assert empty.ordinates.size == 0


def test_find_zeros_rejects_coarse_step(F4):
    with pytest.raises(ValueError, match="too coarse"):
        lfun.find_zeros(lfun.zeta_component(F4), 100.0, step=1.0)


def test_zero_counts_match_density(zero_tables):
    for table in zero_tables:
        for t in (50.0, 100.0, 500.0):
            n = int((table.ordinates <= t).sum())
            expected = lfun.expected_zero_count(table.component, t)
            assert abs(n - expected) <= 2.0


def test_stored_ordinates_are_bracketed_zeros(F4, zero_tables):
    rng = random.Random(14)
    for table in zero_tables:
        o = table.ordinates
        pick = list(o[:20]) + [o[rng.randrange(o.size)] for _ in range(20)]
        c = table.component
        h = table.resolution
        for g in pick:
            vals = []
            for t in (g - h, g, g + h):
                s = 0.5 + 1j * t
                v = (lfun.zeta_eval(s) if c.kind == "zeta"
                     else lfun.lchi_eval(s, c.F))
                vals.append((lfun.hardy_rotation(t, c) * v).real)
            assert abs(vals[1]) <= 1e-7 * max(1.0, abs(vals[0]), abs(vals[2]))
            assert vals[0] * vals[2] < 0


def test_zero_density_expected_values(F4):
    cz = lfun.zeta_component(F4)
    cl = lfun.lchi_component(F4)
    t = 2 * math.pi * math.e
    assert abs(lfun.zero_density_expected(cz, t) - 1 / math.pi) < 1e-12
    assert abs(lfun.zero_density_expected(cl, 100.0)
               - math.log(400 / (2 * math.pi)) / math.pi) < 1e-12


def test_merged_zeros_union(F4):
    m10 = lfun.merged_zeros(F4, 10.0)
    assert m10.ordinates.size == 1 and abs(m10.ordinates[0] - 6.02) < 0.01
    m15 = lfun.merged_zeros(F4, 15.0)
    assert any(abs(m15.ordinates - 14.1347) < 1e-3)
    assert any(abs(m15.ordinates - 6.0209) < 1e-3)
    tz = lfun.find_zeros(lfun.zeta_component(F4), 15.0)
    tl = lfun.find_zeros(lfun.lchi_component(F4), 15.0)
    assert m15.ordinates.size == tz.ordinates.size + tl.ordinates.size


def test_zero_table_save_load_roundtrip(F4, tmp_path):
    table = lfun.find_zeros(lfun.lchi_component(F4), 30.0)
    path = str(tmp_path / "zc.txt")
    lfun.save_zero_table(table, path)
    back = lfun.load_zero_table(path)
    assert back.t_max == table.t_max
    assert np.max(np.abs(back.ordinates - table.ordinates)) < 1e-11


def test_ensure_zero_cache_idempotent(F4, tmp_path):
    d = str(tmp_path)
    t1 = lfun.ensure_zero_cache(F4, 40.0, d)
    files = sorted(p.name for p in tmp_path.iterdir())
    blobs = [p.read_bytes() for p in sorted(tmp_path.iterdir())]
    t2 = lfun.ensure_zero_cache(F4, 40.0, d)
    assert sorted(p.name for p in tmp_path.iterdir()) == files
    assert [p.read_bytes() for p in sorted(tmp_path.iterdir())] == blobs
    assert np.allclose(t1[0].ordinates, t2[0].ordinates, atol=1e-10)
    # a shallower request reuses the deeper cache without rescanning
    t3 = lfun.ensure_zero_cache(F4, 20.0, d)
    assert t3[0].t_max >= 40.0


def test_grid_values_match_point_evaluators(F4):
    grid = gridval.critical_grid(F4, 1000.0, 1000.5, 0.05)
    for i in (0, 3, 7):
        s = 0.5 + 1j * float(grid.t[i])
        assert abs(grid.zeta[i] - lfun.zeta_eval(s)) < 1e-8
        assert abs(grid.lchi[i] - lfun.lchi_eval(s, F4)) < 1e-8


def test_series_point_matches_mpmath(F4):
    for s in (1.5 + 2.0j, 2.0, 1.2 - 10.0j):
        assert abs(gridval.series_point(s) - complex(mpmath.zeta(s))) < 1e-10


@given(st.floats(0.2, 0.8), st.floats(-60, 60))
@settings(max_examples=30, deadline=None)
def test_fe_residual_property(sigma, t):
    F = build_field(-4)
    c = lfun.lchi_component(F)
    assert lfun.fe_residual(complex(sigma, t), c) <= 1e-8

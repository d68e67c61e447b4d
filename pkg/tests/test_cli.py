import json
import os

import pytest

from dedm import cli

CACHE = os.path.join(os.path.dirname(__file__), os.pardir, ".zero-cache")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith("DEDM_"):
            monkeypatch.delenv(name)


def test_config_from_json_coercion():
    cfg = cli.config_from_json(
        '{"T": [200.0, 400.0], "k": [0, 1], "workers": 2, "ignored": 5}')
    assert cfg.T == (200.0, 400.0)
    assert cfg.k == (0, 1)
    assert cfg.workers == 2
    assert cfg.X == cli.ExperimentConfig().X


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        cli.ExperimentConfig(T=())
    with pytest.raises(ValueError):
        cli.ExperimentConfig(format="yaml")
    with pytest.raises(ValueError):
        cli.ExperimentConfig(workers=0)
    with pytest.raises(ValueError, match="unknown check"):
        cli.ExperimentConfig(checks=("moment", "bogus"))


def test_render_report_csv_and_json():
    rows = [cli._row("moment", -4, 200.0, 10.0, 1, 1.234567890123,
                     "[0.5..2]", "pass", "n=3, detail")]
    csv = cli.render_report(rows, "csv")
    lines = csv.strip().split("\n")
    assert lines[0] == cli.CSV_HEADER
    # commas in free text are sanitized so split(",") stays aligned
    assert lines[1] == "moment,-4,200,10,1,1.23456789,[0.5..2],pass,n=3; detail"
    back = json.loads(cli.render_report(rows, "json"))
    assert back == rows


def test_cmd_zeros_roundtrip(tmp_path, capsys):
    d = str(tmp_path)
    assert cli.main(["zeros", "--tmax", "30", "--cache-dir", d]) == 0
    out = capsys.readouterr().out
    assert "zeta: 3 zeros to t=30" in out
    assert "Lchi:" in out
    names = sorted(p.name for p in tmp_path.iterdir())
    assert len(names) == 2
    # idempotent: rerun leaves the cache untouched
    blobs = [p.read_bytes() for p in sorted(tmp_path.iterdir())]
    assert cli.main(["zeros", "--tmax", "30", "--cache-dir", d]) == 0
    assert [p.read_bytes() for p in sorted(tmp_path.iterdir())] == blobs


def test_cmd_zeros_rejects_coarse_step(tmp_path, capsys):
    rc = cli.main(["zeros", "--tmax", "100", "--step", "1.0",
                   "--cache-dir", str(tmp_path)])
    assert rc == 2
    assert "dedm zeros:" in capsys.readouterr().err


def _run(tmp_path, name, extra):
    out = str(tmp_path / name)
    rc = cli.main(["run", "--tmax", "200", "--X", "10", "--k", "1",
                   "--cache-dir", CACHE, "--out", out] + extra)
    return rc, out


def test_cmd_run_moment_report(tmp_path, capsys):
    rc, out = _run(tmp_path, "r.csv", ["--checks", "moment"])
    text = open(out).read()
    lines = text.strip().split("\n")
    assert lines[0] == cli.CSV_HEADER
    assert len(lines) == 2
    fields = lines[1].split(",")
    assert fields[0] == "moment" and fields[1] == "-4"
    assert fields[7] in ("pass", "fail")
    assert rc == (0 if fields[7] == "pass" else 1)
    # the JSON mirror carries the same stringified rows
    mirror = json.loads(open(str(tmp_path / "r.json")).read())
    assert [",".join(r[c] for c in cli.CSV_HEADER.split(","))
            for r in mirror] == lines[1:]
    assert "1 rows" in capsys.readouterr().out


def test_cmd_run_deterministic_bytes(tmp_path):
    _run(tmp_path, "a.csv", ["--checks", "moment,theorem2"])
    _run(tmp_path, "b.csv", ["--checks", "moment,theorem2"])
    assert open(str(tmp_path / "a.csv"), "rb").read() == \
        open(str(tmp_path / "b.csv"), "rb").read()


def test_cmd_run_workers_preserve_order(tmp_path):
    _run(tmp_path, "w1.csv", ["--checks", "moment,theorem2"])
    _run(tmp_path, "w2.csv", ["--checks", "moment,theorem2",
                              "--workers", "2"])
    assert open(str(tmp_path / "w1.csv")).read() == \
        open(str(tmp_path / "w2.csv")).read()


def test_cmd_run_json_format(tmp_path):
    out = str(tmp_path / "rep.json")
    cli.main(["run", "--tmax", "200", "--X", "10", "--k", "0",
              "--checks", "moment", "--format", "json",
              "--cache-dir", CACHE, "--out", out])
    rows = json.loads(open(out).read())
    assert rows[0]["check"] == "moment"
    assert rows[0]["value"] == "1"  # k = 0 moment is exactly one
    assert os.path.exists(str(tmp_path / "rep.csv"))


def test_cmd_run_error_rows_fail_exit(tmp_path):
    # X far above the admissible 1.2 log^2 T regime: error row, exit 1
    out = str(tmp_path / "err.csv")
    rc = cli.main(["run", "--tmax", "200", "--X", "100", "--k", "1",
                   "--checks", "theorem2", "--cache-dir", CACHE,
                   "--out", out])
    assert rc == 1
    line = open(out).read().strip().split("\n")[1]
    assert ",error," in line and "X exceeds" in line


def test_cmd_run_unknown_check_usage_error(tmp_path, capsys):
    rc = cli.main(["run", "--checks", "bogus",
                   "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "dedm:" in capsys.readouterr().err


def test_cmd_run_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"T": [200.0], "X": [10.0], "k": [0],
                               "checks": ["moment"],
                               "cache_dir": CACHE,
                               "out": str(tmp_path / "c1.csv")}))
    rc = cli.main(["run", "--config", str(cfg),
                   "--out", str(tmp_path / "c2.csv")])
    assert rc == 0
    assert os.path.exists(str(tmp_path / "c2.csv"))
    assert not os.path.exists(str(tmp_path / "c1.csv"))


def test_cmd_constants_table(capsys):
    assert cli.main(["constants", "--k", "0,1"]) == 0
    out = capsys.readouterr().out
    assert "L(1,chi)=0.7853981634" in out
    lines = out.strip().split("\n")
    assert lines[2].startswith("0  1")
    assert lines[3].startswith("1  0.405284")  # a(1) = (6/pi^2)/1.5


def test_env_overrides(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DEDM_K", "0")
    assert cli.main(["constants"]) == 0
    out = capsys.readouterr().out
    assert "0  1" in out and "\n1  " not in out
    # flag still beats the environment
    monkeypatch.setenv("DEDM_TMAX", "not-a-number")
    rc = cli.main(["run", "--tmax", "200", "--X", "10", "--k", "0",
                   "--checks", "moment", "--cache-dir", CACHE,
                   "--out", str(tmp_path / "e.csv")])
    assert rc == 0

import csv
import datetime as dt
import json
import math

import pytest

from firmdyn.cli import main
from firmdyn.stability import THEORIES

SUBCOMMANDS = {
    "bifurcate": ["--lmin", "--lmax", "--grid", "--transient", "--samples", "--out", "--config"],
    "lyapunov": ["--lambda", "--range", "--method", "--n", "--delta0", "--renorm-interval"],
    "forcing": ["--source", "--years", "--dt", "--out"],
    "stability": ["--metrics", "--lambdas", "--horizon", "--x0"],
    "reproduce": ["--outdir", "--grid"],
}


def cli(*argv):
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in argv])
    return exc.value.code


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture(autouse=True)
def no_env_config(monkeypatch):
    monkeypatch.delenv("FIRMDYN_CONFIG", raising=False)


def test_bifurcate_writes_diagram_and_summary(tmp_path):
    out = tmp_path / "bif"
    assert cli("bifurcate", "--lmin", 2.8, "--lmax", 3.57, "--grid", 800, "--samples", 50, "--out", out) == 0
    table = rows(f"{out}.csv")
    assert table[0] == ["lambda", "x"]
    assert len(table) == 1 + 800 * 50
    summary = json.loads((tmp_path / "bif.summary.json").read_text())
    pts = summary["doubling_points"]
    assert pts[0] == pytest.approx(3.0, abs=1e-3)
    assert pts[1] == pytest.approx(1 + math.sqrt(6), abs=1e-3)
    assert summary["accumulation_estimate"] == pytest.approx(3.5699, abs=3e-3)


def test_bifurcate_density(tmp_path):
    out = tmp_path / "d"
    assert cli("bifurcate", "--lmin", 3.6, "--lmax", 4, "--grid", 10, "--samples", 100,
               "--density-bins", 20, "--out", out) == 0
    table = rows(f"{out}.density.csv")
    assert table[0] == ["lambda", "bin_lo", "bin_hi", "count"]
    totals = {}
    for lam, _, _, count in table[1:]:
        totals[lam] = totals.get(lam, 0) + int(count)
    assert len(totals) == 10
    assert set(totals.values()) == {100}


def test_bifurcate_reports_window_crisis(tmp_path):
    out = tmp_path / "w"
    assert cli("bifurcate", "--lmin", 3.84, "--lmax", 3.87, "--grid", 600, "--out", out) == 0
    (crisis,) = json.loads((tmp_path / "w.summary.json").read_text())["crises"]
    assert crisis["lambda"] == pytest.approx(3.8568, abs=1e-3)
    assert crisis["ratio"] > 1.5


@pytest.mark.parametrize("argv", [["--lmin", 4.5], ["--lmin", 3.5, "--lmax", 3.0], ["--grid", 1]])
def test_bifurcate_invalid_range_is_usage_error(tmp_path, argv, capsys):
    assert cli("bifurcate", *argv, "--out", tmp_path / "x") == 2
    assert "error" in capsys.readouterr().err
    assert not (tmp_path / "x.csv").exists()


def test_lyapunov_table(capsys):
    assert cli("lyapunov", "--lambda", 4.0, "--lambda", 2.5, "--lambda", 3.0, "--n", 100000) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "lambda,exponent,method,classification"
    table = {float(r[0]): (float(r[1]), r[3]) for r in csv.reader(lines[1:])}
    assert table[4.0][0] == pytest.approx(math.log(2), abs=1e-2)
    assert table[4.0][1] == "chaotic"
    assert table[2.5][0] == pytest.approx(-math.log(2), abs=1e-3)
    assert table[2.5][1] == "stable"
    assert table[3.0][1] == "marginal"


def test_lyapunov_both_methods(tmp_path):
    out = tmp_path / "l.csv"
    assert cli("lyapunov", "--range", 3.8, 4.0, 3, "--method", "both", "--n", 20000, "--out", out) == 0
    body = rows(out)[1:]
    assert len(body) == 6
    assert {r[2] for r in body} == {"derivative_average", "trajectory_separation"}


def test_lyapunov_bad_parameter():
    assert cli("lyapunov", "--lambda", 5) == 2
    assert cli("lyapunov", "--lambda", 3.9, "--delta0", 0.1) == 2


def test_lyapunov_needs_a_parameter():
    assert cli("lyapunov") == 2


def test_forcing_trace(tmp_path):
    out = tmp_path / "f.csv"
    assert cli("forcing", "--years", 60, "--dt", 0.5, "--out", out) == 0
    table = rows(out)
    assert table[0] == ["t", "amplitude", "lambda"]
    assert len(table) == 1 + 121
    lams = [float(r[2]) for r in table[1:]]
    assert all(2.5 <= lam <= 4.0 for lam in lams)
    assert min(lams) == 2.5  # negative amplitudes clamp to the floor


def test_forcing_risk_defaults_are_flat(capsys):
    assert cli("forcing", "--source", "risk", "--years", 2) == 0
    body = capsys.readouterr().out.splitlines()[1:]
    assert {line.split(",")[2] for line in body} == {"2.5"}


def test_stability_all_stable(capsys):
    assert cli("stability", "--lambdas", "2.5x8") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["firm_stable"] is True
    assert report["total_stability"] == pytest.approx(8 * math.log(2), abs=1e-2)


def test_stability_one_chaotic_channel(capsys):
    assert cli("stability", "--lambdas", "2.5x7", "3.9") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["firm_stable"] is False
    assert sum(1 for p in report["pairwise"] if not p["stable"]) == 7


def _metrics_file(tmp_path, wild):
    lines = ["date,theory,value"]
    start = dt.date(2000, 1, 1)
    for theory in THEORIES:
        a = 1.0 if theory == wild else 0.001
        for k in range(400):
            v = 10 + a * math.sin(2 * math.pi * k / 8)
            lines.append(f"{start + dt.timedelta(days=k)},{theory},{v!r}")
    p = tmp_path / "metrics.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_stability_from_metrics(tmp_path, capsys):
    assert cli("stability", "--metrics", _metrics_file(tmp_path, "behavioural")) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["firm_stable"] is False
    by_theory = {c["theory"]: c for c in report["channels"]}
    assert by_theory["behavioural"]["lambda"] >= 3.9
    assert by_theory["managerial"]["classification"] == "stable"


def test_stability_missing_theory(tmp_path):
    p = _metrics_file(tmp_path, "behavioural")
    kept = [line for line in p.read_text().splitlines() if ",environment," not in line]
    p.write_text("\n".join(kept) + "\n")
    assert cli("stability", "--metrics", p) == 2


def test_stability_unknown_theory_in_file(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("date,theory,value\n2020-01-01,marketing,1\n")
    assert cli("stability", "--metrics", p) == 2


def test_stability_wrong_count():
    assert cli("stability", "--lambdas", "2.5x7") == 2


@pytest.mark.parametrize("name, flags", SUBCOMMANDS.items())
def test_help_lists_flags(name, flags, capsys):
    assert cli(name, "--help") == 0
    text = capsys.readouterr().out
    for flag in flags:
        assert flag in text


def test_unknown_flag_and_command():
    assert cli("forcing", "--frobnicate") == 2
    assert cli("plot") == 2
    assert cli() == 2


def test_config_file_applies(tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[calibration]\nlambda_min = 3.0\n[forcing]\nsource = risk\n")
    assert cli("forcing", "--config", cfg, "--years", 1) == 0
    body = capsys.readouterr().out.splitlines()[1:]
    assert {line.split(",")[2] for line in body} == {"3"}


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[bifurcation]\ngird = 3\n")
    assert cli("forcing", "--config", cfg) == 2


def test_reruns_are_byte_identical(tmp_path):
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        assert cli("bifurcate", "--lmin", 3.4, "--lmax", 4, "--grid", 60, "--out", d / "bif") == 0
        assert cli("lyapunov", "--range", 3.5, 4, 5, "--method", "both", "--n", 5000, "--out", d / "l.csv") == 0
        assert cli("stability", "--lambdas", "2.5x7", "3.9", "--n", 5000, "--out", d / "s.json") == 0
        assert cli("reproduce", "--outdir", d / "rep", "--grid", 40) == 0
    a_files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    b_files = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    assert a_files == b_files
    assert len(a_files) == 4 + 3 * 3
    for rel in a_files:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel

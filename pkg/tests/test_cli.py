import csv
import io
import json
import sys

import numpy as np
import pytest

from arcwalk.cli import main
from arcwalk.density import arcsine_cdf
from arcwalk.gof import ks_statistic


def run(capsys, args, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def column(text, name):
    return np.array([float(row[name]) for row in csv.DictReader(io.StringIO(text))])


def test_simulate_is_deterministic(capsys):
    args = ["simulate", "--variant", "x", "--x0", "0.3", "--steps", "50", "--seed", "9"]
    _, first = run(capsys, args)
    _, second = run(capsys, args)
    assert first == second
    assert first.splitlines()[0] == "x"
    assert len(first.splitlines()) == 51


def test_simulate_p_one_is_uniform(capsys):
    code, out = run(capsys, ["simulate", "--variant", "p", "--p", "1", "--x0", "0.5",
                             "--steps", "4000", "--seed", "3"])
    assert code == 0
    xs = column(out, "x")
    assert ks_statistic(xs, lambda s: s) < 0.03


def test_simulate_pipes_into_verify(capsys, monkeypatch):
    _, out = run(capsys, ["simulate", "--variant", "x", "--x0", "0.3", "--steps", "20000",
                          "--burn-in", "500", "--thin", "5", "--seed", "4"])
    code, report = run(capsys, ["verify-stationary", "--p", "0", "--mode", "montecarlo",
                                "--input", "-", "--tol", "0.03"], stdin=out, monkeypatch=monkeypatch)
    data = json.loads(report)
    assert code == 0
    assert set(data) == {"command", "params", "result"}
    assert data["result"]["pass"] is True


def test_verify_quadrature(capsys):
    code, out = run(capsys, ["verify-stationary", "--p", "2", "--mode", "quadrature",
                             "--grid", "33"])
    assert code == 0
    assert json.loads(out)["result"]["pass"] is True


def test_zp_table_values(capsys):
    code, out = run(capsys, ["zp-table", "--p-list", "1,2"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["z_p"]) == pytest.approx(2.0, abs=1e-12)
    assert float(rows[1]["z_p"]) == pytest.approx(1.7627472, abs=1e-7)


def test_zp_table_range_is_inclusive_and_decreasing(capsys):
    _, out = run(capsys, ["zp-table", "--p-range", "0.5:5:0.5"])
    z = column(out, "z_p")
    assert len(z) == 10
    assert np.all(np.diff(z) < 0)


def test_lq_check_exit_codes(capsys):
    code, out = run(capsys, ["lq-check", "--q", "2", "--x-grid", "5"])
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "Minimum"

    code, out = run(capsys, ["lq-check", "--q", "0.5", "--x-grid", "5"])
    assert code == 0
    assert json.loads(out)["result"]["verdict"] == "Inflection"

    code, out = run(capsys, ["lq-check", "--q", "2", "--p", "0", "--x-grid", "3"])
    assert code == 1
    assert json.loads(out)["result"]["sup_abs_derivative"] == pytest.approx(0.25, abs=1e-9)


def test_absorb_report(capsys):
    code, out = run(capsys, ["absorb", "--p", "-1", "--x0", "0.3", "--runs", "400",
                             "--seed", "1"])
    result = json.loads(out)["result"]
    assert code == 0
    assert result["formula"] == pytest.approx(0.3)
    assert result["at_one"] + result["at_zero"] + result["undecided"] == 400


def test_usage_errors_exit_two(capsys):
    assert main(["absorb", "--p", "0.5", "--x0", "0.3", "--runs", "10", "--seed", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--variant", "bogus"])
    assert exc.value.code == 2
    assert main(["zp-table", "--p-list", "0,1"]) == 2
    capsys.readouterr()


def test_brownian_writes_csv(capsys, tmp_path):
    target = tmp_path / "occ.csv"
    code, out = run(capsys, ["brownian", "--what", "occupation", "--n", "64", "--samples",
                             "500", "--seed", "1", "--threshold", "0.2", "--out", str(target)])
    assert code == 0
    report = json.loads(out)["result"]
    assert report["test"] == "KS" and report["pass"] is True
    values = np.loadtxt(target, delimiter=",", skiprows=1, ndmin=2)[:, -1]
    assert values.shape == (500,)
    assert ks_statistic(values, arcsine_cdf) == pytest.approx(report["statistic"])


@pytest.mark.parametrize("args", [
    ["simulate", "--variant", "x", "--x0", "0.3", "--steps", "200", "--seed", "1"],
    ["zp-table", "--p-list", "0.5,1,2"],
    ["lq-check", "--q", "2", "--x-grid", "3"],
    ["brownian", "--what", "lastzero", "--n", "64", "--samples", "200", "--seed", "1",
     "--threshold", "0.5"],
])
def test_figures_are_written(capsys, tmp_path, args):
    pytest.importorskip("matplotlib")
    target = tmp_path / "fig.png"
    main(args + ["--figure", str(target)])
    capsys.readouterr()
    assert target.exists() and target.stat().st_size > 0

import csv
import json

import numpy as np
import pytest

from lacsphere import gridio
from lacsphere.cli import main
from lacsphere.operators import GridFunction


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ramanujan_moment_report(capsys):
    code, out, _ = run(capsys, "ramanujan-moment", "--Q", "8", "--j", "2", "--M", "128")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["result"]["parameters"] == {"Q": 8, "j": 2, "M": 128}
    assert doc["result"]["value"] > 0
    assert doc["config"]["Q"] == 8


def test_counts_zero(capsys):
    code, out, _ = run(capsys, "counts", "--d", "5", "--n-max", "0")
    assert code == 0 and json.loads(out)["result"]["counts"] == [1]


def test_malformed_flag(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, err = run(capsys, "--out", str(target), "counts", "--d", "five", "--n-max", "3")
    assert code == 2 and out == ""
    assert json.loads(err)["error"]["exit_code"] == 2
    assert not target.exists()


def test_domain_and_budget_exit_codes(capsys, monkeypatch):
    code, _, err = run(capsys, "arith", "--n", "0")
    assert code == 2
    code, _, err = run(capsys, "--budget", "10", "ramanujan-moment", "--Q", "64")
    assert code == 3 and json.loads(err)["error"]["type"] == "BudgetError"
    monkeypatch.setenv("LACSPHERE_WORK_BUDGET", "10")
    code, _, _ = run(capsys, "ramanujan-moment", "--Q", "64")
    assert code == 3


def test_numerical_integrity_exit_code(capsys, monkeypatch):
    from lacsphere import gauss
    from lacsphere.errors import PrecisionError

    def boom(*a, **k):
        raise PrecisionError("tail too large")

    monkeypatch.setattr(gauss, "u_kernel_l1", boom)
    code, _, err = run(capsys, "u-l1", "--Q", "2")
    assert code == 4


def test_deterministic_output_and_timing_sidecar(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(capsys, "--out", str(p), "--seed", "3", "pairing", "--M", "8", "--trials", "4")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    timing = json.loads((tmp_path / "a.json.timing.json").read_text())
    assert timing["wall_seconds"] >= 0
    assert "wall" not in a.read_text()


def test_sweep_synthetic_and_csv(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "sweep", "--target", "synthetic", "--values", "1", "2", "4", "8", "--csv", str(path))
    assert code == 0
    fit = json.loads(out)["result"]["fit"]
    assert fit["slope"] == pytest.approx(3.0, abs=1e-9)
    rows = list(csv.reader(path.open()))
    assert rows[0][:4] == ["index", "value", "x", "y"] and len(rows) == 5


def test_sweep_counts_parallel(capsys):
    argv = ["sweep", "--target", "counts", "--values", "100", "400", "1600", "6400"]
    c1, o1, _ = run(capsys, *argv)
    c2, o2, _ = run(capsys, *argv, "--jobs", "2")
    r1, r2 = json.loads(o1)["result"], json.loads(o2)["result"]
    assert r1["points"] == r2["points"]
    assert abs(r1["fit"]["slope"] - 3) < 0.3


def test_sweep_needs_three_points(capsys):
    code, _, _ = run(capsys, "sweep", "--target", "synthetic", "--values", "1", "2")
    assert code == 2


def test_sweep_rejects_nonpositive(capsys):
    code, _, _ = run(capsys, "sweep", "--target", "synthetic", "--values", "0", "1", "2")
    assert code == 2


@pytest.mark.parametrize("suite", ["empty", "dual-sum", "gauss-identities", "ramanujan", "operators", "composite"])
def test_verify_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    doc = json.loads(out)
    assert code == 0 and doc["result"]["passed"]
    if suite == "empty":
        assert doc["result"]["checks"] == []


def test_verify_unknown_suite(capsys):
    code, _, err = run(capsys, "verify", "nope")
    assert code == 2


def test_average_with_grid_files(capsys, tmp_path):
    src, dst = tmp_path / "f.bin", tmp_path / "g.json"
    gridio.save(GridFunction.delta(5, 8), src)
    code, out, _ = run(capsys, "average", "--input", str(src), "--output", str(dst), "--lambda-sq", "1", "--method", "exact")
    assert code == 0
    g = gridio.load(dst)
    assert np.count_nonzero(g.values) == 10 and g.values.max() == 0.1


@pytest.mark.parametrize(
    "argv",
    [
        ["arith", "--n", "360"],
        ["ramanujan", "--q", "12", "--n", "8", "--check"],
        ["lcm-moment", "--Q", "4"],
        ["gcd-period", "--q", "2", "3"],
        ["sphere", "--d", "5", "--lambda-sq", "2"],
        ["annulus", "--d", "5", "--lam", "20", "--M", "4"],
        ["sequence", "--kind", "lacunary", "--values", "1", "2", "4"],
        ["congruence"],
        ["gauss", "--a", "1", "--l", "0", "0", "0", "0", "0", "--q", "3", "--check"],
        ["gauss-survey", "--q-max", "4"],
        ["dual-sum", "--Q", "3", "--mode", "direct"],
        ["bump", "--r", "0.4", "0.75", "1.1"],
        ["sphere-ft", "--xi", "0", "0.1", "--check"],
        ["decay-fit", "--hi", "30"],
        ["maximal", "--lambda-sq", "1", "2"],
        ["opnorm", "--M", "8", "--lambda-sq", "2"],
        ["caq", "--a", "1", "--q", "2", "--lambda-sq", "4", "--M", "8"],
        ["composite", "--Q", "2", "--lambda-sq", "4", "--M", "8"],
        ["k-kernel", "--lambda-sq", "64", "--N", "4"],
        ["m12", "--lambda-sq", "64", "--N", "2"],
        ["psi2", "--lambda-sq", "64", "--N", "2"],
        ["msw", "--q-max", "2", "--M", "8"],
        ["error-norm", "--lambda-sq", "4", "--M", "8"],
    ],
)
def test_subcommands_run(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    assert json.loads(out)["status"] == "ok"

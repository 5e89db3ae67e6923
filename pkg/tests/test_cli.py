"""Command-line parsing, exit codes and output formats."""

import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from appell.cli import (
    ASYMP_COLUMNS,
    COMPARE_COLUMNS,
    InputError,
    main,
    parse_complex,
    parse_config,
    parse_g,
)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_complex():
    assert parse_complex("0.3i") == 0.3j
    assert parse_complex("-1.5+0.2i") == complex(-1.5, 0.2)
    assert parse_complex("-i") == -1j
    assert parse_complex("2e-3-4j") == complex(2e-3, -4)
    for bad in ("", "1 + i", "(1+2j)", "abc"):
        with pytest.raises(InputError):
            parse_complex(bad)


def test_parse_g_forms():
    assert np.allclose(parse_g("-2,2,-1,1").coeffs, [-2, 2, -1, 1])
    assert np.allclose(parse_g("(x-1)(x^2+2)").coeffs, [-2, 2, -1, 1])
    assert np.allclose(parse_g("x^3 - x^2 + 2*x - 2").coeffs, [-2, 2, -1, 1])
    assert np.allclose(parse_g("2iz + 1").coeffs, [1, 2j])
    assert parse_g("Bernoulli").name == "bernoulli"
    for bad in ("x", "0,1", "x^y", "(x-1", "x ? 2", ""):
        with pytest.raises(InputError):
            parse_g(bad)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4).filter(lambda c: c[0] != 0))
def test_expression_and_list_agree(c):
    expr = " + ".join(f"({v})*x^{k}" for k, v in enumerate(c))
    assert np.allclose(parse_g(expr).coeffs, parse_g(",".join(map(str, c))).coeffs)


def test_config_round_trip():
    argv = ["compare", "--g", "(x-1)(x^2+2)", "--n", "5,10", "--points", "0.3+0.2i,-1.5",
            "--grid", "-1:1:3", "--grid-im", "-0.5:0.5:2", "--tol", "1e-9", "--format", "json"]
    cfg = parse_config(argv)
    assert cfg.n_list == (5, 10) and cfg.points == (0.3 + 0.2j, -1.5 + 0j)
    assert cfg.grid_re.lo == -1 and cfg.grid_im.steps == 2
    assert parse_config(cfg.to_argv()) == cfg
    assert len(cfg.x_values()) == 8


def test_compare_ok_and_tolerance_failure(capsys):
    code, out, _ = run(["compare", "--g", "bernoulli", "--n", "6,12", "--x", "0.3+0.2i,0.25i"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == COMPARE_COLUMNS and len(rows) == 4
    assert all(r["status"].startswith("ok") for r in rows)
    assert any("polylog" in r["status"] for r in rows)
    code, _, _ = run(["compare", "--g", "z-2", "--n", "8", "--x", "0.7", "--tol", "1e-30"], capsys)
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["compare", "--g", "x", "--n", "5"],
    ["compare", "--g", "1,1", "--n", "0"],
    ["compare", "--g", "1,1", "--n", "5", "--x", "0"],
    ["compare", "--g", "1,1", "--n", "5", "--grid", "1:0:3"],
    ["attractor", "--g", "1,1", "--n", "500", "--output", "unused"],
    ["nonsense"],
    ["compare", "--n", "5"],
])
def test_invalid_input_exit_2(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_attractor_outputs(tmp_path, capsys):
    out = tmp_path / "att"
    code, _, _ = run(["attractor", "--g", "(x-1)(x^2+2)", "--n", "20", "--resolution", "200",
                      "--grid", "-1:1:11", "--output", str(out)], capsys)
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["arcs.csv", "attractor.gp", "points.csv", "regions.csv", "roots_n20.csv"]
    roots = list(csv.DictReader(open(out / "roots_n20.csv")))
    assert len(roots) == 20
    kinds = {r["kind"] for r in csv.DictReader(open(out / "points.csv"))}
    assert kinds == {"corner", "junction"}


def test_asymp_table(capsys):
    code, out, err = run(["asymp", "--g", "bernoulli", "--n", "20,40,80", "--x", "2", "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert list(rows[0]) == ASYMP_COLUMNS and len(rows) == 3
    assert -2.4 <= float(rows[0]["order_two_term"]) <= -1.6
    code, _, err = run(["asymp", "--g", "z-1", "--n", "10,20", "--x", "1"], capsys)
    assert code == 0 and "dominance boundary" in err


def test_gnuplot_format(capsys):
    code, out, _ = run(["compare", "--g", "1", "--n", "3", "--x", "0.5", "--format", "gnuplot"], capsys)
    assert code == 0 and out.startswith("# n x_re")


def test_deterministic_output_across_processes(tmp_path):
    argv = [sys.executable, "-m", "appell", "compare", "--g", "(x-1)(x^2+2)", "--n", "7,9",
            "--grid", "-1:1:3", "--grid-im", "0.2:0.6:2"]
    a = subprocess.run(argv, capture_output=True, check=True, env={"APPELL_THREADS": "1", "PATH": ""}).stdout
    b = subprocess.run(argv, capture_output=True, check=True, env={"APPELL_THREADS": "2", "PATH": ""}).stdout
    assert a == b and a.count(b"\n") == 1 + 2 * 6

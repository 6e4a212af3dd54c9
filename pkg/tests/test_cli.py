"""Command-line interface: subcommands, exit codes, and report shapes."""

import json

import numpy as np
import pytest

from nashatlas.cli import main

MP_TEXT = """players 2
strategies 2 2
payoff 1
1 -1
-1 1
payoff 2
-1 1
1 -1
"""

BOS_TEXT = """players 2
strategies 2 2
payoff 1
2 0
0 1
payoff 2
1 0
0 2
"""

ZERO_TEXT = """players 2
strategies 2 2
payoff 1
0 0
0 0
payoff 2
0 0
0 0
"""

DUP_ROW_TEXT = """players 2
strategies 2 2
payoff 1
1 2
1 2
payoff 2
3 4
5 6
"""


@pytest.fixture
def mp_file(tmp_path):
    path = tmp_path / "mp.game"
    path.write_text(MP_TEXT)
    return str(path)


@pytest.fixture
def bos_file(tmp_path):
    path = tmp_path / "bos.game"
    path.write_text(BOS_TEXT)
    return str(path)


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_text(mp_file, capsys):
    assert main(["solve", mp_file]) == 0
    out = capsys.readouterr().out
    assert "equilibria: 1" in out
    assert "0.5" in out
    assert "regular" in out


def test_solve_json_shape(mp_file, capsys):
    assert main(["solve", mp_file, "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"meta", "results", "warnings"}
    assert report["meta"]["command"] == "solve"
    assert report["results"]["count"] == 1
    eq = report["results"]["equilibria"][0]
    assert eq["point"] == [[0.5, 0.5], [0.5, 0.5]]
    # infinite margins serialize as null
    assert eq["margins"] == [None, None]
    assert eq["jacobian_verdict"] == "regular"
    assert report["warnings"] == []


def test_solve_exact_json_uses_fraction_strings(bos_file, capsys):
    assert main(["solve", bos_file, "--exact", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    points = [eq["point"] for eq in report["results"]["equilibria"]]
    assert [["2/3", "1/3"], ["1/3", "2/3"]] in points
    assert all(eq["exact"] for eq in report["results"]["equilibria"])


def test_solve_degenerate_exit_code(tmp_path, capsys):
    zero = _write(tmp_path, "zero.game", ZERO_TEXT)
    assert main(["solve", zero]) == 2
    out = capsys.readouterr().out
    assert "continuum" in out
    dup = _write(tmp_path, "dup.game", DUP_ROW_TEXT)
    assert main(["solve", dup, "--json"]) == 2
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["continuum"] is True
    assert report["results"]["continuum_witness"] is not None
    assert report["warnings"]


def test_solve_exact_rejects_three_players(tmp_path, capsys):
    text = (
        "players 3\nstrategies 2 2 2\n"
        + "payoff 1\n1 0 0 1 0 1 1 0\n"
        + "payoff 2\n1 0 0 1 0 1 1 0\n"
        + "payoff 3\n1 0 0 1 0 1 1 0\n"
    )
    path = _write(tmp_path, "three.game", text)
    assert main(["solve", path, "--exact"]) == 1
    assert "2-player" in capsys.readouterr().err


def test_solve_missing_file(capsys):
    assert main(["solve", "/nonexistent/game.txt"]) == 1
    assert "error" in capsys.readouterr().err


def test_solve_bad_file(tmp_path, capsys):
    path = _write(tmp_path, "bad.game", "players 2\nstrategies 2 2\npayoff 1\n1 x\n")
    assert main(["solve", path]) == 1
    assert "error" in capsys.readouterr().err


def test_lambda_output(mp_file, capsys):
    assert main(["lambda", mp_file, "--player", "1"]) == 0
    out = capsys.readouterr().out
    assert "kappa^1: const = 1, g2_1 = -2" in out
    assert "lambda^1_1: const = -2, g2_1 = 4" in out


def test_lambda_bad_player(mp_file, capsys):
    assert main(["lambda", mp_file, "--player", "3"]) == 1


def test_goodcheck_good(capsys):
    assert main(["goodcheck", "--shape", "3x3", "--r", "1:0-1,1-2"]) == 0
    assert "good" in capsys.readouterr().out


def test_goodcheck_cycle(capsys):
    assert main(["goodcheck", "--shape", "3x3", "--r", "1:0-1,1-2,0-2"]) == 0
    out = capsys.readouterr().out
    assert "not good" in out
    assert "cycle" in out


def test_goodcheck_json(capsys):
    code = main(
        ["goodcheck", "--shape", "2x2", "--t", "1:0", "--r", "2:0-1", "--json"]
    )
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["results"]["good"] is True
    assert report["results"]["cycle"] is None


def test_goodcheck_bad_shape(capsys):
    assert main(["goodcheck", "--shape", "1x2"]) == 1
    assert main(["goodcheck", "--shape", "2x"]) == 1


def test_goodcheck_bad_spec(capsys):
    assert main(["goodcheck", "--shape", "2x2", "--r", "1:01"]) == 1
    assert main(["goodcheck", "--shape", "2x2", "--r", "5:0-1"]) == 1


def test_sample_deterministic(capsys):
    args = ["sample", "2x2", "--count", "4", "--seed", "9", "--json"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    second = capsys.readouterr().out
    assert first == second
    report = json.loads(first)
    assert len(report["results"]["games"]) == 4
    assert report["results"]["games"][0]["seed"] == 9
    assert 0 <= report["results"]["oddness_rate"] <= 1


def test_sample_text(capsys):
    assert main(["sample", "2x2", "--count", "2", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "oddness rate" in out
    assert "degeneracy-witness rate" in out


def test_sample_bad_shape(capsys):
    assert main(["sample", "1x2", "--count", "1"]) == 1


def test_certify_point(mp_file, capsys):
    assert main(["certify", mp_file, "--point", "0.5,0.5;0.5,0.5"]) == 0
    out = capsys.readouterr().out
    assert "verdict: transversal" in out
    assert "D:1:0:1" in out


def test_certify_json_round_trip(bos_file, tmp_path, capsys):
    assert main(["solve", bos_file, "--exact", "--json"]) == 0
    solve_out = capsys.readouterr().out
    report_path = tmp_path / "solve.json"
    report_path.write_text(solve_out)
    code = main(
        ["certify", bos_file, "--from-json", str(report_path), "--index", "1"]
    )
    assert code == 0
    assert "transversal" in capsys.readouterr().out


def test_certify_from_json_bad_index(bos_file, tmp_path, capsys):
    assert main(["solve", bos_file, "--json"]) == 0
    report_path = tmp_path / "solve.json"
    report_path.write_text(capsys.readouterr().out)
    code = main(
        ["certify", bos_file, "--from-json", str(report_path), "--index", "9"]
    )
    assert code == 1


def test_certify_requires_point(mp_file, capsys):
    assert main(["certify", mp_file]) == 1


def test_certify_excluded_family(mp_file, capsys):
    code = main(
        [
            "certify", mp_file,
            "--point", "0.5,0.5;0.5,0.5",
            "--chart", "1,1",
            "--t", "1:1",
            "--r", "2:0-1",
        ]
    )
    assert code == 1
    assert "chart" in capsys.readouterr().err


def test_certify_degenerate_exit(tmp_path, capsys):
    zero = _write(tmp_path, "zero.game", ZERO_TEXT)
    code = main(["certify", zero, "--point", "0.5,0.5;0.5,0.5"])
    assert code == 2
    assert "degenerate" in capsys.readouterr().out


def test_certify_bad_point(mp_file, capsys):
    assert main(["certify", mp_file, "--point", "0.5,0.6;0.5,0.5"]) == 1
    assert main(["certify", mp_file, "--point", "0.5,0.5"]) == 1


def test_charts_output(capsys):
    assert main(["charts", "--shape", "2x3"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 6
    assert any("C:1:inf" in line for line in out)
    assert any("C:2:2" in line for line in out)


def test_usage_errors_exit_one(capsys):
    assert main(["nosuchcommand"]) == 1
    assert main([]) == 1
    assert main(["solve"]) == 1


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "solve" in capsys.readouterr().out

import json
from fractions import Fraction

import pytest

from nbody_galois.cli import main, parse_masses, parse_number
from nbody_galois.errors import InputError


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_parse_number_forms():
    assert parse_number("1/3") == Fraction(1, 3)
    assert parse_number("0.25") == Fraction(1, 4)
    assert isinstance(parse_number("1e-3"), float)
    assert parse_number("sqrt2") == "sqrt2"
    with pytest.raises(InputError):
        parse_number("abc")


def test_parse_masses_inline_and_files(tmp_path):
    assert parse_masses("1/7,5/7,1/7") == [Fraction(1, 7), Fraction(5, 7), Fraction(1, 7)]
    f = tmp_path / "m.json"
    f.write_text("[1, 2, 3]")
    assert parse_masses(str(f)) == [1, 2, 3]
    g = tmp_path / "m.txt"
    g.write_text("1 2\n3\n")
    assert parse_masses(str(g)) == [1, 2, 3]
    with pytest.raises(InputError):
        parse_masses("1,x,3")


def test_analyze_exit_ok_and_json(tmp_path, capsys):
    out = tmp_path / "a.json"
    code, res = _run(capsys, "analyze", "--masses", "1,1,1", "--json", str(out))
    assert code == 0
    assert "not meromorphically integrable" in res.out
    data = json.loads(out.read_text())
    assert data["verdicts"][0]["lambda_text"] == "1/2"


def test_analyze_inconclusive_exit(capsys):
    code, res = _run(capsys, "analyze", "--masses", "0.2,0.3,0.5")
    assert code == 3
    assert "method inconclusive" in res.out


def test_analyze_invalid_input(capsys):
    assert _run(capsys, "analyze", "--masses", "1,-1,1")[0] == 2
    assert _run(capsys, "analyze", "--masses", "1")[0] == 2
    assert _run(capsys, "bogus")[0] == 2


def test_analyze_exact_with_monodromy(capsys):
    code, res = _run(capsys, "analyze", "--masses", "1,1,1", "--exact", "--with-monodromy", "--json", "-")
    assert code == 0
    data = json.loads(res.out)
    assert data["monodromy"]
    assert all(m["certificate"] is False for m in data["monodromy"] if m.get("lambda") == "1/2")


def test_table_and_monodromy(capsys):
    code, res = _run(capsys, "table", "--C", "0", "--H", "-1", "--lam", "2", "--json", "-")
    assert code == 0
    assert json.loads(res.out)["verdict"]["matched_k"] == 2
    code, res = _run(capsys, "monodromy", "--C", "3", "--lam", "-1", "--tol", "1e-10", "--json", "-")
    assert code == 0 and json.loads(res.out)["certificate"] is True


def test_other_subcommands(capsys):
    assert _run(capsys, "equal-masses", "--n-min", "3", "--n-max", "6")[0] == 0
    assert _run(capsys, "search-3body", "--grid", "0.1")[0] == 0
    assert _run(capsys, "search-3body", "--grid", "0.7")[0] == 2
    code, res = _run(capsys, "examples", "--json", "-")
    assert code == 0 and json.loads(res.out)


def test_special_masses_exit_inconclusive(capsys):
    code, res = _run(capsys, "analyze", "--masses", "1/7,5/7,1/7", "--exact")
    assert code == 3
    assert "inconclusive at this configuration" in res.out


def test_integer_and_normalized_masses_agree(capsys):
    _, a = _run(capsys, "analyze", "--masses", "1,5,1", "--exact")
    _, b = _run(capsys, "analyze", "--masses", "1/7,5/7,1/7", "--exact")
    assert a.out.splitlines()[-1] == b.out.splitlines()[-1]

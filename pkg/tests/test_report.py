import json
from fractions import Fraction

import pytest

from nbody_galois import report
from nbody_galois.variational import allowed_lambda, level_class


def _dump(rep):
    return json.loads(json.dumps(rep.to_json(), default=report.json_default))


def test_analyze_equal_masses():
    rep = report.cmd_analyze([1, 1, 1])
    assert "not meromorphically integrable" in rep.conclusion
    assert [v["lambda_text"] for v in rep.verdicts] == ["1/2"]
    assert all(not r["abelian_possible"] for r in rep.verdicts[0]["regimes"])
    assert "lagrange" in rep.verdicts[0]["configurations"]
    js = _dump(rep)
    assert js["provenance"]["tolerances"]["cluster"] == rep.provenance["tolerances"]["cluster"]


def test_analyze_generic_masses_inconclusive():
    rep = report.cmd_analyze([0.2, 0.3, 0.5])
    assert rep.conclusion.startswith("method inconclusive:")
    assert not rep.verdicts


def test_analyze_special_masses():
    rep = report.cmd_analyze([Fraction(1, 7), Fraction(5, 7), Fraction(1, 7)], exact_mode=True)
    assert rep.conclusion.startswith("method inconclusive at this configuration")
    assert [v["lambda_text"] for v in rep.verdicts] == ["0"]


def test_analyze_scale_invariant():
    a = report.cmd_analyze([1, 1, 1])
    b = report.cmd_analyze([5, 5, 5])
    assert a.conclusion == b.conclusion
    assert [v["lambda_text"] for v in a.verdicts] == [v["lambda_text"] for v in b.verdicts]


def test_analyze_polygon_and_unsupported():
    rep = report.cmd_analyze([1, 1, 1, 1])
    assert rep.verdicts and "not meromorphically" in rep.conclusion
    rep = report.cmd_analyze([1, 2, 3, 4])
    assert "error" in rep.configurations[0]


def test_equal_masses_report():
    rep = report.cmd_equal_masses(3, 12)
    assert all(r["in_bounds"] and r["residual"] <= 1e-9 for r in rep.rows)
    assert rep.rows[0]["lambda"] == 0.5
    assert all(r["verdict"].startswith("non-integrable") for r in rep.rows)
    with pytest.raises(Exception):
        report.cmd_equal_masses(2, 4)


def test_search_report():
    rep = report.cmd_search_decoupling_3body(0.1)
    d = _dump(rep)
    assert d["ratio_to_reference"] == "1"
    assert d["resultant_at_1_5_1"] == "0"
    assert d["irrational_triple"]["geometric_multiplicity"] == 1
    assert d["irrational_triple"]["conjugate_agrees"]
    with pytest.raises(Exception):
        report.cmd_search_decoupling_3body(0.5)


def test_search_lagrange_condition_zero_only_at_equal_masses():
    lag = report.lagrange_condition()
    assert lag.evaluate((Fraction(1, 3),) * 3) == 0
    rep = report.cmd_search_decoupling_3body(1 / 30)
    assert rep.data["lagrange_zeros"] == [["1/3", "1/3", "1/3"]]


def test_table():
    assert len(report.cmd_table().data["table"]) == 5
    v = report.cmd_table(0, -1, 2).data["verdict"]
    assert v["abelian_possible"] and v["matched_k"] == 2
    t = report.cmd_table(3, Fraction(7, 2), Fraction(1, 2)).data
    assert not t["verdict"]["abelian_possible"] and t["obstruction"] == "-1/12"


@pytest.mark.parametrize("C,lam", [(3, -1), (3, Fraction(1, 2)), (3, 0), ("sqrt2", 2), (1, -9), (1, Fraction(1, 2))])
def test_verdict_monotonicity(C, lam):
    # a non-abelian certificate must never coexist with an allowed table entry
    rep = report.cmd_monodromy(C, lam)
    assert rep.data["consistent"], rep.data


def test_monodromy_command_certifies():
    rep = report.cmd_monodromy(3, -1, 1e-10)
    assert rep.data["certificate"] is True


def test_examples_report():
    rows = {r["name"]: r for r in report.cmd_examples(50).rows}
    assert rows["V1"]["surviving"] == ["ZeroC", "ZeroH"]
    assert rows["V2"]["surviving"] == ["ZeroH"]
    assert rows["V2"]["notes"][0]["source"] == "published-claim"

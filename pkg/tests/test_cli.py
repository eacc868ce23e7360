import io
import json

import pytest

from cli import build_parser, main, parse_rationals
from expression_parser import ParseError


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, [json.loads(line) for line in out.getvalue().splitlines()]


TRIPLE = {
    "dim": 2,
    "symbols": [],
    "D": [["0", "1"], ["1", "0"]],
    "J": {"U": [["1", "0"], ["0", "1"]], "epsilon": 1},
    "algebra": [[["1", "0"], ["0", "1"]]],
}


class TestParseRationals:
    def test_values(self):
        assert parse_rationals("1, 1/2,-3", 3) == (1, 0.5, -3)

    @pytest.mark.parametrize("text, count", [("1,x", None), ("1,2", 3), ("1/0", None)])
    def test_rejects(self, text, count):
        with pytest.raises(ParseError):
            parse_rationals(text, count)


class TestModel:
    def test_s0(self):
        code, reports = run("model", "s0", "--f", "x^2 + x^4", "--json")
        assert code == 0
        assert reports[0]["check_id"] == "model.s0"

    def test_classify(self):
        code, reports = run("model", "classify", "--g", "0, 1", "--json")
        assert code == 0
        assert json.loads(reports[0]["output"])["case"] == "Case2"
        assert all(report["timing_ms"] > 0 for report in reports)

    def test_bad_polynomial(self):
        code, _ = run("model", "s0", "--f", "x^", "--json")
        assert code == 2


class TestBV:
    def test_cme(self):
        code, reports = run("bv", "cme", "--alpha", "1,2,3", "--beta=-1/2", "--T", "M4^2", "--json")
        assert code == 0
        assert reports[0]["check_id"] == "bv.cme"
        assert reports[0]["status"] == "pass"

    def test_extend(self):
        code, reports = run("bv", "extend", "--json")
        assert code == 0
        assert "M1*" in reports[0]["output"]

    def test_brst(self):
        code, reports = run("bv", "brst", "E*", "--json")
        assert code == 0
        assert reports[0]["check_id"] == "bv.brst"
        assert reports[0]["timing_ms"] > 0

    def test_gauge_fix(self):
        code, reports = run("bv", "gauge-fix", "--psi", "B1*h1 + B2*h2 + B3*h3", "--json")
        assert code == 0
        assert "h1^2" in reports[0]["output"]

    def test_zero_alpha(self):
        code, reports = run("bv", "cme", "--alpha", "0,1,1", "--json")
        assert code == 2
        assert reports == []

    def test_unknown_generator(self):
        assert run("bv", "brst", "M9", "--json")[0] == 2

    def test_antifield_in_gauge_fermion(self):
        assert run("bv", "gauge-fix", "--psi", "B1* * B1", "--json")[0] == 2


class TestTriple:
    def test_passing_ko_dimension(self, tmp_path):
        path = tmp_path / "swap.json"
        path.write_text(json.dumps(TRIPLE), encoding="utf-8")
        code, reports = run("triple", "check", str(path), "--ko", "0", "--json")
        assert code == 0
        assert reports[0]["check_id"] == "triple.ko0"

    def test_failing_ko_dimension(self, tmp_path):
        path = tmp_path / "swap.json"
        path.write_text(json.dumps(TRIPLE), encoding="utf-8")
        code, reports = run("triple", "check", str(path), "--ko", "1", "--json")
        assert code == 1
        assert reports[0]["status"] == "fail"
        assert reports[0]["failed_conditions"] == ["JD=epsilon'DJ[0,1]"]

    def test_missing_file(self, tmp_path):
        assert run("triple", "check", str(tmp_path / "absent.json"), "--json")[0] == 2


class TestBVTriple:
    def test_ko_report(self):
        code, reports = run("bvtriple", "ko-report", "--json")
        assert code == 0
        assert len(reports) == 10

    def test_aux_verify(self):
        assert run("bvtriple", "aux-verify", "--json")[0] == 0


class TestUsage:
    def test_unknown_command(self):
        assert run("nonsense")[0] == 2

    def test_missing_action(self):
        assert run("bv")[0] == 2

    def test_parser_names(self):
        assert build_parser().prog == "bvengine"

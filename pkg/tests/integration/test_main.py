import json
import os

import pytest

from src.run import main

TEST_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


def data(name):
    return os.path.join(TEST_DATA_DIR, name)


def run_json(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    assert code == 0, err
    return json.loads(out)


def run_error(capsys, argv):
    code = main(argv)
    _, err = capsys.readouterr()
    return code, json.loads(err.strip().splitlines()[-1])


class TestSeriesCommands:
    """Runs the series subcommands on the fixture documents."""

    def test_bch(self, capsys):
        document = run_json(capsys, ["bch", data("x0.json"), data("x1.json")])
        assert document["basis"] == "lyndon"
        assert document["terms"] == [
            {"word": [0], "coeff": "1"},
            {"word": [1], "coeff": "1"},
            {"word": [0, 1], "coeff": "1/2"},
            {"word": [0, 0, 1], "coeff": "1/12"},
            {"word": [0, 1, 1], "coeff": "1/12"},
        ]

    def test_bch_truncated(self, capsys):
        document = run_json(capsys, ["bch", data("x0.json"), data("x1.json"), "-N", "2"])
        assert document["truncation"] == 2
        assert [t["word"] for t in document["terms"]] == [[0], [1], [0, 1]]

    def test_exp(self, capsys):
        document = run_json(capsys, ["exp", data("x0.json")])
        assert document["terms"] == [
            {"word": [], "coeff": "1"},
            {"word": [0], "coeff": "1"},
            {"word": [0, 0], "coeff": "1/2"},
            {"word": [0, 0, 0], "coeff": "1/6"},
        ]

    def test_log(self, capsys):
        document = run_json(capsys, ["log", data("exp_sum.json")])
        assert document["terms"] == [{"word": [0], "coeff": "1"}, {"word": [1], "coeff": "1"}]

    def test_power(self, capsys):
        document = run_json(capsys, ["power", data("exp_sum.json"), "--exponent", "2", "-N", "2"])
        coeffs = {tuple(t["word"]): t["coeff"] for t in document["terms"]}
        assert coeffs[(0,)] == "2"
        assert coeffs[(0, 1)] == "2"

    def test_polynomial_power(self, capsys):
        document = run_json(capsys, ["power", data("exp_sum.json"), "--exponent", "l", "-N", "1"])
        assert document["terms"][1] == {"word": [0], "coeff": "1*l"}

    def test_exp_of_group_element_fails(self, capsys):
        code, record = run_error(capsys, ["exp", data("exp_sum.json")])
        assert code == 3
        assert record["error"] == "ValuationZero"


class TestCollectCommands:
    def test_collect_input(self, capsys):
        document = run_json(capsys, ["collect", data("exp_sum.json"), "--verify"])
        assert document["factors"][:3] == [
            {"word": [0], "exponent": "1"},
            {"word": [1], "exponent": "1"},
            {"word": [0, 1], "exponent": "-1/2"},
        ]

    def test_collect_bracket_formula(self, capsys):
        document = run_json(capsys, ["collect", "--formula", "bracket", "-N", "3", "--verify"])
        assert document["factors"][0] == {"word": [0, 1], "exponent": "1"}

    def test_collect_sum_formula_text(self, capsys):
        code = main(["--format", "text", "collect", "--formula", "sum", "-N", "2"])
        out, _ = capsys.readouterr()
        assert code == 0
        assert out.strip() == "x0 * x1 * comm(x0,x1)^(-1/2)"

    def test_collect_needs_input(self, capsys):
        assert main(["collect"]) == 2

    def test_not_group_like(self, capsys):
        code, record = run_error(capsys, ["collect", data("not_group_like.json")])
        assert code == 3
        assert record == {
            "error": "NotGroupLike",
            "message": record["message"],
            "exit_code": 3,
        }

    def test_expand(self, capsys):
        document = run_json(capsys, ["expand", data("decomposition.json")])
        assert document["terms"] == [
            {"word": [], "coeff": "1"},
            {"word": [0], "coeff": "1"},
            {"word": [1], "coeff": "1"},
            {"word": [0, 0], "coeff": "1/2"},
            {"word": [0, 1], "coeff": "1/2"},
            {"word": [1, 0], "coeff": "1/2"},
            {"word": [1, 1], "coeff": "1/2"},
        ]


class TestLyndonCommands:
    def test_lyndon(self, capsys):
        document = run_json(capsys, ["lyndon", "-m", "2", "-N", "3"])
        assert document["words"] == [[0], [1], [0, 1], [0, 0, 1], [0, 1, 1]]
        assert document["counts"] == {"1": 2, "2": 1, "3": 2}

    def test_lyndon_text(self, capsys):
        assert main(["--format", "text", "lyndon", "-N", "2"]) == 0
        out, _ = capsys.readouterr()
        assert out.splitlines() == ["0\t0", "1\t1", "0 1\t(0 1)"]

    def test_dims(self, capsys):
        document = run_json(capsys, ["dims", "-m", "3", "-N", "4"])
        assert [(r["lyndon"], r["necklace"]) for r in document["dimensions"]] == [
            (3, 3),
            (3, 3),
            (8, 8),
            (18, 18),
        ]


class TestModelCommands:
    def test_term(self, capsys):
        document = run_json(capsys, ["term", data("term.json"), "-c", "3"])
        assert document["text"] == "x0 * x1 * comm(x0,x1)^(-1/2)"
        assert document["lie"]["terms"] == [
            {"word": [0], "coeff": "1"},
            {"word": [1], "coeff": "1"},
        ]

    def test_hall_petresco(self, capsys):
        document = run_json(capsys, ["hall-petresco", "--n", "2", "-c", "3"])
        assert document["holds"] is True
        assert len(document["taus"]) == 2

    def test_solve(self, capsys):
        document = run_json(capsys, ["solve", data("equation.json"), "--verify"])
        assert document["solution"] == {"labels": ["e0", "e1", "e2"], "coords": ["-1/2", "-1/2", "0"]}
        assert document["residual"]["coords"] == ["0", "0", "0"]

    def test_solve_with_algebra_override(self, capsys, tmp_path):
        algebra = tmp_path / "abelian.json"
        algebra.write_text(json.dumps({"builtin": "abelian", "dimension": 3}))
        document = run_json(
            capsys, ["solve", data("equation.json"), "--algebra", str(algebra)]
        )
        assert document["solution"]["coords"] == ["-1/2", "-1/2", "0"]

    def test_singular_equation(self, capsys, tmp_path):
        equation = tmp_path / "singular.json"
        equation.write_text(
            json.dumps(
                {
                    "algebra": {"builtin": "heisenberg"},
                    "factors": [{"g": [1, 0, 0], "lambda": "1"}, {"g": [0, 1, 0], "lambda": "-1"}],
                }
            )
        )
        code, record = run_error(capsys, ["solve", str(equation)])
        assert code == 3
        assert record["error"] == "SingularEquation"


class TestVerifyAndErrors:
    def test_verify(self, capsys):
        document = run_json(capsys, ["verify", "lyndon", "--cases", "2", "-N", "3"])
        assert document["Name"] == "lyndon"
        assert document["Summary"]["Failed"] == 0

    def test_missing_file(self, capsys):
        code, record = run_error(capsys, ["exp", data("missing.json")])
        assert code == 2
        assert record["error"] == "DocumentError"

    def test_malformed_document(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"generators": 2, "terms": []}))
        code, record = run_error(capsys, ["exp", str(path)])
        assert code == 2
        assert "Check 1/3" in record["message"]

    @pytest.mark.parametrize("argv", [[], ["bogus"], ["verify", "nope"], ["power", "x.json"]])
    def test_usage_errors(self, capsys, argv):
        assert main(argv) == 2

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "out.txt"
        assert main(["--format", "text", "-o", str(path), "bch", data("x0.json"), data("x1.json"), "-N", "2"]) == 0
        assert path.read_text() == "1*0 + 1*1 + 1/2*(0 1)\n"

    def test_coefficient_code_is_not_run(self, capsys, tmp_path):
        marker = tmp_path / "marker"
        payload = f"__import__('pathlib').Path({str(marker)!r}).write_text('x') and 1"
        path = tmp_path / "series.json"
        path.write_text(
            json.dumps({"generators": 2, "truncation": 3, "terms": [{"word": [0], "coeff": payload}]})
        )
        code, record = run_error(capsys, ["exp", str(path)])
        assert code == 2
        assert record["error"] == "DocumentError"
        assert not marker.exists()

    def test_collect_rejects_input_with_formula(self, capsys):
        assert main(["collect", data("exp_sum.json"), "--formula", "sum"]) == 2
        _, err = capsys.readouterr()
        assert "exactly one" in err

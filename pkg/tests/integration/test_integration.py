import os

from src.documents import read_json, series_from_document, write_json
from src.run import main

TEST_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


class TestEndToEnd:
    """Chains subcommands through files on disk."""

    def test_collect_then_expand(self, tmp_path):
        decomposition = str(tmp_path / "decomposition.json")
        expanded = str(tmp_path / "expanded.json")

        assert main(["-o", decomposition, "collect", os.path.join(TEST_DATA_DIR, "exp_sum.json")]) == 0
        assert main(["-o", expanded, "expand", decomposition]) == 0

        original = series_from_document(read_json(os.path.join(TEST_DATA_DIR, "exp_sum.json")))
        assert series_from_document(read_json(expanded)) == original

    def test_bch_then_exp_matches_product(self, tmp_path):
        lie = str(tmp_path / "bch.json")
        group = str(tmp_path / "group.json")
        x0 = os.path.join(TEST_DATA_DIR, "x0.json")
        x1 = os.path.join(TEST_DATA_DIR, "x1.json")

        assert main(["-o", lie, "bch", x0, x1]) == 0
        assert main(["-o", group, "exp", lie]) == 0
        assert main(["-o", str(tmp_path / "back.json"), "log", group]) == 0

        assert series_from_document(read_json(str(tmp_path / "back.json"))) == series_from_document(
            read_json(lie)
        )

    def test_solve_in_free_model(self, tmp_path):
        equation = str(tmp_path / "equation.json")
        write_json(
            equation,
            {
                "algebra": {"builtin": "free", "generators": 2, "class": 3},
                "factors": [
                    {"g": ["1", "0", "0", "0", "0"], "lambda": "2"},
                    {"g": ["0", "1", "1/2", "0", "0"], "lambda": "-1/3"},
                ],
            },
        )
        output = str(tmp_path / "solution.json")
        assert main(["-o", output, "solve", equation, "--verify"]) == 0
        assert read_json(output)["residual"]["coords"] == ["0"] * 5

    def test_verify_suite_report_written(self, tmp_path):
        output = str(tmp_path / "report.json")
        assert main(["-o", output, "verify", "solver", "--cases", "2", "--seed", "11"]) == 0
        report = read_json(output)
        assert report["Summary"]["Seed"] == 11
        assert report["First failure"] is None

import os

import pytest
from sympy import QQ

from src.algebra_core import TruncatedSeries
from src.collection import Bracket, GComm, GPow, GVar, MlsDecomposition, Scale, Var, Zero, star
from src.documents import (
    algebra_from_document,
    algebra_to_document,
    decomposition_from_document,
    decomposition_to_document,
    decomposition_to_text,
    equation_from_document,
    group_word_to_document,
    lie_from_document,
    lie_to_document,
    lie_to_text,
    read_json,
    series_from_document,
    series_to_document,
    series_to_text,
    term_from_document,
    vector_from_document,
    vector_to_text,
    write_json,
)
from src.errors import DocumentError
from src.lyndon import LieElement
from src.nilpotent_models import model_vector, vectors_equal

TEST_DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")


class TestJson:
    def test_write_then_read(self, tmp_path):
        path = str(tmp_path / "doc.json")
        write_json(path, {"a": [1, "1/2"]})
        assert read_json(path) == {"a": [1, "1/2"]}

    def test_missing_file(self, tmp_path):
        with pytest.raises(DocumentError):
            read_json(str(tmp_path / "missing.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(DocumentError):
            read_json(str(path))


class TestSeriesDocuments:
    def test_series_document(self):
        document = {
            "generators": 2,
            "truncation": 2,
            "terms": [{"word": [0, 1], "coeff": "-1/2"}, {"word": [], "coeff": 1}],
        }
        series = series_from_document(document)
        assert series == TruncatedSeries.from_terms(2, 2, {(): 1, (0, 1): "-1/2"})
        assert series_to_document(series)["terms"] == [
            {"word": [], "coeff": "1"},
            {"word": [0, 1], "coeff": "-1/2"},
        ]
        assert series_to_text(series) == "1*1 + -1/2*X0X1"

    def test_lyndon_basis_document_reads_as_series(self):
        document = {
            "generators": 2,
            "truncation": 2,
            "basis": "lyndon",
            "terms": [{"word": [0, 1], "coeff": "1"}],
        }
        assert series_from_document(document) == TruncatedSeries.from_terms(
            2, 2, {(0, 1): 1, (1, 0): -1}
        )

    def test_lie_document(self):
        element = LieElement.from_coords(2, 3, {(0,): 1, (0, 1, 1): "1/12"})
        document = lie_to_document(element)
        assert document["basis"] == "lyndon"
        assert lie_from_document(document) == element
        assert lie_to_text(element) == "1*0 + 1/12*((0 1) 1)"

    @pytest.mark.parametrize(
        "terms",
        [
            [{"word": [0], "coeff": 0.5}],
            [{"word": [0], "coeff": "1"}, {"word": [0], "coeff": "2"}],
            [{"word": "01", "coeff": "1"}],
            [{"word": [0, 0, 0], "coeff": "1"}],
        ],
    )
    def test_malformed_series(self, terms):
        with pytest.raises(DocumentError):
            series_from_document({"generators": 2, "truncation": 2, "terms": terms})


class TestDecompositionDocuments:
    def test_round_trip_and_text(self):
        decomposition = MlsDecomposition((((0,), 1), ((1,), 1), ((0, 1), QQ(-1, 2))))
        document = decomposition_to_document(decomposition, 2, 2)
        assert document["factors"][2] == {"word": [0, 1], "exponent": "-1/2"}
        assert decomposition_from_document(document) == decomposition
        assert decomposition_to_text(decomposition) == "x0 * x1 * comm(x0,x1)^(-1/2)"

    def test_out_of_order_factors(self):
        document = {"factors": [{"word": [1], "exponent": "1"}, {"word": [0], "exponent": "1"}]}
        with pytest.raises(DocumentError):
            decomposition_from_document(document)


class TestModelDocuments:
    @pytest.mark.parametrize(
        "document, dimension",
        [
            ({"builtin": "heisenberg"}, 3),
            ({"builtin": "abelian", "dimension": 4}, 4),
            ({"builtin": "free", "generators": 2, "class": 3}, 5),
        ],
    )
    def test_builtin(self, document, dimension):
        assert algebra_from_document(document).dimension == dimension

    def test_unknown_builtin(self):
        with pytest.raises(DocumentError):
            algebra_from_document({"builtin": "so3"})

    def test_algebra_round_trip(self, heisenberg):
        document = algebra_to_document(heisenberg)
        assert document["brackets"] == [{"i": 0, "j": 1, "coeffs": ["0", "0", "1"]}]
        assert algebra_from_document(document) == heisenberg

    def test_vector(self):
        vector = vector_from_document({"coords": ["1/2", 0, -3]}, 3)
        assert vectors_equal(vector, model_vector(["1/2", 0, -3]))
        assert vector_to_text(vector, ["e0", "e1", "e2"]) == "1/2*e0 + -3*e2"
        with pytest.raises(DocumentError):
            vector_from_document([1, 2], 3)

    def test_equation_with_algebra_path(self):
        document = {"algebra": "heisenberg.json", "factors": [{"g": [1, 0, 0], "lambda": "2"}]}
        algebra, gs, exponents = equation_from_document(document, TEST_DATA_DIR)
        assert algebra.dimension == 3
        assert vectors_equal(gs[0], model_vector([1, 0, 0]))
        assert exponents == [2]


class TestTermDocuments:
    def test_nested_term(self):
        document = {
            "op": "star",
            "args": [
                {"op": "var", "index": 0},
                {"op": "scale", "scalar": "1/2", "arg": {"op": "var", "index": 1}},
                {"op": "bracket", "args": [{"op": "var", "index": 0}, {"op": "zero"}]},
            ],
        }
        expected = star(Var(0), Scale(QQ(1, 2), Var(1)), Bracket(Var(0), Zero()))
        assert term_from_document(document) == expected

    @pytest.mark.parametrize(
        "document",
        [{"op": "add", "args": [{"op": "var", "index": 0}]}, {"op": "frobnicate", "args": []}, {"index": 0}],
    )
    def test_malformed_term(self, document):
        with pytest.raises(DocumentError):
            term_from_document(document)

    def test_group_word_document(self):
        word = GPow(GComm(GVar(0), GVar(1)), QQ(-1, 2))
        assert group_word_to_document(word) == {
            "op": "pow",
            "exponent": "-1/2",
            "arg": {"op": "comm", "args": [{"op": "var", "index": 0}, {"op": "var", "index": 1}]},
        }

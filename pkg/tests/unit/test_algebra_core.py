import math

import pytest
from hypothesis import given
from sympy import QQ

from src.algebra_core import (
    LAMBDA,
    TruncatedSeries,
    binomial_poly,
    cauchy_product,
    format_scalar,
    graded_lex_key,
    lie_bracket,
    parse_scalar,
    series_add,
    specialize,
    substitute,
    to_scalar,
    valuation,
)
from src.errors import (
    ArityMismatch,
    DegreeExceedsTruncation,
    DocumentError,
    NonRationalScalar,
    ShapeMismatch,
    ValuationZeroArgument,
)
from tests.conftest import series_strategy


def X(i, m=2, n=3):
    return TruncatedSeries.generator(i, m, n)


class TestScalars:
    @pytest.mark.parametrize(
        "text, expected",
        [("3", "3"), ("-1/2", "-1/2"), ("4/2", "2"), ("0", "0"), ("l", "1*l")],
    )
    def test_parse_then_format(self, text, expected):
        assert format_scalar(parse_scalar(text)) == expected

    def test_polynomial_round_trip(self):
        value = binomial_poly(2)
        assert parse_scalar(format_scalar(value)) == value

    @pytest.mark.parametrize("text", ["0.5", "x", "1/2*l*x", "not a number ("])
    def test_parse_rejects_inexact_or_foreign(self, text):
        with pytest.raises(DocumentError):
            parse_scalar(text)

    @pytest.mark.parametrize(
        "text, expected",
        [
            ("1/2*l**2 + -1/2*l", binomial_poly(2)),
            ("-l + 1", 1 - LAMBDA),
            ("3 + 1/2", QQ(7, 2)),
            ("0*l", QQ(0)),
            (" -4/6 ", QQ(-2, 3)),
        ],
    )
    def test_parse_grammar(self, text, expected):
        assert parse_scalar(text) == expected

    @pytest.mark.parametrize(
        "text",
        [
            "__import__('os').getcwd() and 1",
            "1/0",
            "2**3",
            "l*l",
            "1 +",
            "",
            "S(1)/2",
            "1e3",
        ],
    )
    def test_parse_rejects_outside_grammar(self, text):
        with pytest.raises(DocumentError):
            parse_scalar(text)

    def test_parse_never_evaluates(self, tmp_path):
        marker = tmp_path / "marker"
        with pytest.raises(DocumentError):
            parse_scalar(f"__import__('pathlib').Path({str(marker)!r}).write_text('x') and 1")
        assert not marker.exists()

    def test_float_is_not_a_scalar(self):
        with pytest.raises(NonRationalScalar):
            to_scalar(0.5)

    @pytest.mark.parametrize("i, point, expected", [(0, 7, 1), (1, 7, 7), (2, 5, 10), (3, 6, 20)])
    def test_binomial_poly_specializes_to_binomial(self, i, point, expected):
        assert specialize(binomial_poly(i), point) == expected
        assert expected == math.comb(point, i)

    def test_graded_lex_key_orders_degree_first(self):
        words = [(1, 1), (0,), (0, 1), (1,), ()]
        assert sorted(words, key=graded_lex_key) == [(), (0,), (1,), (0, 1), (1, 1)]


class TestTruncatedSeries:
    def test_zero_coefficients_are_pruned(self):
        series = TruncatedSeries.from_terms(2, 2, {(0,): 1, (1,): 0})
        assert series.support() == [(0,)]
        assert series == TruncatedSeries.generator(0, 2, 2)

    def test_word_longer_than_truncation(self):
        with pytest.raises(DegreeExceedsTruncation):
            TruncatedSeries.from_terms(2, 2, {(0, 1, 1): 1})

    @pytest.mark.parametrize("m, n, terms", [(0, 2, {}), (2, 0, {}), (2, 2, {(2,): 1})])
    def test_bad_shape(self, m, n, terms):
        with pytest.raises(ShapeMismatch):
            TruncatedSeries.from_terms(m, n, terms)

    def test_homogeneous_part_and_truncate(self):
        series = TruncatedSeries.from_terms(2, 3, {(): 1, (0,): 2, (0, 1): 3, (1, 1, 0): 4})
        assert series.homogeneous_part(2) == TruncatedSeries.from_terms(2, 3, {(0, 1): 3})
        assert series.truncate(1) == TruncatedSeries.from_terms(2, 1, {(): 1, (0,): 2})
        with pytest.raises(ShapeMismatch):
            series.truncate(4)

    def test_support_is_graded_lex(self):
        series = TruncatedSeries.from_terms(2, 2, {(1, 0): 1, (1,): 1, (0, 1): 1, (0,): 1})
        assert series.support() == [(0,), (1,), (0, 1), (1, 0)]

    def test_add_rejects_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            series_add(X(0, 2, 3), X(0, 2, 2))


class TestProducts:
    def test_cauchy_product_concatenates(self):
        assert cauchy_product(X(0), X(1)) == TruncatedSeries.monomial((0, 1), 1, 2, 3)

    def test_product_drops_long_words(self):
        x = X(0, 1, 2)
        assert (x * x * x).is_zero()

    def test_one_plus_x_times_one_minus_x(self):
        one = TruncatedSeries.one(1, 2)
        x = X(0, 1, 2)
        assert (one + x) * (one - x) == one - x * x

    def test_lie_bracket(self):
        assert lie_bracket(X(0), X(1)) == TruncatedSeries.from_terms(
            2, 3, {(0, 1): 1, (1, 0): -1}
        )

    def test_polynomial_coefficients(self):
        series = X(0) * LAMBDA + X(0)
        assert series.coefficient((0,)) == LAMBDA + 1

    @given(series_strategy(), series_strategy(), series_strategy())
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(series_strategy(), series_strategy(), series_strategy())
    def test_distributive(self, a, b, c):
        assert a * (b + c) == a * b + a * c


class TestValuation:
    def test_zero_series_has_infinite_valuation(self):
        assert valuation(TruncatedSeries.zero(2, 3)) == math.inf

    def test_valuation_is_minimal_degree(self):
        assert valuation(X(0) * X(1) + X(1)) == 1

    @given(series_strategy(min_degree=1), series_strategy(min_degree=1))
    def test_valuation_adds(self, a, b):
        expected = valuation(a) + valuation(b)
        if expected > 3:
            expected = math.inf
        assert valuation(a * b) == expected


class TestSubstitute:
    def test_swap_generators(self):
        p = X(0) * X(1)
        assert substitute(p, [X(1), X(0)]) == X(1) * X(0)

    def test_constant_term_survives(self):
        p = TruncatedSeries.one(2, 3) + X(0)
        assert substitute(p, [X(1) * X(1), X(0)]) == TruncatedSeries.one(2, 3) + X(1) * X(1)

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            substitute(X(0), [X(0)])

    def test_argument_with_constant_term(self):
        with pytest.raises(ValuationZeroArgument):
            substitute(X(0), [TruncatedSeries.one(2, 3), X(1)])

    @given(
        series_strategy(max_size=4),
        series_strategy(min_degree=1, max_size=3),
        series_strategy(min_degree=1, max_size=3),
    )
    def test_substitution_is_associative(self, p, q0, q1):
        rs = [X(1), X(0) + X(1)]
        left = substitute(substitute(p, [q0, q1]), rs)
        right = substitute(p, [substitute(q0, rs), substitute(q1, rs)])
        assert left == right

"""
Exact scalars, associative words and truncated noncommutative power series.

A series over m generators truncated at order N is a sparse map from words
(tuples of generator indices) to scalars, read modulo every word longer
than N. Scalars are elements of an exact commutative Q-algebra: either
rationals (sympy's QQ) or univariate polynomials in l with rational
coefficients (the ring QQ[l]).
"""

import math
import numbers
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy import QQ, Rational
from sympy.external.gmpy import MPQ
from sympy.polys.rings import PolyElement, ring

from src.errors import (
    ArityMismatch,
    DegreeExceedsTruncation,
    DocumentError,
    NonRationalScalar,
    ShapeMismatch,
    ValuationZeroArgument,
)


LAMBDA_RING, LAMBDA = ring("l", QQ)
_RATIONAL = r"-?\d+(?:/\d+)?"
_TERM = re.compile(
    rf"(?P<constant>{_RATIONAL})"
    rf"|(?:(?P<factor>{_RATIONAL})\s*\*\s*|(?P<negate>-)\s*)?l(?:\s*\*\*\s*(?P<power>\d+))?"
)

Scalar = Union[MPQ, PolyElement]
Word = Tuple[int, ...]


# Scalars


def to_scalar(value) -> Scalar:
    """Converts ints, fractions, sympy rationals, strings and polynomials
    to an engine scalar.

    Args:
        value: Anything with an exact rational or polynomial reading.

    Returns:
        Scalar: An element of QQ, or of QQ[l] for polynomial input.
    """
    if isinstance(value, PolyElement):
        if value.ring != LAMBDA_RING:
            raise NonRationalScalar(f"Polynomial scalars must live in {LAMBDA_RING}.")
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ.from_sympy(value)
    if isinstance(value, numbers.Integral):
        return QQ(int(value))
    if isinstance(value, float):
        raise NonRationalScalar(f"Floating-point scalar {value!r} is not exact.")
    return QQ.convert(value)


def as_rational(value: Scalar) -> MPQ:
    """Reads a scalar as a rational, failing on genuine polynomials."""
    if isinstance(value, PolyElement):
        if value.degree() > 0:
            raise NonRationalScalar(f"Scalar {format_scalar(value)} is not rational.")
        return value.const()
    return QQ.convert(value)


def parse_scalar(text: str) -> Scalar:
    """Parses "p/q" rationals and polynomials such as "1/2*l**2 + -1/2*l".

    A polynomial is a "+"-joined list of terms, each a rational, or l (or
    l**k) optionally preceded by "<rational>*" or "-". Nothing is evaluated.

    Raises:
        DocumentError: If the text is not an exact rational or a polynomial
            in l with rational coefficients.
    """
    total = LAMBDA_RING.zero
    for piece in text.split("+"):
        match = _TERM.fullmatch(piece.strip())
        if match is None:
            raise DocumentError(f"Cannot parse scalar {text!r}.")
        if match["constant"] is not None:
            total += _rational_from_text(match["constant"], text)
            continue
        if match["factor"] is not None:
            coeff = _rational_from_text(match["factor"], text)
        else:
            coeff = QQ(-1) if match["negate"] else QQ(1)
        power = int(match["power"]) if match["power"] is not None else 1
        total += LAMBDA**power * coeff

    if total.degree() <= 0:
        return QQ.convert(total.const())
    return total


def _rational_from_text(token: str, text: str) -> MPQ:
    numerator, _, denominator = token.partition("/")
    if denominator and int(denominator) == 0:
        raise DocumentError(f"Scalar {text!r} has a zero denominator.")
    return QQ(int(numerator), int(denominator or 1))


def _format_rational(value) -> str:
    value = QQ.convert(value)
    numerator, denominator = QQ.numer(value), QQ.denom(value)
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


def format_scalar(value: Scalar) -> str:
    """Formats a scalar as an exact string that parse_scalar reads back."""
    if isinstance(value, PolyElement):
        if not value:
            return "0"
        parts = []
        for (power,), coeff in sorted(value.terms()):
            text = _format_rational(coeff)
            if power == 1:
                text += "*l"
            elif power > 1:
                text += f"*l**{power}"
            parts.append(text)
        return " + ".join(parts)
    return _format_rational(value)


def specialize(value: Scalar, point) -> MPQ:
    """Evaluates a polynomial scalar at l = point; rationals pass through."""
    if isinstance(value, PolyElement):
        return value(QQ.convert(to_scalar(point)))
    return value


def binomial_poly(i: int) -> PolyElement:
    """Returns the binomial coefficient l(l-1)...(l-i+1)/i! as a polynomial in l."""
    if i < 0:
        raise ValueError("Binomial index must be nonnegative.")
    poly = LAMBDA_RING.one
    for j in range(i):
        poly = poly * (LAMBDA - j)
    return poly * QQ(1, math.factorial(i))


# Words


def graded_lex_key(word: Word) -> Tuple[int, Word]:
    """Sort key for the graded-lex order: degree first, then lexicographic."""
    return len(word), word


# Series


@dataclass(frozen=True)
class TruncatedSeries:
    """An element of the Magnus algebra on m generators modulo words of
    degree > N.

    Zero coefficients are pruned on construction, so two series are equal
    iff their generator count, truncation order and term maps agree.
    """

    num_generators: int
    truncation_order: int
    terms: Mapping[Word, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        m, n = self.num_generators, self.truncation_order
        if m < 1 or n < 1:
            raise ShapeMismatch(
                f"Series need at least one generator and truncation >= 1, got ({m}, {n})."
            )
        clean: Dict[Word, Scalar] = {}
        for word, coeff in self.terms.items():
            if len(word) > n:
                raise DegreeExceedsTruncation(
                    f"Word {list(word)} is longer than the truncation order {n}."
                )
            if any(letter < 0 or letter >= m for letter in word):
                raise ShapeMismatch(f"Word {list(word)} leaves the alphabet of size {m}.")
            if coeff:
                clean[word] = coeff
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_terms(
        cls, m: int, n: int, terms: Mapping[Iterable[int], object]
    ) -> "TruncatedSeries":
        """Builds a series from loosely typed words and coefficients."""
        return cls(
            m, n, {tuple(int(i) for i in w): to_scalar(c) for w, c in terms.items()}
        )

    @classmethod
    def zero(cls, m: int, n: int) -> "TruncatedSeries":
        return cls(m, n, {})

    @classmethod
    def one(cls, m: int, n: int) -> "TruncatedSeries":
        return cls(m, n, {(): QQ(1)})

    @classmethod
    def generator(cls, i: int, m: int, n: int) -> "TruncatedSeries":
        """The series X_i."""
        return cls(m, n, {(i,): QQ(1)})

    @classmethod
    def monomial(cls, word: Iterable[int], coeff, m: int, n: int) -> "TruncatedSeries":
        return cls(m, n, {tuple(word): to_scalar(coeff)})

    @property
    def shape(self) -> Tuple[int, int]:
        return self.num_generators, self.truncation_order

    @property
    def constant_term(self) -> Scalar:
        return self.terms.get((), QQ(0))

    def coefficient(self, word: Iterable[int]) -> Scalar:
        return self.terms.get(tuple(word), QQ(0))

    def support(self) -> List[Word]:
        """Support words in graded-lex order."""
        return sorted(self.terms, key=graded_lex_key)

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        return TruncatedSeries(
            self.num_generators,
            self.truncation_order,
            {w: c for w, c in self.terms.items() if len(w) == degree},
        )

    def truncate(self, order: int) -> "TruncatedSeries":
        """Reduces the series modulo words longer than a smaller order."""
        if order > self.truncation_order:
            raise ShapeMismatch(
                f"Cannot raise truncation from {self.truncation_order} to {order}."
            )
        return TruncatedSeries(
            self.num_generators,
            order,
            {w: c for w, c in self.terms.items() if len(w) <= order},
        )

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_add(self, series_scale(QQ(-1), other))

    def __neg__(self) -> "TruncatedSeries":
        return series_scale(QQ(-1), self)

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return cauchy_product(self, other)
        return series_scale(to_scalar(other), self)

    def __rmul__(self, other) -> "TruncatedSeries":
        return series_scale(to_scalar(other), self)

    def __repr__(self) -> str:
        body = " + ".join(
            f"{format_scalar(self.terms[w])}*X{list(w)}" for w in self.support()
        )
        return (
            f"TruncatedSeries(m={self.num_generators}, N={self.truncation_order}, "
            f"{body or '0'})"
        )


def _check_shape(a: TruncatedSeries, b: TruncatedSeries):
    if a.shape != b.shape:
        raise ShapeMismatch(f"Series shapes {a.shape} and {b.shape} differ.")


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Coefficient-wise sum of two series of the same shape."""
    _check_shape(a, b)
    out = dict(a.terms)
    for word, coeff in b.terms.items():
        if word in out:
            out[word] = out[word] + coeff
        else:
            out[word] = coeff
    return TruncatedSeries(a.num_generators, a.truncation_order, out)


def series_scale(scalar: Scalar, a: TruncatedSeries) -> TruncatedSeries:
    """Multiplies every coefficient of a by a scalar."""
    if not scalar:
        return TruncatedSeries.zero(*a.shape)
    if isinstance(scalar, PolyElement):
        # keep the polynomial on the left so mixed products coerce through QQ[l]
        out = {w: scalar * c for w, c in a.terms.items()}
    else:
        out = {w: c * scalar for w, c in a.terms.items()}
    return TruncatedSeries(a.num_generators, a.truncation_order, out)


def _by_degree(a: TruncatedSeries) -> List[List[Tuple[Word, Scalar]]]:
    buckets: List[List[Tuple[Word, Scalar]]] = [[] for _ in range(a.truncation_order + 1)]
    for word, coeff in a.terms.items():
        buckets[len(word)].append((word, coeff))
    return buckets


def scalar_mul(x: Scalar, y: Scalar) -> Scalar:
    if isinstance(y, PolyElement) and not isinstance(x, PolyElement):
        return y * x
    return x * y


def cauchy_product(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Product of two series: (ab)(w) is the sum of a(u)b(v) over all
    splittings w = uv, discarding words longer than the truncation order.
    """
    _check_shape(a, b)
    n = a.truncation_order
    buckets = _by_degree(b)
    out: Dict[Word, Scalar] = {}
    for u, cu in a.terms.items():
        for degree in range(n - len(u) + 1):
            for v, cv in buckets[degree]:
                w = u + v
                term = scalar_mul(cu, cv)
                if w in out:
                    out[w] = out[w] + term
                else:
                    out[w] = term
    return TruncatedSeries(a.num_generators, n, out)


def lie_bracket(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """The commutator bracket [a, b] = ab - ba."""
    return cauchy_product(a, b) - cauchy_product(b, a)


def valuation(a: TruncatedSeries) -> Union[int, float]:
    """Minimal degree of a support word; +inf for the zero series."""
    if not a.terms:
        return math.inf
    return min(len(w) for w in a.terms)


def substitute(p: TruncatedSeries, args: Sequence[TruncatedSeries]) -> TruncatedSeries:
    """Evaluates p at a tuple of series of positive valuation.

    Every word w of p is replaced by the product of the series args[i] for
    the letters i of w. Words longer than the common truncation order of
    the arguments contribute nothing, as each argument has valuation >= 1.

    Args:
        p: Series over m generators.
        args: m series sharing one shape, each with zero constant term.

    Returns:
        TruncatedSeries: The image of p, shaped like the arguments.

    Raises:
        ArityMismatch: If len(args) differs from m.
        ShapeMismatch: If the arguments do not share a shape.
        ValuationZeroArgument: If an argument has a nonzero constant term.
    """
    if len(args) != p.num_generators:
        raise ArityMismatch(
            f"Expected {p.num_generators} arguments for substitution, got {len(args)}."
        )
    for arg in args[1:]:
        _check_shape(args[0], arg)
    for i, arg in enumerate(args):
        if arg.constant_term:
            raise ValuationZeroArgument(f"Argument {i} has a nonzero constant term.")

    m, n = args[0].shape
    images: Dict[Word, TruncatedSeries] = {(): TruncatedSeries.one(m, n)}

    def word_image(word: Word) -> TruncatedSeries:
        if word not in images:
            images[word] = cauchy_product(word_image(word[:-1]), args[word[-1]])
        return images[word]

    out: Dict[Word, Scalar] = {}
    for word in sorted(p.terms, key=graded_lex_key):
        if len(word) > n:
            continue
        coeff = p.terms[word]
        for w, c in word_image(word).terms.items():
            term = scalar_mul(coeff, c)
            out[w] = out[w] + term if w in out else term
    return TruncatedSeries(m, n, out)

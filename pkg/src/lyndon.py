"""
Lyndon words and the free Lie algebra in its Lyndon basis.

The standard bracketing of a Lyndon word w, evaluated at the generators,
is a homogeneous polynomial whose graded-lex smallest word is w itself with
coefficient 1. That triangularity makes the change of basis between Lyndon
coordinates and series form exact, degree by degree.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple, TypeVar, Union

import pandas as pd
from sympy import QQ
from sympy.functions.combinatorial.numbers import mobius
from sympy.ntheory import divisors

from src.algebra_core import (
    Scalar,
    TruncatedSeries,
    Word,
    format_scalar,
    graded_lex_key,
    lie_bracket,
    scalar_mul,
    to_scalar,
)
from src.errors import (
    DegreeExceedsTruncation,
    DegreeOutOfRange,
    EmptyWord,
    NotLieElement,
    NotLyndonWord,
    ShapeMismatch,
    SingleLetter,
    ValuationZero,
)


# A leaf is a generator index, an inner node a pair (left, right).
BracketedWord = Union[int, Tuple["BracketedWord", "BracketedWord"]]
T = TypeVar("T")


def graded_lex_compare(u: Word, v: Word) -> int:
    """Compares two words by degree, then lexicographically.

    Returns:
        int: -1, 0 or 1 as u is less than, equal to or greater than v.
    """
    ku, kv = graded_lex_key(tuple(u)), graded_lex_key(tuple(v))
    return (ku > kv) - (ku < kv)


def is_lyndon(word: Word) -> bool:
    """A word is Lyndon iff it is strictly smaller than each of its proper
    right factors (a proper prefix counts as smaller).

    Raises:
        EmptyWord: For the empty word.
    """
    word = tuple(word)
    if not word:
        raise EmptyWord("The empty word is not a Lyndon word candidate.")
    return all(word < word[i:] for i in range(1, len(word)))


def _duval(m: int, max_degree: int) -> Iterator[Word]:
    # successor generation of all Lyndon words of length <= max_degree, lex order
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        period = len(w)
        while len(w) < max_degree:
            w.append(w[len(w) - period])
        while w and w[-1] == m - 1:
            w.pop()


@lru_cache(maxsize=None)
def enumerate_lyndon(m: int, max_degree: int) -> Tuple[Word, ...]:
    """All Lyndon words over m letters of degree <= max_degree, graded-lex sorted."""
    if m < 1 or max_degree < 1:
        raise ValueError("Need m >= 1 and max_degree >= 1.")
    return tuple(sorted(_duval(m, max_degree), key=graded_lex_key))


def lyndon_dimensions(m: int, max_degree: int) -> pd.Series:
    """Number of Lyndon words per degree, indexed by degree 1..max_degree."""
    degrees = pd.Series([len(w) for w in enumerate_lyndon(m, max_degree)], dtype=int)
    counts = degrees.value_counts().sort_index()
    return counts.reindex(range(1, max_degree + 1), fill_value=0)


def witt_dimension(m: int, degree: int) -> int:
    """Necklace formula for the dimension of the degree-d part of the free
    Lie algebra on m generators: (1/d) sum over e | d of mu(e) m^(d/e).
    """
    total = sum(mobius(e) * m ** (degree // e) for e in divisors(degree))
    return int(total // degree)


def _require_lyndon(word: Word) -> Word:
    word = tuple(word)
    if not is_lyndon(word):
        raise NotLyndonWord(f"{list(word)} is not a Lyndon word.")
    return word


@lru_cache(maxsize=None)
def standard_factorization(word: Word) -> Tuple[Word, Word]:
    """Splits a Lyndon word w = uv with v its longest proper Lyndon right factor.

    Raises:
        SingleLetter: If w has degree 1.
    """
    word = _require_lyndon(word)
    if len(word) < 2:
        raise SingleLetter(f"{list(word)} has no standard factorization.")
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise NotLyndonWord(f"{list(word)} has no Lyndon right factor.")


@lru_cache(maxsize=None)
def bracketing(word: Word) -> BracketedWord:
    """The standard bracketing of a Lyndon word, as a nested pair tree."""
    word = _require_lyndon(word)
    if len(word) == 1:
        return word[0]
    u, v = standard_factorization(word)
    return bracketing(u), bracketing(v)


def foliage(tree: BracketedWord) -> Word:
    """Leaves of a bracketed word, left to right."""
    if isinstance(tree, int):
        return (tree,)
    return foliage(tree[0]) + foliage(tree[1])


def format_bracketing(tree: BracketedWord) -> str:
    if isinstance(tree, int):
        return str(tree)
    return f"({format_bracketing(tree[0])} {format_bracketing(tree[1])})"


def evaluate_tree(
    tree: BracketedWord,
    args: List[T],
    combine: Callable[[T, T], T],
    cache: Optional[Dict[BracketedWord, T]] = None,
) -> T:
    """Structural recursion on a bracketed word: leaves read args, inner
    nodes apply combine (a bracket, a group commutator, ...).
    """
    if cache is not None and tree in cache:
        return cache[tree]
    if isinstance(tree, int):
        value = args[tree]
    else:
        value = combine(
            evaluate_tree(tree[0], args, combine, cache),
            evaluate_tree(tree[1], args, combine, cache),
        )
    if cache is not None:
        cache[tree] = value
    return value


def bracket_trees(m: int, rank: int) -> Iterator[BracketedWord]:
    """All non-associative words over m letters with exactly rank leaves."""
    if rank == 1:
        yield from range(m)
        return
    for left_rank in range(1, rank):
        for left in bracket_trees(m, left_rank):
            for right in bracket_trees(m, rank - left_rank):
                yield (left, right)


@lru_cache(maxsize=None)
def _bracket_polynomial(word: Word) -> Tuple[Tuple[Word, int], ...]:
    # integer expansion of the standard bracketing; homogeneous of degree len(word)
    if len(word) == 1:
        return ((word, 1),)
    u, v = standard_factorization(word)
    left, right = dict(_bracket_polynomial(u)), dict(_bracket_polynomial(v))
    out: Dict[Word, int] = {}
    for a, ca in left.items():
        for b, cb in right.items():
            out[a + b] = out.get(a + b, 0) + ca * cb
            out[b + a] = out.get(b + a, 0) - ca * cb
    return tuple((w, c) for w, c in sorted(out.items()) if c)


def lyndon_bracket_series(
    word: Word, n: int, m: Optional[int] = None
) -> TruncatedSeries:
    """Evaluates the standard bracketing of a Lyndon word at the generators.

    Args:
        word: A Lyndon word.
        n: Truncation order of the result.
        m: Number of generators (defaults to the largest letter + 1).

    Raises:
        DegreeExceedsTruncation: If the word is longer than n.
    """
    word = _require_lyndon(word)
    if len(word) > n:
        raise DegreeExceedsTruncation(
            f"Lyndon word {list(word)} exceeds truncation order {n}."
        )
    m = max(word) + 1 if m is None else m
    return TruncatedSeries(m, n, {w: QQ(c) for w, c in _bracket_polynomial(word)})


@dataclass(frozen=True)
class LieElement:
    """An element of the truncated free Lie algebra in Lyndon coordinates."""

    num_generators: int
    truncation_order: int
    coords: Mapping[Word, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        m, n = self.num_generators, self.truncation_order
        if m < 1 or n < 1:
            raise ShapeMismatch(f"Invalid Lie algebra shape ({m}, {n}).")
        clean: Dict[Word, Scalar] = {}
        for word, coeff in self.coords.items():
            if len(word) > n:
                raise DegreeExceedsTruncation(
                    f"Lyndon word {list(word)} exceeds truncation order {n}."
                )
            if any(letter < 0 or letter >= m for letter in word):
                raise ShapeMismatch(f"Word {list(word)} leaves the alphabet of size {m}.")
            _require_lyndon(word)
            if coeff:
                clean[word] = coeff
        object.__setattr__(self, "coords", clean)

    @classmethod
    def from_coords(cls, m: int, n: int, coords: Mapping) -> "LieElement":
        return cls(m, n, {tuple(int(i) for i in w): to_scalar(c) for w, c in coords.items()})

    @classmethod
    def zero(cls, m: int, n: int) -> "LieElement":
        return cls(m, n, {})

    @classmethod
    def generator(cls, i: int, m: int, n: int) -> "LieElement":
        return cls(m, n, {(i,): QQ(1)})

    @property
    def shape(self) -> Tuple[int, int]:
        return self.num_generators, self.truncation_order

    def words(self) -> List[Word]:
        """Coordinate words in graded-lex order."""
        return sorted(self.coords, key=graded_lex_key)

    def is_zero(self) -> bool:
        return not self.coords

    def to_series(self) -> TruncatedSeries:
        return lie_to_series(self)

    def scale(self, scalar) -> "LieElement":
        scalar = to_scalar(scalar)
        return LieElement(
            *self.shape, {w: scalar_mul(scalar, c) for w, c in self.coords.items()}
        )

    def bracket(self, other: "LieElement") -> "LieElement":
        return lie_element_bracket(self, other)

    def __add__(self, other: "LieElement") -> "LieElement":
        if self.shape != other.shape:
            raise ShapeMismatch(f"Lie element shapes {self.shape} and {other.shape} differ.")
        out = dict(self.coords)
        for word, coeff in other.coords.items():
            out[word] = out[word] + coeff if word in out else coeff
        return LieElement(*self.shape, out)

    def __neg__(self) -> "LieElement":
        return self.scale(-1)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __repr__(self) -> str:
        body = " + ".join(
            f"{format_scalar(self.coords[w])}*{format_bracketing(bracketing(w))}"
            for w in self.words()
        )
        return (
            f"LieElement(m={self.num_generators}, N={self.truncation_order}, "
            f"{body or '0'})"
        )


def lie_to_series(element: LieElement) -> TruncatedSeries:
    """Sum of coordinate times standard bracketing series."""
    m, n = element.shape
    out: Dict[Word, Scalar] = {}
    for word, coeff in element.coords.items():
        for w, c in _bracket_polynomial(word):
            term = coeff * c
            out[w] = out[w] + term if w in out else term
    return TruncatedSeries(m, n, out)


def series_to_lie(p: TruncatedSeries) -> LieElement:
    """Reads Lyndon coordinates off a series by triangular elimination.

    Within each degree the graded-lex smallest remaining word must be
    Lyndon; its coefficient becomes the coordinate and the corresponding
    bracketing series is subtracted, which clears that word and touches
    only larger words of the same degree.

    Raises:
        ValuationZero: If p has a nonzero constant term.
        NotLieElement: If a residual word cannot be eliminated.
    """
    if p.constant_term:
        raise ValuationZero("A Lie element has no constant term.")
    by_degree: Dict[int, Dict[Word, Scalar]] = {}
    for word, coeff in p.terms.items():
        by_degree.setdefault(len(word), {})[word] = coeff

    coords: Dict[Word, Scalar] = {}
    for degree in sorted(by_degree):
        residual = by_degree[degree]
        while residual:
            word = min(residual)
            if not is_lyndon(word):
                raise NotLieElement(
                    f"Residual word {list(word)} of degree {degree} is not Lyndon."
                )
            coeff = residual[word]
            coords[word] = coeff
            for w, c in _bracket_polynomial(word):
                value = residual.get(w, 0) - coeff * c
                if value:
                    residual[w] = value
                else:
                    residual.pop(w, None)
    return LieElement(p.num_generators, p.truncation_order, coords)


def lie_element_bracket(a: LieElement, b: LieElement) -> LieElement:
    """The Lie bracket of two Lie elements, computed through series form."""
    if a.shape != b.shape:
        raise ShapeMismatch(f"Lie element shapes {a.shape} and {b.shape} differ.")
    return series_to_lie(lie_bracket(lie_to_series(a), lie_to_series(b)))


def exp_ad(a: LieElement, b: LieElement) -> LieElement:
    """exp(ad_a)(b) = sum over i of ad_a^i(b) / i!, finite under truncation."""
    if a.shape != b.shape:
        raise ShapeMismatch(f"Lie element shapes {a.shape} and {b.shape} differ.")
    total, term, i = b, b, 1
    while not term.is_zero():
        term = lie_element_bracket(a, term).scale(QQ(1, i))
        total = total + term
        i += 1
    return total


def graded_component(element: LieElement, degree: int) -> LieElement:
    """Restriction of the coordinates to Lyndon words of one degree.

    Raises:
        DegreeOutOfRange: Unless 1 <= degree <= N.
    """
    if not 1 <= degree <= element.truncation_order:
        raise DegreeOutOfRange(
            f"Degree {degree} outside 1..{element.truncation_order}."
        )
    return LieElement(
        *element.shape, {w: c for w, c in element.coords.items() if len(w) == degree}
    )

"""
Commutator collection: the unique ordered decomposition of a group-like
element into rational powers of Lyndon commutators, the formulas it yields
for exp(X0 + X1) and exp([X0, X1]), mixed-term compilation and the
Hall-Petresco words.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

from sympy import QQ

from src.algebra_core import (
    LAMBDA,
    Scalar,
    TruncatedSeries,
    Word,
    binomial_poly,
    format_scalar,
    graded_lex_key,
    series_scale,
    to_scalar,
)
from src.errors import (
    ArityMismatch,
    EngineBug,
    InvalidDecomposition,
    NonConvergence,
    NotGroupLike,
    NotLieElement,
    NotLyndonWord,
    ShapeMismatch,
    TruncationTooSmall,
)
from src.exp_log import (
    GroupElement,
    bch,
    commutator_word,
    exp,
    free_generators,
    group_commutator,
    group_inv,
    group_mul,
    group_power,
    log,
)
from src.lyndon import (
    BracketedWord,
    LieElement,
    bracketing,
    enumerate_lyndon,
    is_lyndon,
    lie_element_bracket,
    series_to_lie,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


# Decompositions


@dataclass(frozen=True)
class MlsDecomposition:
    """An ordered product of Lyndon commutator powers.

    Words are strictly increasing in the graded-lex order and no exponent
    is zero.
    """

    factors: Tuple[Tuple[Word, Scalar], ...] = ()

    def __post_init__(self):
        factors = tuple((tuple(w), to_scalar(e)) for w, e in self.factors)
        for word, exponent in factors:
            if not is_lyndon(word):
                raise NotLyndonWord(f"Factor word {list(word)} is not Lyndon.")
            if not exponent:
                raise InvalidDecomposition(f"Factor {list(word)} has a zero exponent.")
        for (u, _), (v, _) in zip(factors, factors[1:]):
            if graded_lex_key(u) >= graded_lex_key(v):
                raise InvalidDecomposition(
                    f"Factor words {list(u)} and {list(v)} are not strictly increasing."
                )
        object.__setattr__(self, "factors", factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def words(self) -> List[Word]:
        return [w for w, _ in self.factors]

    def exponent(self, word: Word) -> Scalar:
        return dict(self.factors).get(tuple(word), QQ(0))


@lru_cache(maxsize=None)
def _commutator_log(word: Word, m: int, n: int) -> TruncatedSeries:
    # log of the Lyndon commutator of exp X_i; leading term is the bracket series of word
    return log(commutator_word(bracketing(word), free_generators(m, n)))


def commutator_power(word: Word, exponent: Scalar, m: int, n: int) -> GroupElement:
    """The factor (w(0)[exp X])^exponent of a decomposition."""
    return exp(series_scale(to_scalar(exponent), _commutator_log(word, m, n)))


def collect(q: GroupElement) -> MlsDecomposition:
    """Collects a group-like element into Lyndon commutator powers.

    Each step reads the Lyndon coordinates of log(q), takes the
    graded-lex smallest coordinate word u with coefficient c and replaces
    q by (u-commutator)^(-c) q. The smallest word strictly grows, so the
    loop ends after at most one step per Lyndon word of degree <= N.

    Raises:
        NotGroupLike: If log(q) is not a Lie element.
    """
    m, n = q.shape
    try:
        coords = series_to_lie(log(q)).coords
    except NotLieElement as err:
        raise NotGroupLike(f"log of the input is not a Lie element: {err}") from err

    budget = len(enumerate_lyndon(m, n)) + 1
    factors: List[Tuple[Word, Scalar]] = []
    current = q
    while coords:
        if len(factors) >= budget:
            raise NonConvergence(f"Collection did not finish in {budget} steps.")
        word = min(coords, key=graded_lex_key)
        exponent = coords[word]
        logger.debug("Collected factor %s with exponent %s", list(word), format_scalar(exponent))
        factors.append((word, exponent))
        current = group_mul(commutator_power(word, -exponent, m, n), current)
        try:
            coords = series_to_lie(log(current)).coords
        except NotLieElement as err:
            raise EngineBug(f"Collection left the group-like elements: {err}") from err
        if coords and graded_lex_key(min(coords, key=graded_lex_key)) <= graded_lex_key(word):
            raise NonConvergence(f"Smallest word did not grow past {list(word)}.")
    return MlsDecomposition(tuple(factors))


def expand(decomposition: MlsDecomposition, m: int, n: int) -> GroupElement:
    """Multiplies out a decomposition left to right over exp X_0..exp X_(m-1).

    Raises:
        ShapeMismatch: If a factor word leaves the alphabet or the truncation.
    """
    result = GroupElement.identity(m, n)
    for word, exponent in decomposition:
        if len(word) > n or max(word) >= m:
            raise ShapeMismatch(
                f"Factor word {list(word)} does not fit {m} generators at order {n}."
            )
        result = group_mul(result, commutator_power(word, exponent, m, n))
    return result


def mls_sum_formula(n: int, num_terms: int = 2) -> MlsDecomposition:
    """collect(exp(X_0 + ... + X_(J-1))) at truncation n."""
    total = TruncatedSeries.zero(num_terms, n)
    for i in range(num_terms):
        total = total + TruncatedSeries.generator(i, num_terms, n)
    return collect(exp(total))


def mls_bracket_formula(n: int) -> MlsDecomposition:
    """collect(exp([X0, X1])) at truncation n.

    Raises:
        TruncationTooSmall: If n < 2.
    """
    if n < 2:
        raise TruncationTooSmall(f"exp([X0, X1]) needs truncation >= 2, got {n}.")
    x0, x1 = TruncatedSeries.generator(0, 2, n), TruncatedSeries.generator(1, 2, n)
    return collect(exp(x0 * x1 - x1 * x0))


# Mixed terms


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Add:
    left: "MixedTerm"
    right: "MixedTerm"


@dataclass(frozen=True)
class Bracket:
    left: "MixedTerm"
    right: "MixedTerm"


@dataclass(frozen=True)
class Star:
    left: "MixedTerm"
    right: "MixedTerm"


@dataclass(frozen=True)
class Scale:
    scalar: Scalar
    term: "MixedTerm"


MixedTerm = Union[Var, Zero, Add, Bracket, Star, Scale]


def star(*terms: MixedTerm) -> MixedTerm:
    """Left-folded group product t0 * t1 * ..."""
    if not terms:
        return Zero()
    result = terms[0]
    for term in terms[1:]:
        result = Star(result, term)
    return result


def term_variables(term: MixedTerm) -> int:
    """One more than the largest variable index in the term, 0 if none."""
    if isinstance(term, Var):
        return term.index + 1
    if isinstance(term, Zero):
        return 0
    if isinstance(term, Scale):
        return term_variables(term.term)
    return max(term_variables(term.left), term_variables(term.right))


class TermOperations(NamedTuple):
    """Interpretation of the mixed-term signature in some structure."""

    zero: Callable[[], T]
    add: Callable[[T, T], T]
    bracket: Callable[[T, T], T]
    star: Callable[[T, T], T]
    scale: Callable[[Scalar, T], T]


def evaluate_term(term: MixedTerm, args: Sequence[T], ops: TermOperations) -> T:
    if isinstance(term, Var):
        if not 0 <= term.index < len(args):
            raise ArityMismatch(f"Variable x{term.index} with only {len(args)} arguments.")
        return args[term.index]
    if isinstance(term, Zero):
        return ops.zero()
    if isinstance(term, Scale):
        return ops.scale(term.scalar, evaluate_term(term.term, args, ops))
    left = evaluate_term(term.left, args, ops)
    right = evaluate_term(term.right, args, ops)
    if isinstance(term, Add):
        return ops.add(left, right)
    if isinstance(term, Bracket):
        return ops.bracket(left, right)
    return ops.star(left, right)


def term_to_lie(term: MixedTerm, n: int, num_generators: Optional[int] = None) -> LieElement:
    """The free Lie element of a mixed term: + is addition, [.,.] the bracket,
    * the BCH product and scalars act by scaling.

    Raises:
        ArityMismatch: If a variable index is outside the generators.
    """
    m = num_generators if num_generators is not None else max(term_variables(term), 1)
    ops = TermOperations(
        zero=lambda: LieElement.zero(m, n),
        add=lambda a, b: a + b,
        bracket=lie_element_bracket,
        star=bch,
        scale=lambda s, a: a.scale(s),
    )
    return evaluate_term(term, [LieElement.generator(i, m, n) for i in range(m)], ops)


# Group words


@dataclass(frozen=True)
class GUnit:
    pass


@dataclass(frozen=True)
class GVar:
    index: int


@dataclass(frozen=True)
class GMul:
    left: "GroupWord"
    right: "GroupWord"


@dataclass(frozen=True)
class GInv:
    arg: "GroupWord"


@dataclass(frozen=True)
class GPow:
    base: "GroupWord"
    exponent: Scalar


@dataclass(frozen=True)
class GComm:
    left: "GroupWord"
    right: "GroupWord"


GroupWord = Union[GUnit, GVar, GMul, GInv, GPow, GComm]


class GroupOperations(NamedTuple):
    """Interpretation of the group-word signature."""

    unit: Callable[[], T]
    mul: Callable[[T, T], T]
    inv: Callable[[T], T]
    power: Callable[[T, Scalar], T]
    comm: Callable[[T, T], T]


def series_group_operations(m: int, n: int) -> GroupOperations:
    """Group operations of the truncated group-like series."""
    return GroupOperations(
        unit=lambda: GroupElement.identity(m, n),
        mul=group_mul,
        inv=group_inv,
        power=group_power,
        comm=group_commutator,
    )


def _tree_to_group_word(tree: BracketedWord) -> GroupWord:
    if isinstance(tree, int):
        return GVar(tree)
    return GComm(_tree_to_group_word(tree[0]), _tree_to_group_word(tree[1]))


def group_word_from_decomposition(decomposition: MlsDecomposition) -> GroupWord:
    """Reads a decomposition as a product of commutator-word powers."""
    result: GroupWord = GUnit()
    for word, exponent in decomposition:
        factor = _tree_to_group_word(bracketing(word))
        if exponent != 1:
            factor = GPow(factor, exponent)
        result = factor if isinstance(result, GUnit) else GMul(result, factor)
    return result


def format_group_word(word: GroupWord) -> str:
    """Renders x0 * x1 * comm(x0,x1)^(-1/2) style text."""
    if isinstance(word, GUnit):
        return "1"
    if isinstance(word, GVar):
        return f"x{word.index}"
    if isinstance(word, GMul):
        return f"{format_group_word(word.left)} * {format_group_word(word.right)}"
    if isinstance(word, GComm):
        return f"comm({format_group_word(word.left)},{format_group_word(word.right)})"
    if isinstance(word, GInv):
        return f"{_atom(word.arg)}^(-1)"
    return f"{_atom(word.base)}^({format_scalar(word.exponent)})"


def _atom(word: GroupWord) -> str:
    text = format_group_word(word)
    return f"({text})" if isinstance(word, (GMul, GPow, GInv)) else text


def evaluate_group_word(word: GroupWord, args: Sequence[T], ops: GroupOperations) -> T:
    """Evaluates a group word with the given group operations."""
    if isinstance(word, GUnit):
        return ops.unit()
    if isinstance(word, GVar):
        if not 0 <= word.index < len(args):
            raise ArityMismatch(f"Variable x{word.index} with only {len(args)} arguments.")
        return args[word.index]
    if isinstance(word, GInv):
        return ops.inv(evaluate_group_word(word.arg, args, ops))
    if isinstance(word, GPow):
        return ops.power(evaluate_group_word(word.base, args, ops), word.exponent)
    left = evaluate_group_word(word.left, args, ops)
    right = evaluate_group_word(word.right, args, ops)
    if isinstance(word, GMul):
        return ops.mul(left, right)
    return ops.comm(left, right)


def lie_term_truncations(
    term: MixedTerm, c: int, num_generators: Optional[int] = None
) -> Tuple[LieElement, GroupWord]:
    """Normal forms of a mixed term valid in every model of class < c.

    Returns:
        Tuple[LieElement, GroupWord]: The Lie element of the term modulo
            degree >= c, and a group word built from the collected
            decomposition of its exponential.
    """
    if c < 1:
        raise TruncationTooSmall(f"Nilpotency bound must be >= 1, got {c}.")
    m = num_generators if num_generators is not None else max(term_variables(term), 1)
    if c == 1:
        return LieElement.zero(m, 1), GUnit()
    lie_part = term_to_lie(term, c - 1, m)
    decomposition = collect(exp(lie_part))
    return lie_part, group_word_from_decomposition(decomposition)


# Hall-Petresco


def _product(elements: Sequence[GroupElement]) -> GroupElement:
    result = GroupElement.identity(*elements[0].shape)
    for element in elements:
        result = group_mul(result, element)
    return result


def hall_petresco_tau(n: int, c: int) -> List[GroupElement]:
    """The Hall-Petresco words tau_2..tau_c over n generators at truncation c.

    Computed by specializing the exponent to m = 2..c:
    tau_m = [(x0..x_(n-1))^m tau_2^C(m,2) .. tau_(m-1)^C(m,m-1)]^-1 x0^m..x_(n-1)^m.

    Raises:
        EngineBug: If some tau_m has logarithm of valuation < m.
    """
    if n < 2 or c < 2:
        raise TruncationTooSmall(f"Hall-Petresco words need n >= 2 and c >= 2, got {n}, {c}.")
    generators = free_generators(n, c)
    product = _product(generators)
    taus: List[GroupElement] = []
    for m in range(2, c + 1):
        rhs = group_power(product, m)
        for i, tau in enumerate(taus, start=2):
            rhs = group_mul(rhs, group_power(tau, comb(m, i)))
        lhs = _product([group_power(g, m) for g in generators])
        tau_m = group_mul(group_inv(rhs), lhs)
        support = log(tau_m).support()
        if support and len(support[0]) < m:
            raise EngineBug(f"tau_{m} has logarithm of valuation {len(support[0])} < {m}.")
        logger.debug("tau_%d has %d log terms", m, len(support))
        taus.append(tau_m)
    return taus


def verify_hall_petresco(n: int, c: int, taus: Optional[Sequence[GroupElement]] = None) -> bool:
    """Checks x0^l..x_(n-1)^l = (x0..x_(n-1))^l tau_2^C(l,2)..tau_c^C(l,c)
    with l a polynomial variable.

    Args:
        n: Number of generators.
        c: Truncation class.
        taus: Precomputed hall_petresco_tau(n, c), if the caller has them.
    """
    if taus is None:
        taus = hall_petresco_tau(n, c)
    generators = free_generators(n, c)
    lhs = _product([group_power(g, LAMBDA) for g in generators])
    rhs = group_power(_product(generators), LAMBDA)
    for i, tau in enumerate(taus, start=2):
        rhs = group_mul(rhs, group_power(tau, binomial_poly(i)))
    return lhs == rhs

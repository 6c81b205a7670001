"""
Exponential and logarithm in truncation, the group 1 + m they induce,
its rational power map and the Baker-Campbell-Hausdorff product.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple, Union

from sympy import QQ

from src.algebra_core import (
    Scalar,
    TruncatedSeries,
    cauchy_product,
    series_scale,
    to_scalar,
)
from src.errors import (
    ConstantTermNotOne,
    EngineBug,
    NotLieElement,
    ShapeMismatch,
    ValuationZero,
)
from src.lyndon import BracketedWord, LieElement, evaluate_tree, lie_to_series, series_to_lie

logger = logging.getLogger(__name__)

LieLike = Union[LieElement, TruncatedSeries]


@dataclass(frozen=True)
class GroupElement:
    """A truncated series with constant term 1."""

    series: TruncatedSeries

    def __post_init__(self):
        if self.series.constant_term != 1:
            raise ConstantTermNotOne(
                "A group element must have constant term 1, got "
                f"{self.series.constant_term}."
            )

    @classmethod
    def identity(cls, m: int, n: int) -> "GroupElement":
        return cls(TruncatedSeries.one(m, n))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.series.shape

    def is_identity(self) -> bool:
        return self.series == TruncatedSeries.one(*self.shape)

    def inverse(self) -> "GroupElement":
        return group_inv(self)

    def log(self) -> TruncatedSeries:
        return log(self)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return group_mul(self, other)

    def __pow__(self, exponent) -> "GroupElement":
        return group_power(self, exponent)


def _as_series(value: LieLike) -> TruncatedSeries:
    if isinstance(value, LieElement):
        return lie_to_series(value)
    return value


def _powers(x: TruncatedSeries):
    # x, x^2, ... until the truncation kills the power
    power = x
    k = 1
    while not power.is_zero():
        yield k, power
        power = cauchy_product(power, x)
        k += 1


def exp(epsilon: LieLike) -> GroupElement:
    """The exponential series 1 + e + e^2/2! + ... truncated at N.

    Raises:
        ValuationZero: If the argument has a nonzero constant term.
    """
    epsilon = _as_series(epsilon)
    if epsilon.constant_term:
        raise ValuationZero("exp needs an argument of valuation >= 1.")
    total = TruncatedSeries.one(*epsilon.shape)
    for k, power in _powers(epsilon):
        total = total + series_scale(QQ(1, math.factorial(k)), power)
    return GroupElement(total)


def log(g: GroupElement) -> TruncatedSeries:
    """The logarithm sum of (-1)^(n+1)/n (g - 1)^n, inverse to exp."""
    x = g.series - TruncatedSeries.one(*g.shape)
    total = TruncatedSeries.zero(*g.shape)
    for k, power in _powers(x):
        total = total + series_scale(QQ((-1) ** (k + 1), k), power)
    return total


def group_mul(f: GroupElement, g: GroupElement) -> GroupElement:
    if f.shape != g.shape:
        raise ShapeMismatch(f"Group element shapes {f.shape} and {g.shape} differ.")
    return GroupElement(cauchy_product(f.series, g.series))


def group_inv(g: GroupElement) -> GroupElement:
    """Geometric series 1 - x + x^2 - ... for g = 1 + x."""
    x = g.series - TruncatedSeries.one(*g.shape)
    total = TruncatedSeries.one(*g.shape)
    for k, power in _powers(x):
        total = total + (power if k % 2 == 0 else -power)
    return GroupElement(total)


def group_power(g: GroupElement, exponent) -> GroupElement:
    """g^exponent = exp(exponent * log g); exponent may be a polynomial in l."""
    exponent: Scalar = to_scalar(exponent)
    return exp(series_scale(exponent, log(g)))


def group_commutator(f: GroupElement, g: GroupElement) -> GroupElement:
    """The commutator f^-1 g^-1 f g."""
    if f.shape != g.shape:
        raise ShapeMismatch(f"Group element shapes {f.shape} and {g.shape} differ.")
    return group_inv(f) * group_inv(g) * f * g


def bch(a: LieLike, b: LieLike) -> LieElement:
    """The Baker-Campbell-Hausdorff product log(exp a exp b) in Lyndon
    coordinates.

    Args:
        a: Lie element or series of valuation >= 1.
        b: Same shape as a.

    Returns:
        LieElement: a + b + 1/2 [a, b] + ... truncated at N.

    Raises:
        ShapeMismatch: If a and b differ in shape.
        ValuationZero: If either argument has a constant term.
        EngineBug: If the logarithm fails to be a Lie element.
    """
    a, b = _as_series(a), _as_series(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"BCH arguments have shapes {a.shape} and {b.shape}.")
    product = log(exp(a) * exp(b))
    try:
        return series_to_lie(product)
    except NotLieElement as err:
        raise EngineBug(f"log(exp(a) exp(b)) is not a Lie element: {err}") from err


def free_generators(m: int, n: int) -> Tuple[GroupElement, ...]:
    """The group generators exp(X_i) of the truncated free group-like elements."""
    return _free_generators(m, n)


@lru_cache(maxsize=None)
def _free_generators(m: int, n: int) -> Tuple[GroupElement, ...]:
    return tuple(exp(TruncatedSeries.generator(i, m, n)) for i in range(m))


def commutator_word(tree: BracketedWord, args: Sequence[GroupElement]) -> GroupElement:
    """Evaluates a bracketed word with group commutators at the arguments."""
    return evaluate_tree(tree, list(args), group_commutator, {})


@lru_cache(maxsize=None)
def bch_generators(n: int) -> LieElement:
    """bch(X0, X1) on two generators at truncation n, memoized per order."""
    logger.debug("Computing bch(X0, X1) at truncation %d", n)
    return bch(TruncatedSeries.generator(0, 2, n), TruncatedSeries.generator(1, 2, n))



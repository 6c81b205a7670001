import math
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from src.algebra_core import TruncatedSeries, lie_bracket
from src.lyndon import LieElement, enumerate_lyndon
from src.nilpotent_models import abelian_algebra, free_nilpotent_algebra, heisenberg_algebra

settings.register_profile("engine", deadline=None, max_examples=25)
settings.load_profile("engine")


# Strategies


def rationals(bound: int = 5):
    return st.fractions(min_value=-bound, max_value=bound, max_denominator=bound)


def words(m: int, n: int, min_degree: int = 0):
    return [w for d in range(min_degree, n + 1) for w in product(range(m), repeat=d)]


def series_strategy(m: int = 2, n: int = 3, min_degree: int = 0, max_size: int = 6):
    return st.dictionaries(
        st.sampled_from(words(m, n, min_degree)), rationals(), max_size=max_size
    ).map(lambda terms: TruncatedSeries.from_terms(m, n, terms))


def lie_strategy(m: int = 2, n: int = 3, max_size: int = 4):
    return st.dictionaries(
        st.sampled_from(enumerate_lyndon(m, n)), rationals(), max_size=max_size
    ).map(lambda coords: LieElement.from_coords(m, n, coords))


# Oracles


def brute_force_lyndon(m: int, max_degree: int):
    """Words strictly smaller than every nontrivial rotation of themselves."""
    return {
        w
        for w in words(m, max_degree, 1)
        if all(w < w[i:] + w[:i] for i in range(1, len(w)))
    }


def left_normed(word, m: int, n: int) -> TruncatedSeries:
    """[...[X_a1, X_a2], ..., X_ad] as a series."""
    result = TruncatedSeries.generator(word[0], m, n)
    for letter in word[1:]:
        result = lie_bracket(result, TruncatedSeries.generator(letter, m, n))
    return result


def dynkin_is_lie(p: TruncatedSeries, degree: int) -> bool:
    """A homogeneous p of degree d >= 1 is a Lie polynomial iff the
    left-normed bracketing map sends it to d * p."""
    m, n = p.shape
    image = TruncatedSeries.zero(m, n)
    for word, coeff in p.terms.items():
        image = image + left_normed(word, m, n) * coeff
    return image == p * degree


def _fraction_product(a, b, n):
    out = {}
    for u, cu in a.items():
        for v, cv in b.items():
            if len(u) + len(v) <= n:
                out[u + v] = out.get(u + v, 0) + cu * cv
    return {w: c for w, c in out.items() if c}


def associative_bch(n: int) -> TruncatedSeries:
    """log(exp X0 exp X1) expanded with Fractions in the associative algebra."""
    exp0 = {(0,) * k: Fraction(1, math.factorial(k)) for k in range(n + 1)}
    exp1 = {(1,) * k: Fraction(1, math.factorial(k)) for k in range(n + 1)}
    x = _fraction_product(exp0, exp1, n)
    x.pop((), None)
    total, power = {}, dict(x)
    for k in range(1, n + 1):
        for w, c in power.items():
            total[w] = total.get(w, 0) + Fraction((-1) ** (k + 1), k) * c
        power = _fraction_product(power, x, n)
    return TruncatedSeries.from_terms(2, n, total)


# Models


@pytest.fixture(scope="session")
def heisenberg():
    return heisenberg_algebra()


@pytest.fixture(scope="session")
def free_class_3():
    return free_nilpotent_algebra(2, 3)


@pytest.fixture(scope="session")
def abelian_4():
    return abelian_algebra(4)

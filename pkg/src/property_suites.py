"""Seeded randomized verification suites and their summary report.

Every suite draws its cases from np.random.default_rng(seed), so a run is
reproducible from its seed alone. A suite records one row per checked
property and case; the report aggregates the rows per property.
"""

import logging
from itertools import product
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from sympy import QQ

from src.algebra_core import (
    TruncatedSeries,
    cauchy_product,
    lie_bracket,
    series_scale,
    substitute,
    valuation,
)
from src.collection import (
    collect,
    expand,
    hall_petresco_tau,
    term_to_lie,
    verify_hall_petresco,
)
from src.errors import PropertyFailure, SingularEquation
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
    LieElement,
    bracket_trees,
    enumerate_lyndon,
    exp_ad,
    format_bracketing,
    is_lyndon,
    lie_to_series,
    lyndon_bracket_series,
    lyndon_dimensions,
    series_to_lie,
    witt_dimension,
)
from src.nilpotent_models import (
    abelian_algebra,
    evaluate_lie,
    free_nilpotent_algebra,
    gr_mul,
    gr_power,
    group_equation_residual,
    group_lcs,
    heisenberg_algebra,
    is_zero_vector,
    lie_from_group_ops,
    model_vector,
    solve_equation_layered,
    solve_group_equation,
    group_equation_term,
    vectors_equal,
)

logger = logging.getLogger(__name__)

SUITES = ("ring", "eg-axioms", "bch", "collect", "hall-petresco", "functor", "solver", "lyndon")

DESCRIPTIONS = {
    "ring": "Associativity, distributivity, valuation additivity and substitution associativity of truncated series.",
    "eg-axioms": "Exponential group axioms for truncated group-like series and for the BCH groups of models.",
    "bch": "BCH homomorphism, associativity, low-order terms and exp(ad a)(b) = a * b * (-a).",
    "collect": "Collection round trip, ordering of factors and commutator valuation growth.",
    "hall-petresco": "Hall-Petresco identities with a polynomial exponent.",
    "functor": "Lie algebra and lower central series recovered from model group operations.",
    "solver": "Non-singular equations in models: unit residual and agreement of two solvers.",
    "lyndon": "Lyndon enumeration, necklace counts, triangularity and the coordinate round trip.",
}


# Random cases


def random_rational(rng: np.random.Generator, bound: int = 20):
    return QQ(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def random_series(
    rng: np.random.Generator, m: int, n: int, min_degree: int = 1, density: float = 0.5
) -> TruncatedSeries:
    terms = {}
    for degree in range(min_degree, n + 1):
        for word in product(range(m), repeat=degree):
            if rng.random() < density:
                terms[word] = random_rational(rng)
    return TruncatedSeries(m, n, terms)


def random_lie(
    rng: np.random.Generator, m: int, n: int, min_degree: int = 1, density: float = 0.6
) -> LieElement:
    coords = {
        w: random_rational(rng)
        for w in enumerate_lyndon(m, n)
        if len(w) >= min_degree and rng.random() < density
    }
    return LieElement(m, n, coords)


def random_group(rng: np.random.Generator, m: int, n: int) -> GroupElement:
    return exp(random_lie(rng, m, n))


def random_vector(rng: np.random.Generator, dimension: int, bound: int = 5):
    return model_vector([random_rational(rng, bound) for _ in range(dimension)])


class Recorder:
    """Collects one row per property check."""

    def __init__(self):
        self.rows: List[Dict] = []

    def check(self, prop: str, case: int, passed: bool, detail: str = ""):
        if not passed:
            logger.warning("Property %s failed on case %d: %s", prop, case, detail)
        self.rows.append({"property": prop, "case": case, "passed": bool(passed), "detail": detail})


# Suites


def _ring_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    m, order = 2, n
    for case in range(cases):
        a, b, d = (random_series(rng, m, order, min_degree=0, density=0.4) for _ in range(3))
        rec.check(
            "associativity",
            case,
            cauchy_product(cauchy_product(a, b), d) == cauchy_product(a, cauchy_product(b, d)),
        )
        rec.check(
            "distributivity",
            case,
            cauchy_product(a, b + d) == cauchy_product(a, b) + cauchy_product(a, d),
        )
        x = random_series(rng, m, order, min_degree=int(rng.integers(0, order)) + 1)
        y = random_series(rng, m, order, min_degree=int(rng.integers(0, order)) + 1)
        vx, vy, vxy = valuation(x), valuation(y), valuation(cauchy_product(x, y))
        expected = vx + vy if vx + vy <= order else float("inf")
        rec.check("valuation", case, vxy == expected, f"val {vx}, {vy} gave {vxy}")
        p = random_series(rng, m, order, min_degree=0, density=0.3)
        qs = [random_series(rng, m, order, density=0.3) for _ in range(m)]
        rs = [random_series(rng, m, order, density=0.3) for _ in range(m)]
        rec.check(
            "substitution-associativity",
            case,
            substitute(substitute(p, qs), rs) == substitute(p, [substitute(q, rs) for q in qs]),
        )


def _eg_axioms_in(rec: Recorder, case: int, tag: str, g, h, lam, mu, ops):
    mul, inv, power, equal = ops
    rec.check(f"EG1 {tag}", case, equal(power(g, 1), g))
    rec.check(f"EG2 {tag}", case, equal(power(g, lam + mu), mul(power(g, lam), power(g, mu))))
    rec.check(f"EG3 {tag}", case, equal(power(power(g, lam), mu), power(g, lam * mu)))
    f1, f2 = power(g, lam), power(g, mu)
    rec.check(f"EG4 {tag}", case, equal(power(mul(f1, f2), lam), mul(power(f1, lam), power(f2, lam))))
    conj = mul(mul(g, h), inv(g))
    rec.check(f"EG5 {tag}", case, equal(power(conj, lam), mul(mul(g, power(h, lam)), inv(g))))


def _eg_axioms_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    series_ops = (group_mul, group_inv, group_power, lambda a, b: a == b)
    models = [("heisenberg", heisenberg_algebra()), ("free class 3", free_nilpotent_algebra(2, 3))]
    for case in range(cases):
        g, h = random_group(rng, 2, n), random_group(rng, 2, n)
        lam, mu = random_rational(rng, 5), random_rational(rng, 5)
        _eg_axioms_in(rec, case, "series", g, h, lam, mu, series_ops)
        for name, algebra in models:
            ops = (
                lambda a, b, A=algebra: gr_mul(A, a, b),
                lambda a, A=algebra: gr_power(A, a, -1),
                lambda a, s, A=algebra: gr_power(A, a, s),
                vectors_equal,
            )
            a, b = random_vector(rng, algebra.dimension), random_vector(rng, algebra.dimension)
            _eg_axioms_in(rec, case, name, a, b, lam, mu, ops)


def _bch_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    m = 2
    for case in range(cases):
        a, b, d = (random_lie(rng, m, n) for _ in range(3))
        ab = bch(a, b)
        rec.check("homomorphism", case, exp(ab) == exp(a) * exp(b))
        rec.check("associativity", case, bch(ab, d) == bch(a, bch(b, d)))
        sa, sb = lie_to_series(a), lie_to_series(b)
        remainder = lie_to_series(ab) - sa - sb - series_scale(QQ(1, 2), lie_bracket(sa, sb))
        rec.check("second order", case, valuation(remainder) >= 3, f"valuation {valuation(remainder)}")
        eps = lie_to_series(random_lie(rng, m, n, min_degree=int(rng.integers(1, 3))))
        delta = lie_to_series(random_lie(rng, m, n, min_degree=int(rng.integers(1, 3))))
        comm = log(group_commutator(exp(eps), exp(delta))) - lie_bracket(eps, delta)
        bound = valuation(eps) + valuation(delta) + 1
        rec.check("commutator leading term", case, valuation(comm) >= bound)
        rec.check("exp ad", case, exp_ad(a, b) == bch(a, bch(b, -a)))
    generators = free_generators(m, n)
    for rank in range(1, n + 1):
        for tree in bracket_trees(m, rank):
            value = commutator_word(tree, generators).series - TruncatedSeries.one(m, n)
            rec.check("commutator word depth", rank, valuation(value) >= rank, format_bracketing(tree))


def _first_divergence(left, right):
    # graded-lex smaller word at the first differing factor position
    for x, y in zip(left, right):
        if x != y:
            return min(x[0], y[0], key=lambda w: (len(w), w))
    if len(left) == len(right):
        return None
    return (left if len(left) > len(right) else right)[min(len(left), len(right))][0]


def _collect_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    m = 2
    for case in range(cases):
        q = random_group(rng, m, n)
        decomposition = collect(q)
        rec.check("round trip", case, expand(decomposition, m, n) == q)
        words = decomposition.words()
        rec.check(
            "increasing Lyndon factors",
            case,
            all(is_lyndon(w) for w in words)
            and all((len(u), u) < (len(v), v) for u, v in zip(words, words[1:])),
        )
        q2 = random_group(rng, m, n)
        other = collect(q2)
        difference = log(group_mul(q, group_inv(q2)))
        if not difference.is_zero():
            word = _first_divergence(decomposition.factors, other.factors)
            least = difference.support()[0]
            rec.check(
                "first divergence",
                case,
                word is not None and (len(word), word) <= (len(least), least),
                f"diverged at {word}, least word {least}",
            )
        depth = int(rng.integers(1, n))
        g = exp(lie_to_series(random_lie(rng, m, n, min_degree=depth)))
        commutator = log(group_commutator(q, g))
        rec.check("commutator depth", case, valuation(commutator) >= depth + 1)


def _hall_petresco_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    taus = hall_petresco_tau(n, c)
    rec.check("identity", 0, verify_hall_petresco(n, c, taus), f"n={n}, c={c}")
    for m, tau in enumerate(taus, start=2):
        rec.check("tau depth", m, valuation(log(tau)) >= m)


def _functor_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    models = [
        ("abelian", abelian_algebra(4)),
        ("heisenberg", heisenberg_algebra()),
        ("free class 3", free_nilpotent_algebra(2, 3)),
    ]
    for case, (name, algebra) in enumerate(models):
        rec.check(f"Lie(Gr(A)) = A {name}", case, lie_from_group_ops(algebra) == algebra)
        rec.check(
            f"lower central series {name}",
            case,
            group_lcs(algebra) == algebra.lower_central_series,
        )
        order = max(algebra.nilpotency_class, 1)
        for k in range(cases):
            a, b = random_vector(rng, algebra.dimension), random_vector(rng, algebra.dimension)
            left = evaluate_lie(algebra, exp_ad(LieElement.generator(0, 2, order), LieElement.generator(1, 2, order)), [a, b])
            right = gr_mul(algebra, gr_mul(algebra, a, b), gr_power(algebra, a, -1))
            rec.check(f"exp ad in model {name}", k, vectors_equal(left, right))


def _solver_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    models = [abelian_algebra(3), heisenberg_algebra(), free_nilpotent_algebra(2, 3)]
    if c >= 4:
        models.append(free_nilpotent_algebra(2, 4))
    for case in range(cases):
        algebra = models[int(rng.integers(0, len(models)))]
        factors = int(rng.integers(1, 4))
        gs = [random_vector(rng, algebra.dimension) for _ in range(factors)]
        exponents = [random_rational(rng, 5) for _ in range(factors)]
        if sum(exponents) == 0:
            exponents[-1] = exponents[-1] + 1
        f = solve_group_equation(algebra, gs, exponents)
        residual = group_equation_residual(algebra, gs, exponents, f)
        rec.check("unit residual", case, is_zero_vector(residual), f"residual {list(residual)}")
        t = term_to_lie(group_equation_term(exponents), max(algebra.nilpotency_class, 1), factors + 1)
        rec.check("two strategies agree", case, vectors_equal(f, solve_equation_layered(algebra, t, gs)))
        bump = random_vector(rng, algebra.dimension)
        if not is_zero_vector(bump):
            moved = group_equation_residual(algebra, gs, exponents, f + bump)
            rec.check("uniqueness", case, not is_zero_vector(moved))
        singular = exponents[:-1] + [-sum(exponents[:-1])] if factors > 1 else [QQ(0)]
        try:
            solve_group_equation(algebra, gs, singular)
            rec.check("singular rejected", case, False, f"exponents {singular}")
        except SingularEquation:
            rec.check("singular rejected", case, True)


def _lyndon_suite(rng, rec: Recorder, cases: int, n: int, c: int):
    for m in (1, 2, 3):
        top = 7
        brute = {
            w for d in range(1, top + 1) for w in product(range(m), repeat=d) if is_lyndon(w)
        }
        rec.check(f"enumeration m={m}", 0, set(enumerate_lyndon(m, top)) == brute)
        counts = lyndon_dimensions(m, top)
        rec.check(
            f"necklace counts m={m}",
            0,
            all(counts[d] == witt_dimension(m, d) for d in range(1, top + 1)),
        )
    for w in enumerate_lyndon(2, n):
        series = lyndon_bracket_series(w, n, 2)
        rec.check(
            "triangularity",
            0,
            series.coefficient(w) == 1
            and all((len(u), u) > (len(w), w) for u in series.terms if u != w),
            str(w),
        )
    for case in range(cases):
        element = random_lie(rng, 2, n)
        rec.check("coordinate round trip", case, series_to_lie(lie_to_series(element)) == element)


SUITE_FUNCTIONS: Dict[str, Callable] = {
    "ring": _ring_suite,
    "eg-axioms": _eg_axioms_suite,
    "bch": _bch_suite,
    "collect": _collect_suite,
    "hall-petresco": _hall_petresco_suite,
    "functor": _functor_suite,
    "solver": _solver_suite,
    "lyndon": _lyndon_suite,
}


def get_report(name: str, seed: int, cases: int, rows: List[Dict]) -> Dict:
    """Summarizes suite rows per property.

    Args:
        name: Suite name.
        seed: Seed the cases were drawn with.
        cases: Requested number of cases.
        rows: One record per property check.

    Returns:
        Dict: Report with summary counts, counts per property and the first
            failure (None when everything passed).
    """
    table = pd.DataFrame(rows, columns=["property", "case", "passed", "detail"])
    grouped = table.groupby("property", sort=True)["passed"].agg(["sum", "count"])
    failures = table[~table["passed"].astype(bool)]
    first_failure: Optional[Dict] = None
    if len(failures):
        row = failures.iloc[0]
        first_failure = {"property": row["property"], "case": int(row["case"]), "detail": row["detail"]}
    return {
        "Name": name,
        "Description": DESCRIPTIONS[name],
        "Summary": {
            "Seed": seed,
            "Cases": cases,
            "Checks": int(len(table)),
            "Passed": int(table["passed"].sum()),
            "Failed": int(len(failures)),
        },
        "Counts": {
            prop: {"passed": int(r["sum"]), "failed": int(r["count"] - r["sum"])}
            for prop, r in grouped.iterrows()
        },
        "First failure": first_failure,
    }


def run_suite(name: str, seed: int = 7, cases: int = 10, n: int = 4, c: int = 3) -> Dict:
    """Runs one named suite.

    Args:
        name: One of SUITES.
        seed: Seed of the random generator.
        cases: Randomized cases per property.
        n: Truncation order, or the number of generators for hall-petresco.
        c: Class bound for hall-petresco and the solver models.

    Returns:
        Dict: The suite report.

    Raises:
        KeyError: For an unknown suite name.
        PropertyFailure: If any check failed; the report is attached.
    """
    suite = SUITE_FUNCTIONS[name]
    rng = np.random.default_rng(seed)
    recorder = Recorder()
    logger.info("Running suite %s with seed %d", name, seed)
    suite(rng, recorder, cases, n, c)
    report = get_report(name, seed, cases, recorder.rows)
    if report["First failure"] is not None:
        failure = report["First failure"]
        err = PropertyFailure(
            f"Property {failure['property']} failed on case {failure['case']}: {failure['detail']}"
        )
        err.report = report
        raise err
    return report

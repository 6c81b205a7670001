"""
Command line front end of the exact Lie/group correspondence engine.

Every subcommand reads JSON documents (a path, or "-" for standard input),
runs the input checks, calls the engine and writes one JSON document (or a
text rendering) to standard output. Errors are reported as one JSON record
on the error stream, and the exit code says what went wrong: 2 for bad
input, 3 for a violated precondition, 4 for a failed property check and 1
for an internal inconsistency.
"""

import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Tuple

from src.algebra_core import TruncatedSeries, lie_bracket, parse_scalar
from src.collection import (
    collect,
    expand,
    format_group_word,
    hall_petresco_tau,
    lie_term_truncations,
    mls_bracket_formula,
    mls_sum_formula,
    term_to_lie,
    verify_hall_petresco,
)
from src.documents import (
    decomposition_from_document,
    decomposition_to_document,
    decomposition_to_text,
    equation_from_document,
    group_word_to_document,
    lie_to_document,
    lie_to_text,
    read_json,
    series_from_document,
    series_to_document,
    series_to_text,
    term_from_document,
    vector_to_document,
    vector_to_text,
    write_json,
)
from src.errors import DocumentError, EngineBug, EngineError, PropertyFailure
from src.exp_log import GroupElement, bch, exp, group_power, log
from src.lyndon import (
    bracketing,
    enumerate_lyndon,
    format_bracketing,
    lyndon_dimensions,
    witt_dimension,
)
from src.nilpotent_models import (
    group_equation_residual,
    group_equation_term,
    solve_equation_layered,
    solve_group_equation,
    vectors_equal,
)
from src.property_suites import SUITES, run_suite
from src.run_checks import run_checks

logger = logging.getLogger(__name__)

Output = Tuple[Dict, str]


def load(path: str, kind: str) -> Dict:
    document = read_json(path)
    run_checks(document, kind)
    return document


def _series(path: str, truncation: Optional[int] = None):
    series = series_from_document(load(path, "series"))
    if truncation is not None:
        series = series.truncate(truncation)
    return series


# Commands


def cmd_bch(args) -> Output:
    a, b = _series(args.left, args.truncation), _series(args.right, args.truncation)
    result = bch(a, b)
    return lie_to_document(result), lie_to_text(result)


def cmd_exp(args) -> Output:
    result = exp(_series(args.input, args.truncation)).series
    return series_to_document(result), series_to_text(result)


def cmd_log(args) -> Output:
    result = log(GroupElement(_series(args.input, args.truncation)))
    return series_to_document(result), series_to_text(result)


def cmd_power(args) -> Output:
    g = GroupElement(_series(args.input, args.truncation))
    result = group_power(g, parse_scalar(args.exponent)).series
    return series_to_document(result), series_to_text(result)


def _formula_source(formula: str, n: int, terms: int) -> GroupElement:
    m = terms if formula == "sum" else 2
    generators = [TruncatedSeries.generator(i, m, n) for i in range(m)]
    if formula == "sum":
        return exp(sum(generators[1:], generators[0]))
    return exp(lie_bracket(generators[0], generators[1]))


def cmd_collect(args) -> Output:
    if args.formula is not None:
        n = args.truncation or 3
        if args.formula == "sum":
            decomposition = mls_sum_formula(n, args.terms)
        else:
            decomposition = mls_bracket_formula(n)
        q = _formula_source(args.formula, n, args.terms)
    else:
        q = GroupElement(_series(args.input, args.truncation))
        decomposition = collect(q)
    m, n = q.shape
    if args.verify:
        if expand(decomposition, m, n) != q:
            raise EngineBug("Expanding the collected decomposition does not reproduce the input.")
        logger.info("Collected decomposition verified by expansion.")
    return decomposition_to_document(decomposition, m, n), decomposition_to_text(decomposition)


def cmd_expand(args) -> Output:
    document = load(args.input, "decomposition")
    decomposition = decomposition_from_document(document)
    result = expand(decomposition, document["generators"], document["truncation"]).series
    return series_to_document(result), series_to_text(result)


def cmd_lyndon(args) -> Output:
    words = enumerate_lyndon(args.generators, args.truncation)
    counts = lyndon_dimensions(args.generators, args.truncation)
    document = {
        "generators": args.generators,
        "max_degree": args.truncation,
        "words": [list(w) for w in words],
        "counts": {str(d): int(c) for d, c in counts.items()},
    }
    text = "\n".join(
        f"{' '.join(map(str, w))}\t{format_bracketing(bracketing(w))}" for w in words
    )
    return document, text


def cmd_dims(args) -> Output:
    counts = lyndon_dimensions(args.generators, args.truncation)
    rows = [
        {"degree": int(d), "lyndon": int(c), "necklace": witt_dimension(args.generators, int(d))}
        for d, c in counts.items()
    ]
    text = "\n".join(f"{r['degree']}\t{r['lyndon']}\t{r['necklace']}" for r in rows)
    return {"generators": args.generators, "dimensions": rows}, text


def cmd_term(args) -> Output:
    term = term_from_document(load(args.input, "term"))
    lie_part, word = lie_term_truncations(term, args.class_, args.generators)
    document = {
        "class": args.class_,
        "lie": lie_to_document(lie_part),
        "group_word": group_word_to_document(word),
        "text": format_group_word(word),
    }
    return document, f"{lie_to_text(lie_part)}\n{format_group_word(word)}"


def cmd_hall_petresco(args) -> Output:
    taus = hall_petresco_tau(args.n, args.class_)
    holds = verify_hall_petresco(args.n, args.class_, taus)
    if not holds:
        raise PropertyFailure(f"Hall-Petresco identity fails for n={args.n}, c={args.class_}.")
    document = {
        "n": args.n,
        "class": args.class_,
        "holds": holds,
        "taus": [series_to_document(log(t)) for t in taus],
    }
    text = "\n".join(f"log tau_{i} = {series_to_text(log(t))}" for i, t in enumerate(taus, start=2))
    return document, text


def cmd_solve(args) -> Output:
    document = load(args.input, "equation")
    base_dir = os.path.dirname(args.input) if args.input != "-" else "."
    if args.algebra is not None:
        document = dict(document, algebra=load(args.algebra, "algebra"))
    elif isinstance(document["algebra"], dict):
        run_checks(document["algebra"], "algebra")
    algebra, gs, exponents = equation_from_document(document, base_dir)
    f = solve_group_equation(algebra, gs, exponents)
    residual = group_equation_residual(algebra, gs, exponents, f)
    if args.verify:
        t = term_to_lie(
            group_equation_term(exponents), max(algebra.nilpotency_class, 1), len(gs) + 1
        )
        if not vectors_equal(f, solve_equation_layered(algebra, t, gs)):
            raise EngineBug("Lifting and layered solvers disagree.")
        logger.info("Solution verified by the layered solver.")
    output = {
        "solution": vector_to_document(f, algebra.labels),
        "residual": vector_to_document(residual, algebra.labels),
    }
    text = f"f = {vector_to_text(f, algebra.labels)}\nresidual = {vector_to_text(residual, algebra.labels)}"
    return output, text


def cmd_verify(args) -> Output:
    n = args.n if args.suite == "hall-petresco" else (args.truncation or 4)
    try:
        report = run_suite(args.suite, seed=args.seed, cases=args.cases, n=n, c=args.class_)
    except PropertyFailure as err:
        report = getattr(err, "report", None)
        if report is not None:
            write_output(report, _report_text(report), args)
        raise
    return report, _report_text(report)


def _report_text(report: Dict) -> str:
    summary = report["Summary"]
    lines = [
        f"{report['Name']}: {summary['Passed']} passed, {summary['Failed']} failed (seed {summary['Seed']})"
    ]
    lines += [
        f"  {prop}: {c['passed']} passed, {c['failed']} failed"
        for prop, c in report["Counts"].items()
    ]
    return "\n".join(lines)


# Parser


def _add_input(parser: argparse.ArgumentParser, name: str = "input", help: str = "Path to JSON document, or - for stdin."):
    parser.add_argument(name, help=help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lazard",
        description="Exact computations in truncated free Lie algebras, their exponential groups and nilpotent models.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs.")
    parser.add_argument("--format", choices=("json", "text"), default="json", help="Output format.")
    parser.add_argument("-o", "--output", default="-", help="Path to save output, - for stdout.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        return p

    p = command("bch", cmd_bch, "BCH product of two series of valuation >= 1.")
    _add_input(p, "left")
    _add_input(p, "right")
    p.add_argument("-N", "--truncation", type=int, help="Truncate both inputs to this order.")

    for name, handler, help in (
        ("exp", cmd_exp, "Exponential of a series of valuation >= 1."),
        ("log", cmd_log, "Logarithm of a series with constant term 1."),
        ("power", cmd_power, "Rational or polynomial power of a series with constant term 1."),
    ):
        p = command(name, handler, help)
        _add_input(p)
        p.add_argument("-N", "--truncation", type=int, help="Truncate the input to this order.")
        if name == "power":
            p.add_argument("--exponent", required=True, help='Exponent such as "1/2" or "l".')

    p = command("collect", cmd_collect, "Collect a group-like series into Lyndon commutator powers.")
    p.add_argument("input", nargs="?", help="Path to series document, or - for stdin.")
    p.add_argument("-N", "--truncation", type=int, help="Truncation order.")
    p.add_argument("--formula", choices=("sum", "bracket"), help="Collect exp(X0+...+X_(J-1)) or exp([X0,X1]) instead of an input.")
    p.add_argument("--terms", type=int, default=2, help="Number of summands J for --formula sum.")
    p.add_argument("--verify", action="store_true", help="Re-expand and compare with the input.")

    p = command("expand", cmd_expand, "Multiply out a decomposition document.")
    _add_input(p)

    for name, handler, help in (
        ("lyndon", cmd_lyndon, "List Lyndon words and their bracketings."),
        ("dims", cmd_dims, "Lyndon counts per degree against the necklace formula."),
    ):
        p = command(name, handler, help)
        p.add_argument("-m", "--generators", type=int, default=2, help="Number of generators.")
        p.add_argument("-N", "--truncation", type=int, default=4, help="Maximal degree.")

    p = command("term", cmd_term, "Compile a mixed term into Lie and group normal forms.")
    _add_input(p)
    p.add_argument("-c", "--class", dest="class_", type=int, default=3, help="Nilpotency bound c (models of class < c).")
    p.add_argument("-m", "--generators", type=int, help="Number of variables.")

    p = command("hall-petresco", cmd_hall_petresco, "Compute and verify the Hall-Petresco words.")
    p.add_argument("--n", type=int, default=2, help="Number of group elements.")
    p.add_argument("-c", "--class", dest="class_", type=int, default=3, help="Truncation class.")

    p = command("solve", cmd_solve, "Solve g1 f^l1 ... gn f^ln = 1 in a nilpotent model.")
    _add_input(p)
    p.add_argument("--algebra", help="Algebra document overriding the equation's reference.")
    p.add_argument("--verify", action="store_true", help="Cross-check with the layered solver.")

    p = command("verify", cmd_verify, "Run a seeded property suite.")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--cases", type=int, default=10)
    p.add_argument("-N", "--truncation", type=int, help="Truncation order of randomized cases.")
    p.add_argument("--n", type=int, default=2, help="Number of generators for hall-petresco.")
    p.add_argument("-c", "--class", dest="class_", type=int, default=3, help="Class bound.")
    return parser


def write_output(document: Dict, text: str, args):
    if args.format == "text":
        if args.output == "-":
            sys.stdout.write(text + "\n")
        else:
            with open(args.output, "w", encoding="utf-8") as f:
                f.write(text + "\n")
    else:
        write_json(args.output, document)


def configure_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    # basicConfig is a no-op once handlers exist; the level must still follow -v
    logging.getLogger().setLevel(level)


def report_error(err: EngineError) -> int:
    record = {"error": type(err).__name__, "message": str(err), "exit_code": err.exit_code}
    sys.stderr.write(json.dumps(record) + "\n")
    return err.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """Runs one subcommand and returns its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    configure_logging(args.verbose)
    if args.command == "collect" and (args.input is None) == (args.formula is None):
        sys.stderr.write("collect needs exactly one of an input document or --formula.\n")
        return 2
    try:
        document, text = args.handler(args)
    except EngineError as err:
        return report_error(err)
    except ValueError as err:
        return report_error(DocumentError(str(err)))
    write_output(document, text, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())

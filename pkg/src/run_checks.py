"""Script of functions to check input documents are as expected, before
they are handed to the engine."""

import logging
from typing import Dict, Iterable

import pandas as pd

from src.errors import DocumentError

logger = logging.getLogger(__name__)

REQUIRED_KEYS = {
    "series": ("generators", "truncation", "terms"),
    "decomposition": ("generators", "truncation", "factors"),
    "algebra": ("dimension",),
    "equation": ("algebra", "factors"),
    "term": ("op",),
}


def _is_index(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_keys(document: Dict, kind: str):
    # Check 1: document is an object carrying every required key
    if not isinstance(document, dict):
        raise DocumentError(f"Check 1/3: Failed. The {kind} document is not a JSON object.")
    if kind == "algebra" and "builtin" in document:
        logger.info("Check 1/3: Success.")
        return
    missing = [key for key in REQUIRED_KEYS[kind] if key not in document]
    if missing:
        raise DocumentError(
            f"Check 1/3: Failed. The {kind} document is missing keys {missing}."
        )
    logger.info("Check 1/3: Success.")


def _check_words(words: Iterable, m: int, n: int):
    # Check 3: every word is a list of indices fitting the alphabet and the truncation,
    # and no word is repeated
    words = list(words)
    for word in words:
        if (
            not isinstance(word, list)
            or not all(_is_index(i) and 0 <= i < m for i in word)
            or len(word) > n
        ):
            raise DocumentError(
                f"Check 3/3: Failed. Word {word!r} does not fit {m} generators at order {n}."
            )
    counts = pd.Series([tuple(w) for w in words], dtype=object).value_counts()
    if (counts > 1).any():
        raise DocumentError(
            f"Check 3/3: Failed. Repeated words {list(counts[counts > 1].index)}."
        )
    logger.info("Check 3/3: Success.")


def run_checks(document: Dict, kind: str):
    """Checks an input document is as expected before parsing it.

    Args:
        document: Decoded JSON document.
        kind: One of "series", "decomposition", "algebra", "equation" or
            "term".

    Raises:
        DocumentError: If the document is not an object with the required keys.
        DocumentError: If the shape fields are not positive integers.
        DocumentError: If a word leaves the alphabet or the truncation, or
            is listed twice.
    """
    if kind not in REQUIRED_KEYS:
        raise ValueError(f"Unknown document kind {kind!r}.")
    _check_keys(document, kind)

    # Check 2: shape fields are positive integers and lists are lists
    if kind in ("series", "decomposition"):
        m, n = document["generators"], document["truncation"]
        if not (_is_index(m) and _is_index(n) and m >= 1 and n >= 1):
            raise DocumentError(
                f"Check 2/3: Failed. Generators and truncation must be positive integers, got {m}, {n}."
            )
        entries = document["terms" if kind == "series" else "factors"]
        if not isinstance(entries, list) or not all(
            isinstance(e, dict) and "word" in e for e in entries
        ):
            raise DocumentError("Check 2/3: Failed. Entries must be objects with a word.")
        logger.info("Check 2/3: Success.")
        _check_words((e["word"] for e in entries), m, n)
        return

    if kind == "algebra" and "builtin" not in document:
        d = document["dimension"]
        if not (_is_index(d) and d >= 1):
            raise DocumentError(f"Check 2/3: Failed. Dimension must be a positive integer, got {d}.")
        logger.info("Check 2/3: Success.")
        for bracket in document.get("brackets", []):
            if not (
                isinstance(bracket, dict)
                and _is_index(bracket.get("i"))
                and _is_index(bracket.get("j"))
                and isinstance(bracket.get("coeffs"), list)
                and len(bracket["coeffs"]) == d
            ):
                raise DocumentError(f"Check 3/3: Failed. Malformed bracket {bracket!r}.")
        logger.info("Check 3/3: Success.")
        return

    if kind == "equation":
        factors = document["factors"]
        if not isinstance(factors, list) or not factors:
            raise DocumentError("Check 2/3: Failed. An equation needs at least one factor.")
        logger.info("Check 2/3: Success.")
        if not all(isinstance(f, dict) and "g" in f and "lambda" in f for f in factors):
            raise DocumentError("Check 3/3: Failed. Every factor needs g and lambda.")
        logger.info("Check 3/3: Success.")
        return

    logger.info("Check 2/3: Success.")
    logger.info("Check 3/3: Success.")

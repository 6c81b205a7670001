"""Reading and writing the JSON documents exchanged on the command line.

Scalars are always exact strings ("3", "-1/2", "1/2*l**2 + -1/2*l"), words
are lists of generator indices and every list of words is written in
graded-lex order.
"""

import json
import os
import sys
from typing import Any, Dict, Sequence

import numpy as np

from src.algebra_core import TruncatedSeries, format_scalar, parse_scalar
from src.collection import (
    Add,
    Bracket,
    GComm,
    GInv,
    GMul,
    GPow,
    GroupWord,
    GUnit,
    GVar,
    MixedTerm,
    MlsDecomposition,
    Scale,
    Var,
    Zero,
    format_group_word,
    group_word_from_decomposition,
    star,
)
from src.errors import DocumentError, PreconditionError
from src.lyndon import LieElement, bracketing, format_bracketing
from src.nilpotent_models import (
    SCLieAlgebra,
    abelian_algebra,
    free_nilpotent_algebra,
    heisenberg_algebra,
    make_algebra,
    model_vector,
)


def read_json(path: str) -> Dict:
    """Reads JSON file and returns a dict.

    Args:
        path: Path to JSON file, or "-" for standard input.

    Returns:
        dict: Dictionary of data read from JSON file.

    Raises:
        DocumentError: If the file is missing or not valid JSON.
    """
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise DocumentError(f"Cannot read JSON from {path}: {err}") from err


def write_json(path: str, data: Any):
    """Writes JSON file.

    Args:
        path: Path to JSON file, or "-" for standard output.
        data: Data to write.
    """
    if path == "-":
        json.dump(data, sys.stdout, indent=4)
        sys.stdout.write("\n")
        return
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=4)


def _scalar(value):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise DocumentError(f"Scalar {value!r} must be a string or an integer.")
    return parse_scalar(str(value))


def _word(value) -> tuple:
    if not isinstance(value, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in value
    ):
        raise DocumentError(f"Word {value!r} must be a list of generator indices.")
    return tuple(value)


# Series and Lie elements


def series_to_document(series: TruncatedSeries) -> Dict:
    return {
        "generators": series.num_generators,
        "truncation": series.truncation_order,
        "terms": [
            {"word": list(w), "coeff": format_scalar(series.terms[w])}
            for w in series.support()
        ],
    }


def lie_to_document(element: LieElement) -> Dict:
    return {
        "generators": element.num_generators,
        "truncation": element.truncation_order,
        "basis": "lyndon",
        "terms": [
            {"word": list(w), "coeff": format_scalar(element.coords[w])}
            for w in element.words()
        ],
    }


def _terms(document: Dict) -> Dict[tuple, Any]:
    terms: Dict[tuple, Any] = {}
    for term in document["terms"]:
        word = _word(term["word"])
        if word in terms:
            raise DocumentError(f"Word {list(word)} appears twice.")
        terms[word] = _scalar(term["coeff"])
    return terms


def series_from_document(document: Dict) -> TruncatedSeries:
    """Reads a series document; Lie documents are converted to series form.

    Raises:
        DocumentError: If the document is malformed.
    """
    if document.get("basis") == "lyndon":
        return lie_from_document(document).to_series()
    try:
        return TruncatedSeries(
            document["generators"], document["truncation"], _terms(document)
        )
    except (KeyError, TypeError) as err:
        raise DocumentError(f"Malformed series document: {err}") from err
    except PreconditionError as err:
        raise DocumentError(str(err)) from err


def lie_from_document(document: Dict) -> LieElement:
    try:
        return LieElement(document["generators"], document["truncation"], _terms(document))
    except (KeyError, TypeError) as err:
        raise DocumentError(f"Malformed Lie element document: {err}") from err
    except PreconditionError as err:
        raise DocumentError(str(err)) from err


# Decompositions


def decomposition_to_document(decomposition: MlsDecomposition, m: int, n: int) -> Dict:
    return {
        "generators": m,
        "truncation": n,
        "factors": [
            {"word": list(w), "exponent": format_scalar(e)} for w, e in decomposition
        ],
    }


def decomposition_from_document(document: Dict) -> MlsDecomposition:
    try:
        return MlsDecomposition(
            tuple(
                (_word(f["word"]), _scalar(f["exponent"])) for f in document["factors"]
            )
        )
    except (KeyError, TypeError) as err:
        raise DocumentError(f"Malformed decomposition document: {err}") from err
    except PreconditionError as err:
        raise DocumentError(str(err)) from err


# Models


def vector_to_document(vector: np.ndarray, labels: Sequence[str]) -> Dict:
    return {"labels": list(labels), "coords": [format_scalar(x) for x in vector]}


def vector_from_document(document, dimension: int) -> np.ndarray:
    """Accepts a bare list of scalars or a {"coords": [...]} document."""
    coords = document.get("coords") if isinstance(document, dict) else document
    if not isinstance(coords, list) or len(coords) != dimension:
        raise DocumentError(f"Expected a vector of {dimension} scalars, got {document!r}.")
    return model_vector([_scalar(x) for x in coords])


def algebra_to_document(algebra: SCLieAlgebra) -> Dict:
    return {
        "dimension": algebra.dimension,
        "labels": algebra.labels,
        "brackets": [
            {"i": i, "j": j, "coeffs": [format_scalar(c) for c in coeffs]}
            for (i, j), coeffs in sorted(algebra.structure_constants().items())
        ],
    }


def algebra_from_document(document: Dict) -> SCLieAlgebra:
    """Reads an algebra given by brackets, or a named model.

    Named models are {"builtin": "heisenberg"}, {"builtin": "abelian",
    "dimension": d} and {"builtin": "free", "generators": m, "class": c}.
    """
    try:
        builtin = document.get("builtin")
        if builtin == "heisenberg":
            return heisenberg_algebra()
        if builtin == "abelian":
            return abelian_algebra(document["dimension"])
        if builtin == "free":
            return free_nilpotent_algebra(document["generators"], document["class"])
        if builtin is not None:
            raise DocumentError(f"Unknown builtin algebra {builtin!r}.")
        dimension = document["dimension"]
        constants = {
            (b["i"], b["j"]): [_scalar(c) for c in b["coeffs"]]
            for b in document.get("brackets", [])
        }
        return make_algebra(dimension, constants, document.get("labels"))
    except (KeyError, TypeError, AttributeError) as err:
        raise DocumentError(f"Malformed algebra document: {err}") from err


def equation_from_document(document: Dict, base_dir: str = "."):
    """Reads {"algebra": doc-or-path, "factors": [{"g": vector, "lambda": scalar}]}.

    Returns:
        tuple: The algebra, the list of g vectors and the list of exponents.
    """
    try:
        reference = document["algebra"]
        if isinstance(reference, str):
            path = reference if os.path.isabs(reference) else os.path.join(base_dir, reference)
            reference = read_json(path)
        algebra = algebra_from_document(reference)
        gs = [vector_from_document(f["g"], algebra.dimension) for f in document["factors"]]
        exponents = [_scalar(f["lambda"]) for f in document["factors"]]
    except (KeyError, TypeError) as err:
        raise DocumentError(f"Malformed equation document: {err}") from err
    return algebra, gs, exponents


# Terms


def term_from_document(document: Dict) -> MixedTerm:
    """Reads a mixed term tree such as
    {"op": "star", "args": [{"op": "var", "index": 0}, {"op": "var", "index": 1}]}.
    """
    try:
        op = document["op"]
        if op == "var":
            return Var(int(document["index"]))
        if op == "zero":
            return Zero()
        if op == "scale":
            return Scale(_scalar(document["scalar"]), term_from_document(document["arg"]))
        args = [term_from_document(a) for a in document["args"]]
    except (KeyError, TypeError, ValueError) as err:
        raise DocumentError(f"Malformed term document: {err}") from err
    if op == "star" and args:
        return star(*args)
    if op in ("add", "bracket") and len(args) == 2:
        return Add(*args) if op == "add" else Bracket(*args)
    raise DocumentError(f"Unknown term operation {op!r} with {len(args)} arguments.")


def group_word_to_document(word: GroupWord) -> Dict:
    if isinstance(word, GUnit):
        return {"op": "unit"}
    if isinstance(word, GVar):
        return {"op": "var", "index": word.index}
    if isinstance(word, GInv):
        return {"op": "inv", "arg": group_word_to_document(word.arg)}
    if isinstance(word, GPow):
        return {
            "op": "pow",
            "exponent": format_scalar(word.exponent),
            "arg": group_word_to_document(word.base),
        }
    op = "mul" if isinstance(word, GMul) else "comm"
    return {"op": op, "args": [group_word_to_document(word.left), group_word_to_document(word.right)]}


# Text rendering


def _word_text(word) -> str:
    return "".join(f"X{i}" for i in word) or "1"


def series_to_text(series: TruncatedSeries) -> str:
    parts = [f"{format_scalar(series.terms[w])}*{_word_text(w)}" for w in series.support()]
    return " + ".join(parts) or "0"


def lie_to_text(element: LieElement) -> str:
    parts = [
        f"{format_scalar(element.coords[w])}*{format_bracketing(bracketing(w))}"
        for w in element.words()
    ]
    return " + ".join(parts) or "0"


def decomposition_to_text(decomposition: MlsDecomposition) -> str:
    return format_group_word(group_word_from_decomposition(decomposition))


def vector_to_text(vector: np.ndarray, labels: Sequence[str]) -> str:
    parts = [f"{format_scalar(x)}*{label}" for x, label in zip(vector, labels) if x != 0]
    return " + ".join(parts) or "0"

"""
Finite dimensional nilpotent Lie algebras over QQ given by structure
constants, their groups under the BCH product, and the solver for
non-singular equations in them.

Vectors are numpy object arrays of exact rationals. The bracket is the
contraction of the structure tensor C[i, j, k] = coefficient of e_k in
[e_i, e_j].
"""

import logging
from functools import reduce
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from src.algebra_core import Scalar, TruncatedSeries, as_rational, to_scalar
from src.collection import (
    GroupOperations,
    GroupWord,
    MlsDecomposition,
    MixedTerm,
    Scale,
    TermOperations,
    Var,
    collect,
    evaluate_group_word as evaluate_word,
    evaluate_term,
    mls_bracket_formula,
    mls_sum_formula,
    star,
    term_to_lie,
)
from src.errors import (
    ArityMismatch,
    JacobiViolation,
    NonConvergence,
    NotNilpotent,
    ReconstructionMismatch,
    ShapeMismatch,
    SingularEquation,
    TruncationTooSmall,
)
from src.exp_log import GroupElement, bch_generators
from src.lyndon import (
    LieElement,
    bracketing,
    enumerate_lyndon,
    evaluate_tree,
    lie_element_bracket,
    series_to_lie,
)

logger = logging.getLogger(__name__)

ModelVector = np.ndarray


# Vectors


def model_vector(values: Sequence) -> ModelVector:
    """Builds an exact rational vector from ints, strings or fractions."""
    return np.array([as_rational(to_scalar(v)) for v in values], dtype=object)


def zero_vector(dimension: int) -> ModelVector:
    return np.array([QQ(0)] * dimension, dtype=object)


def basis_vector(i: int, dimension: int) -> ModelVector:
    v = zero_vector(dimension)
    v[i] = QQ(1)
    return v


def is_zero_vector(v: ModelVector) -> bool:
    return all(x == 0 for x in v)


def vectors_equal(a: ModelVector, b: ModelVector) -> bool:
    return len(a) == len(b) and all(x == y for x, y in zip(a, b))


def _normalize(v) -> ModelVector:
    # numpy reductions over object arrays may leave plain ints behind
    return np.array([QQ.convert(x) for x in v], dtype=object)


# Subspaces


class Subspace:
    """A subspace of QQ^d held as the nonzero rows of its reduced row
    echelon form.

    Pivots are the first nonzero column of each row, so two subspaces are
    equal iff their echelon rows agree.
    """

    def __init__(self, vectors: Sequence[ModelVector], dimension: int):
        self.dimension = dimension
        rows = [list(v) for v in vectors if not is_zero_vector(v)]
        if not rows:
            self.rows: List[ModelVector] = []
            self.pivots: Tuple[int, ...] = ()
            return
        for row in rows:
            if len(row) != dimension:
                raise ShapeMismatch(f"Vector of length {len(row)} in QQ^{dimension}.")
        echelon, pivots = DomainMatrix.from_list(rows, QQ).rref(method="FF")
        self.pivots = tuple(pivots)
        self.rows = [_normalize(r) for r in echelon.to_list()[: len(pivots)]]

    @classmethod
    def full(cls, dimension: int) -> "Subspace":
        return cls([basis_vector(i, dimension) for i in range(dimension)], dimension)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> List[ModelVector]:
        return list(self.rows)

    def reduce_modulo(self, v: ModelVector) -> ModelVector:
        """Subtracts the subspace element that clears every pivot column of v."""
        v = _normalize(v)
        for row, pivot in zip(self.rows, self.pivots):
            if v[pivot] != 0:
                v = _normalize(v - row * v[pivot])
        return v

    def contains(self, v: ModelVector) -> bool:
        return is_zero_vector(self.reduce_modulo(v))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.pivots == other.pivots
            and all(vectors_equal(a, b) for a, b in zip(self.rows, other.rows))
        )

    def __repr__(self) -> str:
        return f"Subspace(rank={self.rank}, dimension={self.dimension}, pivots={self.pivots})"


def echelon_basis(vectors: Sequence[ModelVector], dimension: int) -> List[ModelVector]:
    """Reduced echelon basis of the span of the vectors."""
    return Subspace(vectors, dimension).basis


# Algebras


class SCLieAlgebra:
    """A nilpotent Lie algebra over QQ with basis e_0..e_(d-1).

    Construction checks the Jacobi identity on every basis triple and
    computes the lower central series; the nilpotency class is its length
    minus one.
    """

    def __init__(self, constants: np.ndarray, labels: Optional[Sequence[str]] = None):
        self.dimension = constants.shape[0]
        self.constants = constants
        self.labels = list(labels) if labels is not None else [
            f"e{i}" for i in range(self.dimension)
        ]
        if len(self.labels) != self.dimension:
            raise ShapeMismatch(
                f"{len(self.labels)} labels for an algebra of dimension {self.dimension}."
            )
        self._check_jacobi()
        self.lower_central_series = self._lower_central_series()
        self.nilpotency_class = len(self.lower_central_series) - 1

    def basis(self) -> List[ModelVector]:
        return [basis_vector(i, self.dimension) for i in range(self.dimension)]

    def bracket(self, a: ModelVector, b: ModelVector) -> ModelVector:
        return _normalize(
            np.tensordot(np.tensordot(a, self.constants, axes=(0, 0)), b, axes=(0, 0))
        )

    def structure_constants(self) -> Dict[Tuple[int, int], List[Scalar]]:
        """Nonzero brackets [e_i, e_j] for i < j."""
        return {
            (i, j): list(self.constants[i, j])
            for i, j in combinations(range(self.dimension), 2)
            if not is_zero_vector(self.constants[i, j])
        }

    def _check_jacobi(self):
        basis = self.basis()
        for i, j, k in combinations(range(self.dimension), 3):
            a, b, c = basis[i], basis[j], basis[k]
            total = (
                self.bracket(a, self.bracket(b, c))
                + self.bracket(b, self.bracket(c, a))
                + self.bracket(c, self.bracket(a, b))
            )
            if not is_zero_vector(total):
                raise JacobiViolation(
                    f"Jacobi identity fails on ({self.labels[i]}, {self.labels[j]}, "
                    f"{self.labels[k]})."
                )

    def _lower_central_series(self) -> List[Subspace]:
        series = [Subspace.full(self.dimension)]
        while series[-1].rank:
            brackets = [
                self.bracket(e, v) for e in self.basis() for v in series[-1].basis
            ]
            layer = Subspace(brackets, self.dimension)
            if layer.rank == series[-1].rank:
                raise NotNilpotent(
                    f"Lower central series stabilizes at rank {layer.rank} above zero."
                )
            series.append(layer)
        return series

    def __eq__(self, other) -> bool:
        if not isinstance(other, SCLieAlgebra):
            return NotImplemented
        return self.dimension == other.dimension and all(
            a == b for a, b in zip(self.constants.flat, other.constants.flat)
        )

    def __repr__(self) -> str:
        return f"SCLieAlgebra(dimension={self.dimension}, class={self.nilpotency_class})"


def make_algebra(
    dimension: int,
    constants: Mapping[Tuple[int, int], Sequence],
    labels: Optional[Sequence[str]] = None,
) -> SCLieAlgebra:
    """Builds an algebra from brackets [e_i, e_j] = sum_k coeffs[k] e_k.

    Args:
        dimension: d >= 1.
        constants: Coefficient lists keyed by index pairs; omitted pairs
            bracket to zero and (j, i) is filled in by antisymmetry.
        labels: Optional basis names.

    Raises:
        ShapeMismatch: On malformed or contradictory entries.
        JacobiViolation: If the Jacobi identity fails.
        NotNilpotent: If the lower central series never reaches zero.
    """
    if dimension < 1:
        raise ShapeMismatch(f"Algebra dimension must be >= 1, got {dimension}.")
    table = np.empty((dimension, dimension, dimension), dtype=object)
    table.fill(QQ(0))
    given = set()
    for (i, j), coeffs in constants.items():
        if not (0 <= i < dimension and 0 <= j < dimension):
            raise ShapeMismatch(f"Bracket index ({i}, {j}) outside dimension {dimension}.")
        if len(coeffs) != dimension:
            raise ShapeMismatch(
                f"Bracket ({i}, {j}) has {len(coeffs)} coefficients, expected {dimension}."
            )
        vector = model_vector(coeffs)
        if i == j:
            if not is_zero_vector(vector):
                raise ShapeMismatch(f"[e{i}, e{i}] must be zero.")
            continue
        if (j, i) in given and not vectors_equal(table[i, j], vector):
            raise ShapeMismatch(f"Brackets ({i}, {j}) and ({j}, {i}) disagree.")
        given.add((i, j))
        table[i, j] = vector
        table[j, i] = _normalize(-vector)
    return SCLieAlgebra(table, labels)


def heisenberg_algebra() -> SCLieAlgebra:
    """[e0, e1] = e2, class 2."""
    return make_algebra(3, {(0, 1): [0, 0, 1]})


def abelian_algebra(dimension: int) -> SCLieAlgebra:
    return make_algebra(dimension, {})


def free_nilpotent_algebra(m: int, n: int) -> SCLieAlgebra:
    """The free nilpotent Lie algebra of class n on m generators, with the
    Lyndon words of degree <= n as basis.
    """
    words = enumerate_lyndon(m, n)
    index = {w: k for k, w in enumerate(words)}
    constants = {}
    for (i, u), (j, v) in combinations(enumerate(words), 2):
        if len(u) + len(v) > n:
            continue
        product = lie_element_bracket(LieElement(m, n, {u: QQ(1)}), LieElement(m, n, {v: QQ(1)}))
        coeffs = [QQ(0)] * len(words)
        for w, c in product.coords.items():
            coeffs[index[w]] = c
        constants[(i, j)] = coeffs
    return make_algebra(len(words), constants, ["".join(map(str, w)) for w in words])


# Evaluation


def evaluate_lie(
    algebra: SCLieAlgebra,
    element: Union[LieElement, TruncatedSeries],
    args: Sequence[ModelVector],
) -> ModelVector:
    """Evaluates a free Lie element at model vectors.

    Brackets of more than class-many vectors vanish, so only Lyndon words
    of degree <= class contribute.

    Raises:
        ArityMismatch: If the number of arguments differs from m.
        TruncationTooSmall: If the element is truncated below the class.
    """
    if isinstance(element, TruncatedSeries):
        element = series_to_lie(element)
    if len(args) != element.num_generators:
        raise ArityMismatch(
            f"Expected {element.num_generators} model vectors, got {len(args)}."
        )
    if element.truncation_order < algebra.nilpotency_class:
        raise TruncationTooSmall(
            f"Truncation {element.truncation_order} is below the class "
            f"{algebra.nilpotency_class} of the model."
        )
    args = [_normalize(a) for a in args]
    cache: Dict = {}
    total = zero_vector(algebra.dimension)
    for word, coeff in element.coords.items():
        if len(word) > algebra.nilpotency_class:
            continue
        value = evaluate_tree(bracketing(word), args, algebra.bracket, cache)
        total = total + value * as_rational(coeff)
    return _normalize(total)


def _model_order(algebra: SCLieAlgebra) -> int:
    return max(algebra.nilpotency_class, 1)


def gr_mul(algebra: SCLieAlgebra, a: ModelVector, b: ModelVector) -> ModelVector:
    """The BCH product a * b evaluated in the model."""
    return evaluate_lie(algebra, bch_generators(_model_order(algebra)), [a, b])


def gr_power(algebra: SCLieAlgebra, a: ModelVector, exponent) -> ModelVector:
    return _normalize(_normalize(a) * as_rational(to_scalar(exponent)))


def gr_inverse(algebra: SCLieAlgebra, a: ModelVector) -> ModelVector:
    return _normalize(-_normalize(a))


def gr_commutator(algebra: SCLieAlgebra, a: ModelVector, b: ModelVector) -> ModelVector:
    """The group commutator (-a) * (-b) * a * b."""
    left = gr_mul(algebra, gr_inverse(algebra, a), gr_inverse(algebra, b))
    return gr_mul(algebra, gr_mul(algebra, left, a), b)


def model_group_operations(algebra: SCLieAlgebra) -> GroupOperations:
    return GroupOperations(
        unit=lambda: zero_vector(algebra.dimension),
        mul=lambda a, b: gr_mul(algebra, a, b),
        inv=lambda a: gr_inverse(algebra, a),
        power=lambda a, s: gr_power(algebra, a, s),
        comm=lambda a, b: gr_commutator(algebra, a, b),
    )


def model_term_operations(algebra: SCLieAlgebra) -> TermOperations:
    return TermOperations(
        zero=lambda: zero_vector(algebra.dimension),
        add=lambda a, b: _normalize(a + b),
        bracket=algebra.bracket,
        star=lambda a, b: gr_mul(algebra, a, b),
        scale=lambda s, a: gr_power(algebra, a, s),
    )


def evaluate_group_word(
    algebra: SCLieAlgebra, word: GroupWord, args: Sequence[ModelVector]
) -> ModelVector:
    return evaluate_word(word, args, model_group_operations(algebra))


def evaluate_mixed_term(
    algebra: SCLieAlgebra, term: MixedTerm, args: Sequence[ModelVector]
) -> ModelVector:
    """Interprets a mixed term directly with the model's own operations."""
    return evaluate_term(term, args, model_term_operations(algebra))


def evaluate_decomposition(
    algebra: SCLieAlgebra, decomposition: MlsDecomposition, args: Sequence[ModelVector]
) -> ModelVector:
    """Product of the commutator-word powers of a decomposition in Gr(A)."""
    comm = lambda a, b: gr_commutator(algebra, a, b)
    cache: Dict = {}
    result = zero_vector(algebra.dimension)
    for word, exponent in decomposition:
        factor = evaluate_tree(bracketing(word), list(args), comm, cache)
        result = gr_mul(algebra, result, gr_power(algebra, factor, exponent))
    return result


def evaluate_group_element(
    algebra: SCLieAlgebra, q: GroupElement, args: Sequence[ModelVector]
) -> ModelVector:
    """Evaluates a group-like series in Gr(A) through its collected form."""
    if len(args) != q.shape[0]:
        raise ArityMismatch(f"Expected {q.shape[0]} model vectors, got {len(args)}.")
    return evaluate_decomposition(algebra, collect(q), args)


# The functor pair


def lie_from_group_ops(algebra: SCLieAlgebra) -> SCLieAlgebra:
    """Rebuilds the Lie algebra from the group Gr(A) alone.

    Addition is the evaluation of the collected form of exp(X0 + X1) and
    the bracket that of exp([X0, X1]), both read with group operations
    only.

    Raises:
        ReconstructionMismatch: If either operation disagrees with A.
    """
    order = max(algebra.nilpotency_class, 2)
    sum_formula, bracket_formula = mls_sum_formula(order), mls_bracket_formula(order)
    basis = algebra.basis()
    constants = {}
    for i, j in combinations(range(algebra.dimension), 2):
        total = evaluate_decomposition(algebra, sum_formula, [basis[i], basis[j]])
        if not vectors_equal(total, basis[i] + basis[j]):
            raise ReconstructionMismatch(
                f"Group addition of {algebra.labels[i]} and {algebra.labels[j]} "
                "disagrees with the vector sum."
            )
        constants[(i, j)] = list(
            evaluate_decomposition(algebra, bracket_formula, [basis[i], basis[j]])
        )
    rebuilt = make_algebra(algebra.dimension, constants, algebra.labels)
    if rebuilt != algebra:
        raise ReconstructionMismatch("Structure constants read from Gr(A) differ from A.")
    return rebuilt


def group_lcs(algebra: SCLieAlgebra) -> List[Subspace]:
    """Lower central series of Gr(A) from group commutators alone.

    Each layer is spanned by the commutators of basis vectors with the
    previous layer together with their iterated commutators with basis
    vectors.

    Raises:
        ReconstructionMismatch: If it differs from the Lie lower central series.
    """
    d = algebra.dimension
    basis = algebra.basis()
    series = [Subspace.full(d)]
    while series[-1].rank:
        span = Subspace([], d)
        collected: List[ModelVector] = []
        frontier = [gr_commutator(algebra, e, b) for e in basis for b in series[-1].basis]
        while frontier:
            fresh = []
            for v in frontier:
                if not span.contains(v):
                    collected.append(v)
                    span = Subspace(collected, d)
                    fresh.append(v)
            frontier = [gr_commutator(algebra, e, v) for e in basis for v in fresh]
        series.append(span)
        if len(series) > d + 2:
            raise NonConvergence("Group lower central series does not terminate.")
    lie_series = algebra.lower_central_series
    if len(series) != len(lie_series) or any(a != b for a, b in zip(series, lie_series)):
        raise ReconstructionMismatch(
            "Group lower central series differs from the Lie lower central series."
        )
    return series


# Equations


def augmentation(t: LieElement) -> Scalar:
    """Coefficient of the last generator, the unknown, in t."""
    return t.coords.get((t.num_generators - 1,), QQ(0))


def _layer_component(algebra: SCLieAlgebra, r: ModelVector, depth: int) -> ModelVector:
    layers = algebra.lower_central_series
    if not layers[depth - 1].contains(r):
        raise NonConvergence(f"Residual left layer {depth} of the lower central series.")
    return layers[depth].reduce_modulo(r)


def _check_equation(algebra: SCLieAlgebra, t: LieElement, args: Sequence[ModelVector]):
    if len(args) != t.num_generators - 1:
        raise ArityMismatch(
            f"Equation over {t.num_generators} generators needs "
            f"{t.num_generators - 1} parameters, got {len(args)}."
        )
    e = as_rational(augmentation(t))
    if e == 0:
        raise SingularEquation("The equation has zero augmentation.")
    return e


def solve_equation(
    algebra: SCLieAlgebra, t: LieElement, args: Sequence[ModelVector]
) -> ModelVector:
    """The unique f with t(args, f) = 0 for t of nonzero augmentation e.

    Lifts through the lower central series: at depth d the residual lies in
    A_d, and right multiplication by delta = -(residual mod A_(d+1)) / e
    pushes it into A_(d+1).

    Raises:
        SingularEquation: If the augmentation is zero.
        ArityMismatch: If args does not supply every parameter.
    """
    e = _check_equation(algebra, t, args)
    args = [_normalize(a) for a in args]
    f = zero_vector(algebra.dimension)
    for depth in range(1, algebra.nilpotency_class + 1):
        r = evaluate_lie(algebra, t, args + [f])
        delta = _layer_component(algebra, r, depth) * (-1 / e)
        logger.debug("Solver depth %d correction %s", depth, list(delta))
        f = gr_mul(algebra, f, _normalize(delta))
    if not is_zero_vector(evaluate_lie(algebra, t, args + [f])):
        raise NonConvergence("Solver finished with a nonzero residual.")
    return f


def solve_equation_layered(
    algebra: SCLieAlgebra, t: LieElement, args: Sequence[ModelVector]
) -> ModelVector:
    """Independent strategy: additive updates found by solving one square
    linear system per layer of the lower central series.

    At depth d the unknown correction ranges over the echelon rows of A_d
    whose pivots are not pivots of A_(d+1); the system is assembled from
    residual differences and solved with an LU factorization.
    """
    _check_equation(algebra, t, args)
    args = [_normalize(a) for a in args]
    layers = algebra.lower_central_series
    f = zero_vector(algebra.dimension)
    for depth in range(1, algebra.nilpotency_class + 1):
        upper, lower = layers[depth - 1], layers[depth]
        complement = [
            (row, p) for row, p in zip(upper.rows, upper.pivots) if p not in lower.pivots
        ]
        if not complement:
            continue
        r = lower.reduce_modulo(evaluate_lie(algebra, t, args + [f]))
        columns = [
            lower.reduce_modulo(evaluate_lie(algebra, t, args + [_normalize(f + row)])) - r
            for row, _ in complement
        ]
        matrix = DomainMatrix.from_list(
            [[column[p] for column in columns] for _, p in complement], QQ
        )
        rhs = DomainMatrix.from_list([[-r[p]] for _, p in complement], QQ)
        solution = matrix.lu_solve(rhs).to_list()
        for (row, _), (x,) in zip(complement, solution):
            f = _normalize(f + row * x)
    if not is_zero_vector(evaluate_lie(algebra, t, args + [f])):
        raise NonConvergence("Layered solver finished with a nonzero residual.")
    return f


def group_equation_term(exponents: Sequence) -> MixedTerm:
    """The mixed term x0 * (l1 y) * x1 * (l2 y) * ... with y the last variable."""
    y = Var(len(exponents))
    factors: List[MixedTerm] = []
    for i, exponent in enumerate(exponents):
        factors.extend([Var(i), Scale(to_scalar(exponent), y)])
    return star(*factors)


def solve_group_equation(
    algebra: SCLieAlgebra, gs: Sequence[ModelVector], exponents: Sequence
) -> ModelVector:
    """Solves g_1 f^l_1 ... g_n f^l_n = 1 in Gr(A).

    Raises:
        SingularEquation: If the exponents sum to zero.
    """
    if len(gs) != len(exponents):
        raise ArityMismatch(f"{len(gs)} factors but {len(exponents)} exponents.")
    if sum(as_rational(to_scalar(x)) for x in exponents) == 0:
        raise SingularEquation("Exponents sum to zero.")
    term = group_equation_term(exponents)
    t = term_to_lie(term, _model_order(algebra), len(gs) + 1)
    return solve_equation(algebra, t, gs)


def group_equation_residual(
    algebra: SCLieAlgebra, gs: Sequence[ModelVector], exponents: Sequence, f: ModelVector
) -> ModelVector:
    """g_1 f^l_1 ... g_n f^l_n computed with the group operations of Gr(A)."""
    factors = []
    for g, exponent in zip(gs, exponents):
        factors.extend([_normalize(g), gr_power(algebra, f, exponent)])
    return reduce(
        lambda a, b: gr_mul(algebra, a, b), factors, zero_vector(algebra.dimension)
    )

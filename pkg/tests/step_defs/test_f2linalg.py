"""Step definitions for F2 linear algebra."""

import numpy as np
import pytest
from pytest_bdd import scenarios, given, when, then, parsers
from scipy import stats

from selmer.errors import DimensionMismatchError, InadmissibleError
from selmer.f2linalg import (
    BitMatrix,
    Subspace,
    annihilator,
    enumerate_subspaces,
    gaussian_binomial,
    inverse,
    random_subspace,
    rref,
)

scenarios('../features/f2linalg.feature')


def vec(text: str) -> int:
    """"110" -> e0 + e1."""
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def span(rows: str) -> Subspace:
    parts = rows.split()
    return Subspace.span((vec(p) for p in parts), len(parts[0]))


# === Matrices ===

@given(parsers.parse('the matrix with rows "{rows}"'))
def matrix_with_rows(context, rows):
    """Matrix given row by row."""
    context["matrix"] = BitMatrix.from_strings(rows.split())


@given(parsers.parse('the {n:d} x {m:d} identity matrix'))
def identity_matrix(context, n, m):
    """Square identity."""
    assert n == m
    context["matrix"] = BitMatrix.identity(n)


@given(parsers.parse('the zero matrix with {rows:d} rows and {cols:d} columns'))
def zero_matrix(context, rows, cols):
    """All-zero matrix."""
    context["matrix"] = BitMatrix.zeros(rows, cols)


@when('I reduce it to row echelon form')
def reduce_matrix(context):
    """Compute the RREF and rank."""
    context["reduced"], context["rank"] = rref(context["matrix"])


@then(parsers.parse('the rank is {rank:d}'))
def check_rank(context, rank):
    """Rank equals the number of nonzero rows."""
    assert context["rank"] == rank
    assert sum(1 for r in context["reduced"].rows if r) == rank


@then('the reduced matrix equals the input')
def reduced_equals_input(context):
    """RREF of an RREF matrix is itself."""
    assert context["reduced"] == context["matrix"]


@then('the matrix times its inverse is the identity')
def matrix_inverse(context):
    """M @ M^-1 = I."""
    m = context["matrix"]
    assert m @ inverse(m) == BitMatrix.identity(m.nrows)


@then(parsers.parse('the annihilator of "{functional}" has dimension {dim:d}'))
def annihilator_dimension(functional, dim):
    """Kernel of one nonzero functional is a hyperplane."""
    kernel = annihilator([vec(functional)], len(functional))
    assert kernel.dim == dim
    assert all(bin(v & vec(functional)).count("1") % 2 == 0 for v in kernel.vectors())


# === Subspaces ===

@given(parsers.parse('the subspace {name} spanned by "{rows}"'))
def subspace_spanned(context, name, rows):
    """Span of the listed vectors."""
    context[name] = span(rows)


@when('I intersect A and B')
def intersect(context):
    """A meet B."""
    context["result"] = context["A"].meet(context["B"])


@when('I add A and B')
def add(context):
    """A join B."""
    context["result"] = context["A"].join(context["B"])


@then('the result is the zero subspace')
def result_is_zero(context):
    """No nonzero vectors."""
    assert context["result"].dim == 0
    assert context["result"] == Subspace.zero(context["result"].ambient_dim)


@then('the result is the full space')
def result_is_full(context):
    """Everything."""
    result = context["result"]
    assert result == Subspace.full(result.ambient_dim)


@then(parsers.parse('the result is spanned by "{rows}"'))
def result_spanned(context, rows):
    """Canonical forms coincide."""
    assert context["result"] == span(rows)


@then(parsers.parse('the result has dimension {dim:d}'))
def result_dimension(context, dim):
    """dim of the result."""
    assert context["result"].dim == dim


@then('A and B are equal')
def subspaces_equal(context):
    """Same set of vectors, same canonical basis."""
    assert context["A"].equals(context["B"])
    assert set(context["A"].vectors()) == set(context["B"].vectors())


@then(parsers.parse('A contains "{v}"'))
def contains(context, v):
    """Membership."""
    assert vec(v) in context["A"]


@then(parsers.parse('A does not contain "{v}"'))
def does_not_contain(context, v):
    """Non-membership."""
    assert not context["A"].contains(vec(v))


@then('intersecting A and B fails with a dimension mismatch')
def intersect_mismatch(context):
    """Ambient dimensions must agree."""
    with pytest.raises(DimensionMismatchError):
        context["A"].meet(context["B"])


@given(parsers.parse('{count:d} random pairs of subspaces of dimension at most {n:d}'))
def random_pairs(context, rng, count, n):
    """Pairs of random subspaces in random ambient dimension."""
    pairs = []
    for _ in range(count):
        dim = int(rng.integers(1, n + 1))
        a = random_subspace(dim, int(rng.integers(0, dim + 1)), rng)
        b = random_subspace(dim, int(rng.integers(0, dim + 1)), rng)
        pairs.append((a, b))
    context["pairs"] = pairs


@then('dim(A meet B) + dim(A join B) = dim A + dim B for every pair')
def dimension_formula(context):
    """Grassmann formula."""
    for a, b in context["pairs"]:
        assert a.meet(b).dim + a.join(b).dim == a.dim + b.dim
        assert a.meet(b).is_subspace_of(a) and a.is_subspace_of(a.join(b))


# === Enumeration ===

@when(parsers.parse('I enumerate the {k:d}-dimensional subspaces of F2^{n:d}'))
def enumerate_all(context, k, n):
    """Materialize the enumeration."""
    context["n"], context["k"] = n, k
    context["subspaces"] = list(enumerate_subspaces(n, k))


@then(parsers.parse('I get {count:d} distinct subspaces'))
def distinct_count(context, count):
    """No repeats, right dimension."""
    subspaces = context["subspaces"]
    assert len(subspaces) == count
    assert len(set(subspaces)) == count
    assert all(s.dim == context["k"] for s in subspaces)


@then('the count equals the Gaussian binomial')
def gaussian_count(context):
    """[n choose k]_2."""
    assert len(context["subspaces"]) == gaussian_binomial(context["n"], context["k"])


# === Random subspaces ===

@when(parsers.parse('I draw a random {k:d}-dimensional subspace of F2^{n:d}'))
def draw_one(context, rng, k, n):
    """One uniform draw."""
    context["result"] = random_subspace(n, k, rng)


@when(parsers.parse('I draw a random {k:d}-dimensional subspace of F2^{n:d} containing "{v}"'))
def draw_through(context, rng, k, n, v):
    """One draw through a fixed vector."""
    context["result"] = random_subspace(n, k, rng, containing=vec(v))


@then(parsers.parse('drawing a {k:d}-dimensional subspace of F2^{n:d} containing the zero vector fails'))
def draw_through_zero(rng, k, n):
    """The vector to contain must be nonzero."""
    with pytest.raises(InadmissibleError):
        random_subspace(n, k, rng, containing=0)


@when(parsers.parse('I draw {count:d} random {k:d}-dimensional subspaces of F2^{n:d}'))
def draw_many(context, rng, count, k, n):
    """Tally repeated draws."""
    tally = {}
    for _ in range(count):
        s = random_subspace(n, k, rng)
        tally[s] = tally.get(s, 0) + 1
    context["tally"] = tally
    context["all"] = list(enumerate_subspaces(n, k))


@then(parsers.parse('all {count:d} subspaces occur'))
def all_occur(context, count):
    """Every subspace is hit."""
    assert len(context["all"]) == count
    assert set(context["tally"]) == set(context["all"])


@then(parsers.parse('a chi-square test against the uniform distribution has p-value above {p:g}'))
def uniform_chi_square(context, p):
    """Frequencies are consistent with 1/#subspaces each."""
    observed = np.array([context["tally"].get(s, 0) for s in context["all"]])
    assert stats.chisquare(observed).pvalue > p

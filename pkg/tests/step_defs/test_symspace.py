"""Step definitions for symmetric bilinear spaces and Witt extension."""

import numpy as np
import pytest
from pytest_bdd import scenarios, given, when, then, parsers

from selmer.errors import DegenerateFormError, InadmissibleError, WittPreconditionError
from selmer.f2linalg import (
    BitMatrix,
    Subspace,
    enumerate_subspaces,
    random_independent_rows,
    solve_left,
)
from selmer.symspace import (
    SpaceType,
    SymSpace,
    aut_order,
    brute_isometries,
    classify,
    expected_witt_failure,
    extends_somewhere,
    max_isotropic_dim,
    witt_extend,
    witt_selftest,
)

scenarios('../features/symspace.feature')


def vec(text: str) -> int:
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def _stabilizes(g: BitMatrix, sub: Subspace) -> bool:
    return Subspace.span((g.apply(r) for r in sub.rows), sub.ambient_dim) == sub


# === Classification ===

@given(parsers.parse('the Gram matrix "{rows}"'))
def gram_matrix(context, rows):
    """Gram matrix written row by row."""
    context["gram"] = BitMatrix.from_strings(rows.split())


@when('I classify the space')
def classify_space(context):
    """Run the classification."""
    context["space"] = classify(context["gram"])


@then(parsers.parse('the type is "{type_name}"'))
def check_type(context, type_name):
    """Isometry type."""
    assert context["space"].type is SpaceType(type_name)


@then(parsers.parse('the canonical vector is "{v}"'))
def check_vcan(context, v):
    """Sum of an orthonormal basis."""
    space = context["space"]
    assert space.vcan == vec(v)
    assert all(space.b(w, space.vcan) == space.b(w, w) for w in range(1 << space.n))


@then('there is no canonical vector')
def no_vcan(context):
    """Alternating spaces have none."""
    assert context["space"].vcan is None


@then('the canonical vector is isotropic')
def vcan_isotropic(context):
    """b(vcan, vcan) = 0 in even dimension."""
    space = context["space"]
    assert space.norm(space.vcan) == 0
    assert space.is_totally_isotropic(Subspace.span([space.vcan], space.n))


@then(parsers.parse('the alternating subspace has dimension {dim:d}'))
def alternating_dim(context, dim):
    """Kernel of v -> b(v, v)."""
    space = context["space"]
    alt = space.alternating_subspace()
    assert alt.dim == dim
    assert all(space.norm(v) == 0 for v in alt.vectors())


@then('classifying fails with a degenerate form error')
def classify_fails(context):
    """Asymmetric or singular input."""
    with pytest.raises(DegenerateFormError):
        classify(context["gram"])


@then('the orthogonal complement of the whole space is zero')
def orth_of_full(context):
    """Nondegeneracy."""
    space = context["space"]
    assert space.orth_complement(Subspace.full(space.n)).dim == 0


@given(parsers.parse('a random {type_name} space of dimension {n:d}'))
def random_change_of_basis(context, rng, type_name, n):
    """Standard space seen through a random invertible matrix C."""
    base = SymSpace.standard(SpaceType(type_name), n)
    change = BitMatrix.from_rows(random_independent_rows(n, n, rng), n)
    context["base"] = base
    context["change"] = change
    context["space"] = classify(change @ base.gram @ change.transpose())


@then('the canonical vector maps to the standard one under the change of basis')
def vcan_invariant(context):
    """v -> v·C is an isometry onto the standard space, so it carries vcan to vcan."""
    space, base, change = context["space"], context["base"], context["change"]
    if base.vcan is None:
        assert space.vcan is None
    else:
        assert change.apply(space.vcan) == base.vcan


# === Orders ===

@then(parsers.parse('|Aut| of the standard {type_name} space of dimension {n:d} is {order:d}'))
def aut_value(type_name, n, order):
    """Closed-form order at q = 2."""
    assert aut_order(SpaceType(type_name), n) == order


@then(parsers.parse('counting isometries of the standard {type_name} space of dimension {n:d} gives the formula value'))
def aut_brute(type_name, n):
    """Backtracking count against the formula."""
    space = SymSpace.standard(SpaceType(type_name), n)
    isometries = list(brute_isometries(space))
    assert all(space.is_isometry(g) for g in isometries)
    assert len(isometries) == aut_order(space.type, n)


@then(parsers.parse(
    'for every isotropic subspace kind of the standard {type_name} space of dimension {n:d} '
    'the stabilizer order matches brute force'
))
def stabilizer_brute(type_name, n):
    """One totally isotropic U per admissible (k, vcan in U), stabilizer counted directly."""
    space_type = SpaceType(type_name)
    space = SymSpace.standard(space_type, n)
    isometries = list(brute_isometries(space))
    flags = (False, True) if space_type is SpaceType.NONALT_EVEN else (False,)
    checked = 0
    for flag in flags:
        lo, hi = max_isotropic_dim(space_type, n, flag)
        for k in range(lo, hi + 1):
            U = next(
                sub for sub in enumerate_subspaces(n, k)
                if space.is_totally_isotropic(sub)
                and (space.vcan is not None and sub.contains(space.vcan)) == flag
            )
            count = sum(1 for g in isometries if _stabilizes(g, U))
            assert count == aut_order(space_type, n, 2, (k, flag)), (k, flag)
            checked += 1
    assert checked > 0


@then(parsers.parse(
    'the stabilizer order of a {k:d}-dimensional isotropic subspace of {type_name} {n:d} is rejected'
))
def stabilizer_rejected(k, type_name, n):
    """k above the maximal isotropic dimension."""
    with pytest.raises(InadmissibleError):
        aut_order(SpaceType(type_name), n, 2, (k, False))


# === Witt extension ===

def _sigma(space: SymSpace, src: str, dst: str):
    """Domain W0 and the images of its canonical basis rows."""
    src_rows = [vec(s) for s in src.split()]
    dst_rows = [vec(d) for d in dst.split()]
    domain = Subspace.span(src_rows, space.n)
    images = []
    for r in domain.rows:
        y = solve_left(src_rows, r)
        image = 0
        for i, d in enumerate(dst_rows):
            if y >> i & 1:
                image ^= d
        images.append(image)
    return domain, BitMatrix.from_rows(images, space.n)


@when(parsers.parse('I extend the map sending "{src}" to "{dst}"'))
def extend_map(context, src, dst):
    """Run the extension."""
    domain, sigma = _sigma(context["space"], src, dst)
    context["domain"], context["sigma"] = domain, sigma
    context["extension"] = witt_extend(context["space"], domain, sigma)


@then('the extension is an isometry restricting to the map')
def extension_ok(context):
    """M·G·M^T = G and M = sigma on W0."""
    space, m = context["space"], context["extension"]
    assert m @ space.gram @ m.transpose() == space.gram
    assert space.is_isometry(m)
    for w, s in zip(context["domain"].rows, context["sigma"].rows):
        assert m.apply(w) == s


@then(parsers.parse('extending the map sending "{src}" to "{dst}" fails on the "{hypothesis}" hypothesis'))
def extension_refused(context, src, dst, hypothesis):
    """The failing hypothesis is named."""
    domain, sigma = _sigma(context["space"], src, dst)
    with pytest.raises(WittPreconditionError) as excinfo:
        witt_extend(context["space"], domain, sigma)
    assert excinfo.value.hypothesis == hypothesis


@when(parsers.parse('I run the Witt self-test with {trials:d} trials up to dimension {max_dim:d}'))
def run_selftest(context, trials, max_dim):
    """Random instances of every type."""
    context["report"] = witt_selftest(trials, np.random.default_rng(7), max_dim)


@then('there are no failures')
def no_failures(context):
    """Every instance handled correctly."""
    report = context["report"]
    assert report.failures == []
    assert report.ok
    assert report.extended + report.rejected == report.trials


@then('some instances were extended and some rejected')
def both_outcomes(context):
    """Valid and invalid instances both occurred."""
    assert context["report"].extended > 0
    assert context["report"].rejected > 0


@then(parsers.parse('the map sending "{src}" to "{dst}" is expected to fail on "{hypothesis}"'))
def expected_failure(context, src, dst, hypothesis):
    """Hypothesis named from the graph of sigma alone."""
    domain, sigma = _sigma(context["space"], src, dst)
    assert expected_witt_failure(context["space"], domain, sigma) == hypothesis


@then(parsers.parse('the map sending "{src}" to "{dst}" is expected to extend'))
def expected_extension(context, src, dst):
    """Every hypothesis holds."""
    domain, sigma = _sigma(context["space"], src, dst)
    assert expected_witt_failure(context["space"], domain, sigma) is None


@then(parsers.parse('exhaustive search agrees that the map sending "{src}" to "{dst}" does not extend'))
def no_isometry_extends(context, src, dst):
    """No element of Aut(V) restricts to sigma."""
    domain, sigma = _sigma(context["space"], src, dst)
    assert not extends_somewhere(context["space"], domain, sigma)


@then(parsers.parse('exhaustive search finds an extension of the map sending "{src}" to "{dst}"'))
def some_isometry_extends(context, src, dst):
    """Some element of Aut(V) restricts to sigma."""
    domain, sigma = _sigma(context["space"], src, dst)
    assert extends_somewhere(context["space"], domain, sigma)


@when(parsers.parse('I run the Witt self-test with {trials:d} trials per space type up to dimension {max_dim:d}'))
def run_selftest_per_type(context, trials, max_dim):
    """One self-test per space type."""
    rng = np.random.default_rng(7)
    context["reports"] = {
        t: witt_selftest(trials, rng, max_dim, [t]) for t in SpaceType
    }


@then('no space type has failures')
def no_failures_per_type(context):
    """Every type handled, with both outcomes."""
    for space_type, report in context["reports"].items():
        assert report.failures == [], (space_type, report.failures[:5])
        assert report.by_type[space_type.value] == report.trials
        assert report.extended > 0 and report.rejected > 0

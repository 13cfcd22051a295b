"""Step definitions for maximal isotropic subspaces, orbits and the mass formula."""

import pytest
from pytest_bdd import scenarios, given, when, then, parsers

from selmer.errors import NotIsotropicError, NotMaximalError, OppositeParityError
from selmer.f2linalg import BitMatrix, Subspace
from selmer.isotropic import (
    OrthoSum,
    brute_enumerate_mts,
    brute_stabilizer_order,
    class_labels,
    decompose,
    label_of,
    mass_check,
    odd_mass_identity,
    orbit_partition,
    orbit_stats,
    parse_rows,
    representative,
    same_parity_pairs,
)
from selmer.parser import parse_space
from selmer.symspace import SpaceType, SymSpace

scenarios('../features/isotropic.feature')


def vec(text: str) -> int:
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def _sum(left: str, right: str) -> OrthoSum:
    (w_type, n), (wp_type, np_) = parse_space(left), parse_space(right)
    return OrthoSum.standard(w_type, n, wp_type, np_)


def _rows(vs: OrthoSum, rows: str) -> Subspace:
    return parse_rows(rows.replace("/", "|").split(), vs.n, vs.np)


# === Decomposition ===

@given(parsers.parse('the sum of {left} and {right}'))
def orthogonal_sum(context, left, right):
    """V = W + W' from standard spaces."""
    context["vs"] = _sum(left, right)
    context["left"], context["right"] = parse_space(left), parse_space(right)


@when(parsers.parse('I decompose the subspace with rows "{rows}"'))
def decompose_rows(context, rows):
    """Structure decomposition of S."""
    vs = context["vs"]
    context["S"] = _rows(vs, rows)
    context["mts"] = decompose(vs, context["S"])


@then(parsers.parse('the intersection with W has dimension {k:d}'))
def check_k(context, k):
    """dim(S ∩ W)."""
    mts = context["mts"]
    assert mts.k == k
    assert label_of(mts).k == k


@then(parsers.parse('the stabilizer order is {stab:d}'))
def check_stab(context, stab):
    """Quotient formula for |Aut(S)|."""
    assert orbit_stats(label_of(context["mts"])).stab == stab


@then(parsers.parse("brute force over Aut(W) x Aut(W') finds {stab:d} as well"))
def check_brute_stab(context, stab):
    """Direct count of pairs of isometries fixing S."""
    assert brute_stabilizer_order(context["vs"], context["S"]) == stab


@then(parsers.parse('U is spanned by "{rows}"'))
def check_U(context, rows):
    """S ∩ W."""
    mts = context["mts"]
    assert mts.U == Subspace.span((vec(r) for r in rows.split()), mts.space.n)


@then('reassembling the pieces gives the subspace back')
def reassemble(context):
    """U + diag(tau) + U' = S."""
    assert context["mts"].assemble() == context["S"]


@then("U and U' are zero")
def zero_intersections(context):
    """No part of S lies in one summand."""
    mts = context["mts"]
    assert mts.U.dim == 0 and mts.Up.dim == 0


@then('K is all of W')
def k_full(context):
    """Complement of 0 in W."""
    mts = context["mts"]
    assert mts.K == Subspace.full(mts.space.n)


@then('tau is the identity')
def tau_identity(context):
    """The diagonal embedding."""
    assert context["mts"].tau == BitMatrix.identity(1)


@then(parsers.parse('decomposing the subspace with rows "{rows}" fails as not isotropic'))
def not_isotropic(context, rows):
    """The form does not vanish on S."""
    vs = context["vs"]
    with pytest.raises(NotIsotropicError):
        decompose(vs, _rows(vs, rows))


@then(parsers.parse('decomposing the subspace with rows "{rows}" fails as not maximal'))
def not_maximal(context, rows):
    """Totally isotropic but too small."""
    vs = context["vs"]
    with pytest.raises(NotMaximalError):
        decompose(vs, _rows(vs, rows))


# === Classes ===

def _labels(context):
    (w_type, n), (wp_type, np_) = context["left"], context["right"]
    return class_labels(w_type, n, wp_type, np_)


@then(parsers.parse('the stabilizer orders of the classes are "{orders}"'))
def class_orders(context, orders):
    """Orders in label order."""
    expected = [int(x) for x in orders.split()]
    assert [orbit_stats(label).stab for label in _labels(context)] == expected


@then(parsers.parse('there are {count:d} class labels'))
def label_count(context, count):
    """Number of equivalence classes."""
    assert len(_labels(context)) == count


@then('the labels with k = 1 are one with both flags and one with neither')
def doubled_class(context):
    """Two classes for 0 < k < n/2 when both sides are nonalternating even."""
    flags = sorted((l.wcan_in_U, l.wcan_in_Up) for l in _labels(context) if l.k == 1)
    assert flags == [(False, False), (True, True)]


@then('every label has wcan in U')
def wcan_forced(context):
    """Forced against an alternating side."""
    labels = _labels(context)
    assert [l.k for l in labels] == [1, 2]
    assert all(l.wcan_in_U for l in labels)


@then(parsers.parse('listing classes of {left} and {right} fails with an opposite parity error'))
def opposite_parity(left, right):
    """Only same-parity sums are handled."""
    (w_type, n), (wp_type, np_) = parse_space(left), parse_space(right)
    with pytest.raises(OppositeParityError):
        class_labels(w_type, n, wp_type, np_)


@then(parsers.parse('the class with k = {k:d} has stabilizer {stab:d}, orbit {orbit:d} and total {total:d}'))
def class_stats(context, k, stab, orbit, total):
    """Stabilizer, orbit and total count of one class."""
    label = next(l for l in _labels(context) if l.k == k)
    stats = orbit_stats(label)
    assert (stats.stab, stats.orbit, stats.total) == (stab, orbit, total)


@then(parsers.parse('every representative for {left} and {right} has the label it was built from'))
def representatives(left, right):
    """label_of(representative(L)) = L and decompose round-trips."""
    (w_type, n), (wp_type, np_) = parse_space(left), parse_space(right)
    for label in class_labels(w_type, n, wp_type, np_):
        rep = representative(label)
        assert label_of(rep) == label
        assert rep.space.V.is_totally_isotropic(rep.S)
        again = decompose(rep.space, rep.S)
        assert label_of(again) == label
        assert again.K.dim == again.Kp.dim == (n + np_) // 2 - again.k - again.kp


# === Brute force ===

@when('I enumerate all maximal isotropic subspaces')
def enumerate_all(context):
    """Depth-first over canonical bases."""
    context["found"] = brute_enumerate_mts(context["vs"])


@when('I enumerate the maximal isotropic lines of the hyperbolic plane')
def enumerate_plane(context):
    """Lines of the standard alternating plane, checked one by one."""
    plane = SymSpace.standard(SpaceType.ALTERNATING, 2)
    context["found"] = [
        Subspace.span([v], 2) for v in range(1, 4)
        if plane.is_totally_isotropic(Subspace.span([v], 2))
    ]


@then(parsers.parse('there are {count:d} of them'))
def found_count(context, count):
    """Distinct subspaces found."""
    assert len(context["found"]) == count
    assert len(set(context["found"])) == count


@then('each one decomposes and reassembles exactly')
def all_reassemble(context):
    """Structure theorem on every subspace."""
    vs = context["vs"]
    for S in context["found"]:
        assert decompose(vs, S).assemble() == S


@then('grouping them by label gives the orbit sizes')
def partition_matches(context):
    """Class sizes equal |Aut(W)||Aut(W')| / |Aut(S)|."""
    partition = orbit_partition(context["vs"], context["found"])
    labels = _labels(context)
    assert set(partition) == set(labels)
    for label in labels:
        assert partition[label] == orbit_stats(label).orbit


# === Mass formula ===

@when(parsers.parse('I run the mass check for {left} and {right}'))
def run_mass(context, left, right):
    """Orbit sum, brute count and formula."""
    (w_type, n), (wp_type, np_) = parse_space(left), parse_space(right)
    context["report"] = mass_check(w_type, n, wp_type, np_)


@then(parsers.parse('the summary is "{summary}"'))
def mass_summary(context, summary):
    """Human-readable summary line."""
    assert context["report"].summary() == summary


@then(parsers.parse('the check passes with formula {formula:d}'))
def mass_formula(context, formula):
    """All three numbers agree."""
    report = context["report"]
    assert report.ok
    assert report.formula == formula == report.brute == report.orbit_sum


@then('the check passes')
def mass_ok(context):
    """All three numbers agree."""
    report = context["report"]
    assert report.ok
    assert report.brute == report.orbit_sum


@then(parsers.parse("the mass check passes for every same-parity pair with n + n' at most {total:d}"))
def mass_grid(total):
    """Whole grid of small pairs."""
    pairs = same_parity_pairs(total)
    assert pairs
    for w_type, n, wp_type, np_ in pairs:
        report = mass_check(w_type, n, wp_type, np_)
        assert report.ok, (w_type, n, wp_type, np_, report.summary())


@then(parsers.parse("the odd mass identity holds for all odd n <= n' <= {top:d} at q = 2 and q = 4"))
def odd_mass(top):
    """Sum of 1/|Aut(S_k)| in closed form."""
    for q in (2, 4):
        for n in range(1, top + 1, 2):
            for np_ in range(n, top + 1, 2):
                lhs, rhs = odd_mass_identity(n, np_, q)
                assert lhs == rhs, (q, n, np_)


@then(parsers.parse("every class with n, n' at most {top:d} has a stabilizer matching its closed form"))
def closed_forms(top):
    """orbit_stats raises when a closed form disagrees with the quotient."""
    compared = 0
    kinds = [(t, d) for d in range(1, top + 1) for t in SpaceType if t.admits(d)]
    for w_type, n in kinds:
        for wp_type, np_ in kinds:
            if (n - np_) % 2:
                continue
            for label in class_labels(w_type, n, wp_type, np_):
                stats = orbit_stats(label)
                if stats.closed_form is not None:
                    assert stats.closed_form == stats.stab
                    compared += 1
    assert compared > 0

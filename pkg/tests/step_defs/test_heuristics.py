"""Step definitions for the heuristic distributions."""

from fractions import Fraction

import pytest
from pytest_bdd import scenarios, given, when, then, parsers

from selmer.errors import InadmissibleError, OutsideSupportError
from selmer.heuristics import (
    build_table,
    cond_sigrank,
    eta_malle,
    eta_plus,
    eta_plus_displayed_rational,
    eta_plus_limit,
    eta_plus_rational,
    k_distribution,
    moment,
    moment_identities,
    normalization_identities,
    p_k,
    pksum_wz_check,
    pochhammer,
    pochhammer_inf,
    random_subspace_prob,
    sigrank,
    sigrank_given_rho,
    split_prob,
    subspace_count_identities,
    wz_identities,
)
from selmer.parser import parse_signature

scenarios('../features/heuristics.feature')

# six printed places
PLACES = 6e-7


def fractions(text: str) -> list[Fraction]:
    return [Fraction(x) for x in text.split()]


def close(x, value: float) -> bool:
    return abs(float(x) - value) <= PLACES


@given(parsers.parse('the signature {sig}'))
def signature(context, sig):
    """Signature (r1, r2)."""
    context["sig"] = parse_signature(sig)


# === k and eta ===

@then(parsers.parse('the k distribution is "{values}"'))
def k_values(context, values):
    """Exact p(k) for k = 0..r1/2."""
    assert k_distribution(context["sig"]) == fractions(values)


@then('the k distribution sums to 1')
def k_sum(context):
    """Probabilities."""
    assert sum(k_distribution(context["sig"])) == 1


@then(parsers.parse('asking for p(k) with k = {k:d} is rejected'))
def k_rejected(context, k):
    """k ranges over 0..floor(r1/2)."""
    with pytest.raises(InadmissibleError):
        p_k(context["sig"], k)


@then(parsers.parse('the signature {sig} is rejected'))
def signature_rejected(sig):
    """Odd degree only."""
    with pytest.raises(InadmissibleError):
        parse_signature(sig)


@then(parsers.parse('eta+ at rho+ = {rho:d} is {value:g} to six places'))
def eta_plus_value(context, rho, value):
    """Certified narrow 2-rank probability."""
    result = eta_plus(context["sig"], rho)
    assert result.err < 1e-8
    assert close(result, value)


@then(parsers.parse('both formulas for eta+ agree up to rho+ = {top:d}'))
def eta_plus_forms(context, top):
    """Convolution against the single-sum closed form."""
    sig = context["sig"]
    for rho in range(top + 1):
        assert eta_plus_rational(sig, rho) == eta_plus_displayed_rational(sig, rho)


@then(parsers.parse('eta at rho = {rho:d} is {value:g} to six places'))
def eta_value(context, rho, value):
    """Class group 2-rank probability."""
    assert close(eta_malle(context["sig"], rho), value)


@then(parsers.parse('the limit of eta+ for r2 = {r2:d} at rho+ = {rho:d} is {value:g} to six places'))
def eta_limit(r2, rho, value):
    """r1 -> infinity."""
    assert close(eta_plus_limit(r2, rho), value)


# === Moments ===

@then(parsers.parse('moment {t:d} is exactly {value}'))
def moment_value(context, t, value):
    """Closed-form moment."""
    assert moment(context["sig"], t) == Fraction(value)


@then(parsers.parse('the first moment is 1 + 2^-{r2:d}'))
def first_moment(context, r2):
    """One real place."""
    assert moment(context["sig"], 1) == 1 + Fraction(1, 2 ** r2)


@then(parsers.parse('the Pochhammer symbol (2)_{m:d} is {value}'))
def pochhammer_value(m, value):
    """Finite product."""
    assert pochhammer(2, m) == Fraction(value)


@then(parsers.parse('the Pochhammer symbol (2)_inf is {value:g} to six places'))
def pochhammer_infinite(value):
    """Infinite product with a tail bound."""
    result = pochhammer_inf(2)
    assert close(result, value)
    assert result.err < 1e-8


@then(parsers.parse('the weighted sum at q = {q:d}, m = {m:d}, r2 = {r2:d} is {value}'))
def weighted_sum(q, m, r2, value):
    """sum_k q^k p~(k)."""
    triple, ok = pksum_wz_check(q, m, r2)
    assert ok
    assert triple.lhs == triple.rhs == Fraction(value)


@then(parsers.parse('the WZ check passes for q in 2 and 4, m up to {m:d} and r2 up to {r2:d}'))
def wz_grid(m, r2):
    """Every certificate verifies."""
    results = wz_identities((2, 4), m, r2)
    assert len(results) == 2 * (m + 1) * (r2 + 1)
    assert all(r.ok for r in results), [r.name for r in results if not r.ok]


# === Subspaces ===

@then(parsers.parse(
    'the probability of intersection dimension {s:d} for q = {q:d}, m = {m:d}, r = {r:d}, t = {t:d} is {p}'
))
def intersection_prob(s, q, m, r, t, p):
    """dim(E ∩ Y) for random E through e."""
    assert random_subspace_prob(q, m, r, t, s) == Fraction(p)


@then(parsers.parse(
    'intersection dimension {s:d} for q = {q:d}, m = {m:d}, r = {r:d}, t = {t:d} is outside the support'
))
def intersection_outside(s, q, m, r, t):
    """Impossible dimensions are an error, not zero."""
    with pytest.raises(OutsideSupportError):
        random_subspace_prob(q, m, r, t, s)


@then(parsers.parse('every subspace count identity with m up to {m:d} holds'))
def subspace_counts_hold(m):
    """Formula against exhaustive enumeration."""
    results = subspace_count_identities(m)
    assert results
    assert all(r.ok for r in results), [r.detail for r in results if not r.ok]


# === Signature ranks ===

@then(parsers.parse('P(s = {s:d} | rho = {rho:d}) is {p}'))
def sigrank_rho(context, s, rho, p):
    """Exact conditional probability."""
    assert sigrank_given_rho(context["sig"], s, rho) == Fraction(p)


@then(parsers.parse('P(s = {s:d} | k = {k:d}, rho = {rho:d}) is {p}'))
def sigrank_k_rho(context, s, k, rho, p):
    """Exact doubly conditional probability."""
    assert cond_sigrank(context["sig"], s, k, rho) == Fraction(p)


@then(parsers.parse('signature rank {s:d} given rho = {rho:d} is outside the support'))
def sigrank_rho_outside(context, s, rho):
    """rho >= (r1+1)/2 - s."""
    with pytest.raises(OutsideSupportError):
        sigrank_given_rho(context["sig"], s, rho)


@then(parsers.parse('signature rank {s:d} given k = {k:d} and rho = {rho:d} is outside the support'))
def sigrank_k_rho_outside(context, s, k, rho):
    """s outside the bounds for k and rho."""
    with pytest.raises(OutsideSupportError):
        cond_sigrank(context["sig"], s, k, rho)


@then(parsers.parse('P(s = {s:d}) is {value:g} to six places'))
def sigrank_value(context, s, value):
    """Series over rho with a certified tail."""
    result = sigrank(context["sig"], s)
    assert result.err < 1e-8
    assert close(result, value)


@then(parsers.parse('P(s = {s:d}) prints as {text}'))
def sigrank_text(context, s, text):
    """Scientific notation for tiny values."""
    result = sigrank(context["sig"], s)
    assert result.format_cell() == text


@then(parsers.parse('the split probability is {value:g} to six places'))
def split_value(context, value):
    """Class group is a direct summand of the narrow class group."""
    assert close(split_prob(context["sig"]), value)


# === Tables ===

@when(parsers.parse('I build the "{which}" table for {sigs}'))
def build(context, which, sigs):
    """Rows for the listed signatures."""
    context["table"] = build_table(which, [parse_signature(s) for s in sigs.split(" and ")])


@then(parsers.parse('the table has {n:d} rows'))
def table_rows(context, n):
    """One row per signature."""
    assert len(context["table"]) == n


@then(parsers.parse('row {i:d} is "{cells}"'))
def table_row(context, i, cells):
    """Cells in column order."""
    assert " ".join(str(c) for c in context["table"][i - 1].cells) == cells


@then(parsers.parse('building the "{which}" table is rejected'))
def table_rejected(which):
    """Unknown table names."""
    with pytest.raises(InadmissibleError):
        build_table(which)


@then('every moment identity holds')
def moments_hold():
    """Closed-form moments against truncated series."""
    results = moment_identities()
    assert all(r.ok for r in results), [r.name for r in results if not r.ok]


@then('every normalization identity holds')
def normalizations_hold():
    """Distributions sum to one."""
    results = normalization_identities()
    assert all(r.ok for r in results), [r.name for r in results if not r.ok]

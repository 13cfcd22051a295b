"""Step definitions for the form store."""

from datetime import datetime

from pytest_bdd import scenarios, given, when, then, parsers

from selmer.cubicforms import CubicForm, classify_form, scan
from selmer.db import FormStore

scenarios('../features/form_store.feature')


def form(text: str) -> CubicForm:
    return CubicForm(*(int(x) for x in text.strip("()").split(",")))


@given('an empty form store')
def empty_store(context, temp_db):
    """Fresh schema in a temporary file."""
    store = FormStore(temp_db)
    store.init_db()
    context["store"] = store
    context["added"] = []


@when(parsers.parse('I store the form {text} found at height {X:d} with seed {seed:d}'))
def store_form(context, text, X, seed):
    """Insert one record."""
    record = classify_form(form(text))
    assert record is not None
    context["added"].append(context["store"].add_record(record, X, seed))


@when(parsers.parse('I store the forms from a scan up to discriminant {D:d} at height {X:d} with seed {seed:d}'))
def store_scan(context, D, X, seed):
    """Insert a batch."""
    records = scan(D)
    # reversed so the store has to do the ordering
    assert context["store"].add_records(list(reversed(records)), X, seed) == len(records)


@then('the second insertion was ignored')
def second_ignored(context):
    """UNIQUE (a, b, c, d)."""
    assert context["added"] == [True, False]


@then(parsers.parse('the store holds {count:d} form'))
@then(parsers.parse('the store holds {count:d} forms'))
def store_count(context, count):
    """Row count."""
    assert context["store"].count() == count


@then(parsers.parse('the stored form {text} has height bound {X:d} and seed {seed:d}'))
def stored_details(context, text, X, seed):
    """The first run that found the form is kept."""
    matches = [s for s in context["store"].records() if s.form == form(text)]
    assert len(matches) == 1
    stored = matches[0]
    assert (stored.height_bound, stored.seed) == (X, seed)
    assert stored.record.disc == form(text).disc
    assert stored.record.maximal and stored.record.irreducible
    assert isinstance(stored.created_at, datetime)
    assert stored.id is not None


@then(parsers.parse('the stored discriminants are "{discs}"'))
def stored_discs(context, discs):
    """Distinct discriminants, ascending."""
    assert context["store"].discs() == [int(d) for d in discs.split()]


@then('the stored discriminants are ""')
def no_discs(context):
    """Nothing stored."""
    assert context["store"].discs() == []


@then('the stored records come back in discriminant order')
def ordered(context):
    """ORDER BY disc, a, b, c, d."""
    stored = context["store"].records()
    keys = [(s.record.disc, s.form.coefficients) for s in stored]
    assert keys == sorted(keys)

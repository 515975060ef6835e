"""Tests for the MAX, N and EK safe functions and their derivative form."""

import pytest

from generators import TermGenerator, nonces, vocabulary_context
from witness.algebra.keys import KeyTable
from witness.algebra.terms import Atom, Enc, Sort, Variable, atoms, key, nonce, pair, principal, render, variables
from witness.analysis.derivation import derive, derive_keep
from witness.analysis.safe_functions import (
    F_on_derivative, FunctionSelector, SafeFunction, evaluate_F, occurs, protective_sites,
)
from witness.analysis.unification import origins
from witness.analysis.witness import lower_bound
from witness.errors import MissingLevel, NotPresent
from witness.lattice.context import TypingContext
from witness.lattice.levels import BOTTOM, TOP, SecurityLevel, geq, meet
from witness.protocol.roles import GeneralizedMessageSet

SELECTORS = [s.value for s in FunctionSelector]


def level(*names):
    return SecurityLevel.of(*names)


def symmetric_context(levels, *keys):
    table = KeyTable()
    for name in keys:
        table.add_symmetric(name)
    return TypingContext(levels, table)


# ============================================================================
# NESTED KEYS
# ============================================================================

@pytest.mark.parametrize("selector, expected", [
    ("max", level("A", "B", "D", "S")),
    ("n", level("A", "D", "S")),
    ("ek", level("A", "B")),
])
def test_nested_keys(nested, selector, expected):
    ctx = nested.context()
    alpha = nested.atom("alpha")
    m = nested.steps[0].payload

    assert evaluate_F(selector, alpha, m, ctx) == expected


def test_outermost_protective_key_is_chosen(nested):
    ctx = nested.context()
    (site,) = protective_sites(nested.atom("alpha"), nested.steps[0].payload, ctx)

    assert site.key == key("kab")
    assert site.neighborhood == frozenset({"A", "S", "D"})
    assert not site.shadowed


def test_non_protective_outer_key_shadows_the_inner_one():
    ctx = symmetric_context({"k1": level("A", "B", "C"), "k2": level("A"), "n": level("A", "B")}, "k1", "k2")
    n = nonce("n")
    m = Enc(Enc(n, key("k2")), key("k1"))

    (site,) = protective_sites(n, m, ctx)
    assert site.key == key("k2") and site.shadowed
    assert evaluate_F("ek", n, m, ctx) == level("A")


def test_public_key_does_not_protect():
    ctx = symmetric_context({"k": BOTTOM, "n": level("A", "B")}, "k")
    assert evaluate_F("max", nonce("n"), Enc(pair(principal("A"), nonce("n")), key("k")), ctx) == BOTTOM


def test_unknown_level_uses_every_enclosing_key():
    ctx = symmetric_context({"k1": level("A", "B"), "k2": level("A", "S")}, "k1", "k2")
    x = Variable("X")
    m = Enc(pair(principal("C"), Enc(x, key("k2"))), key("k1"))

    sites = protective_sites(x, m, ctx)
    assert [s.key for s in sites] == [key("k1"), key("k2")]
    assert evaluate_F("max", x, m, ctx) == level("A", "B", "C", "S")
    assert evaluate_F("n", x, m, ctx) == level("C")


def test_key_variables_never_protect():
    ctx = symmetric_context({"n": level("A")})
    assert evaluate_F("max", nonce("n"), Enc(nonce("n"), Variable("K", Sort.KEY)), ctx) == BOTTOM


def test_missing_key_level_raises():
    ctx = symmetric_context({"n": level("A")})
    with pytest.raises(MissingLevel, match="kx"):
        evaluate_F("max", nonce("n"), Enc(nonce("n"), key("kx")), ctx)


def test_key_positions_are_not_occurrences():
    ctx = symmetric_context({"k": level("A")}, "k")
    assert not occurs(key("k"), Enc(nonce("n"), key("k")))
    assert evaluate_F("max", key("k"), Enc(nonce("n"), key("k")), ctx) == TOP


def test_every_occurrence_counts():
    ctx = symmetric_context({"k": level("A", "B"), "n": level("A", "B")}, "k")
    n = nonce("n")
    assert evaluate_F("max", n, pair(Enc(n, key("k")), n), ctx) == BOTTOM
    assert evaluate_F("max", n, [Enc(pair(n, principal("C")), key("k")), Enc(n, key("k"))], ctx) == level("A", "B", "C")


def test_selector_is_validated():
    with pytest.raises(ValueError):
        SafeFunction("rank")


# ============================================================================
# WELL-BUILT AXIOMS
# ============================================================================

@pytest.mark.parametrize("selector", SELECTORS)
def test_well_built_axioms_on_random_terms(selector):
    ctx = vocabulary_context()
    f = SafeFunction(selector)
    generator = TermGenerator(seed=2024)
    terms = generator.terms(500)

    for alpha in nonces():
        assert f.evaluate(alpha, alpha, ctx) == BOTTOM
        for m1, m2 in zip(terms, terms[1:] + terms[:1]):
            value = f.evaluate(alpha, m1, ctx)
            if not occurs(alpha, m1):
                assert value == TOP
            assert f.evaluate(alpha, [m1, m2], ctx) == meet(value, f.evaluate(alpha, m2, ctx))


@pytest.mark.parametrize("selector", SELECTORS)
def test_bare_occurrence_dominates(selector):
    ctx = vocabulary_context()
    f = SafeFunction(selector)
    for m in TermGenerator(seed=7).terms(500):
        for alpha in nonces():
            assert f.evaluate(alpha, pair(m, alpha), ctx) == BOTTOM


def test_max_is_below_ek_and_n_on_random_terms():
    ctx = vocabulary_context()
    for m in TermGenerator(seed=11).terms(500):
        for alpha in nonces():
            if not protective_sites(alpha, m, ctx):
                continue
            lowest = evaluate_F("max", alpha, m, ctx)
            assert geq(evaluate_F("ek", alpha, m, ctx), lowest)
            assert geq(evaluate_F("n", alpha, m, ctx), lowest)


# ============================================================================
# DERIVATION
# ============================================================================

def test_derive_erases_variables_but_keeps_keys():
    x, y, k = Variable("X"), Variable("Y"), Variable("K", Sort.KEY)
    m = Enc(pair(principal("A"), x, Enc(y, key("kas"))), k)

    assert derive(m, [x, y]) == Enc(principal("A"), k)
    assert derive_keep(m, y) == Enc(pair(principal("A"), Enc(y, key("kas"))), k)
    assert derive(Enc(x, key("kas")), [x]) == pair()


def test_derive_keep_holds_on_to_a_whole_block():
    x, y = Variable("X"), Variable("Y")
    block = Enc(pair(principal("B"), y), key("kas"))
    m = Enc(pair(x, block), key("kbs"))

    assert derive_keep(m, block) == Enc(block, key("kbs"))
    assert derive_keep(m, x) == Enc(pair(x, Enc(principal("B"), key("kas"))), key("kbs"))


def test_derivation_never_adds_symbols():
    generator = TermGenerator(seed=5)
    for _ in range(300):
        m = generator.abstract(generator.term(4))
        erased = set(sorted(variables(m), key=render)[::2])
        derived = derive(m, erased)

        assert atoms(derived) <= atoms(m)
        assert variables(derived) <= variables(m) - erased


# ============================================================================
# FUNCTION ON A DERIVATIVE
# ============================================================================

@pytest.fixture
def two_origins():
    """Two generalized messages that both match {n.C}k but read n differently."""
    ctx = symmetric_context({"k": level("A", "B"), "n": level("A", "B")}, "k")
    first = Enc(pair(Atom("n", Sort.NONCE, tag=1), Variable("Y_1")), Atom("k", Sort.KEY, tag=1))
    second = Enc(pair(Variable("X_2"), Atom("C", Sort.PRINCIPAL, tag=2)), Atom("k", Sort.KEY, tag=2))
    query = Enc(pair(nonce("n"), principal("C")), key("k"))
    return ctx, query, [first, second]


def test_origins_can_disagree(two_origins):
    ctx, query, entries = two_origins
    first, second = origins(query, entries)
    n = nonce("n")

    assert F_on_derivative("max", n, first.entry, first.unifier, ctx) == level("A", "B")
    assert F_on_derivative("max", n, second.entry, second.unifier, ctx) == level("A", "B", "C")


def test_lower_bound_takes_the_meet_over_origins(two_origins):
    ctx, query, entries = two_origins
    messages = GeneralizedMessageSet(entries=entries)
    assert lower_bound(nonce("n"), query, messages, "max", ctx) == level("A", "B", "C")


def test_composite_image_keeps_its_variables():
    ctx = symmetric_context({"kas": level("A", "S"), "kbs": level("B", "S")}, "kas", "kbs")
    ticket = Enc(pair(Atom("B", Sort.PRINCIPAL, tag=7), Variable("U_5")), Atom("kas", Sort.KEY, tag=7))
    entry = Enc(pair(ticket, Atom("C", Sort.PRINCIPAL, tag=1)), Atom("kbs", Sort.KEY, tag=5))
    y = Variable("Y")
    query = Enc(pair(y, Variable("Z")), key("kbs"))

    (origin,) = origins(query, [entry])
    assert origin.unifier.get(origin.renaming[y]) == ticket
    assert F_on_derivative("max", origin.renaming[y], origin.entry, origin.unifier, ctx) == level("B", "C", "S")
    assert lower_bound(y, query, GeneralizedMessageSet(entries=[entry]), "max", ctx) == level("B", "C", "S")


def test_atom_absent_from_origin_raises(two_origins):
    ctx, query, entries = two_origins
    first = origins(query, entries)[0]
    with pytest.raises(NotPresent):
        F_on_derivative("max", nonce("m"), first.entry, first.unifier, ctx, level("A"))

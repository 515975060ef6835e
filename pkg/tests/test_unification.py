"""Tests for sorted unification and the origin search."""

import pytest

from generators import TermGenerator
from witness.algebra.terms import Atom, Enc, Sort, Variable, key, nonce, pair, principal, render
from witness.analysis.unification import origins, standardize_apart, unify
from witness.protocol.parser import parse_file
from witness.protocol.roles import collect_generalized_messages, extract_roles, find_role

A, B = principal("A"), principal("B")
X, Y = Variable("X"), Variable("Y")
K = Variable("K", Sort.KEY)


def test_unify_binds_variables():
    unifier = unify(Enc(pair(A, X), key("kab")), Enc(pair(A, nonce("Na")), key("kab")))
    assert unifier.bindings == {X: nonce("Na")}
    assert unifier.apply(Enc(pair(A, X), key("kab"))) == Enc(pair(A, nonce("Na")), key("kab"))


def test_identical_terms_need_no_bindings():
    assert len(unify(pair(A, B), pair(A, B))) == 0


def test_clashes_fail():
    assert unify(A, B) is None
    assert unify(pair(A, X), Enc(A, key("kab"))) is None
    assert unify(Enc(X, key("kab")), Enc(X, key("kas"))) is None


def test_sorts_are_respected():
    assert unify(K, nonce("Na")) is None
    assert unify(K, key("kab")).get(K) == key("kab")
    assert unify(Enc(A, K), Enc(A, key("kas"))).bindings == {K: key("kas")}


def test_occurs_check():
    assert unify(X, pair(X, A)) is None


def test_bindings_are_idempotent():
    unifier = unify(pair(X, Y), pair(Y, A))
    assert unifier is not None
    assert unifier.apply(X) == A and unifier.apply(Y) == A


def test_variable_to_variable_keeps_the_stricter_sort():
    assert unify(K, X).bindings == {X: K}
    assert unify(X, K).bindings == {X: K}


def test_parameters_bind_to_names_of_their_sort():
    parameter = Atom("A", Sort.PRINCIPAL, tag=1)
    assert unify(parameter, B).bindings == {parameter: B}
    assert unify(B, parameter).bindings == {parameter: B}
    assert unify(parameter, nonce("Na")) is None


def test_session_parameters_only_take_session_names():
    parameter = key("kab", "i", 1)
    assert unify(parameter, key("kab")) is None
    assert unify(parameter, key("kab", "i")).bindings == {parameter: key("kab", "i")}


def test_unifier_render():
    assert unify(pair(X, Y), pair(A, B)).render() == "{X ↦ A, Y ↦ B}"


def test_unify_is_sound_and_most_general_on_random_pairs():
    generator = TermGenerator(seed=99)
    for instance in generator.terms(300, depth=4):
        left = generator.abstract(instance, "X")
        right = generator.abstract(instance, "Y")

        unifier = unify(left, right)
        assert unifier is not None
        common = unifier.apply(left)
        assert common == unifier.apply(right)

        # the shared instance is reachable from the unified term
        specialization = unify(common, instance)
        assert specialization is not None
        assert specialization.apply(common) == instance


# ============================================================================
# ORIGINS
# ============================================================================

def test_standardize_apart_renames_query_symbols():
    entries = [pair(X, key("kas", tag=3))]
    renamed, renaming = standardize_apart(pair(X, key("kas", tag=1)), entries)

    assert renaming == {X: Variable("X'"), key("kas", tag=1): key("kas", tag=4)}
    assert renamed == pair(Variable("X'"), key("kas", tag=4))


def test_session_key_message_has_one_origin(woolam_roles, woolam_messages):
    query = find_role(woolam_roles, "A2").last.pattern
    found = origins(query, woolam_messages.entries)

    assert len(found) == 1
    assert render(found[0].entry).startswith("{B_")


def test_server_reply_has_two_origins(woolam_roles, woolam_messages):
    query = find_role(woolam_roles, "S1").last.pattern
    found = origins(query, woolam_messages.entries)

    assert len(found) == 2
    for origin in found:
        assert origin.unifier.apply(origin.entry) == origin.unifier.apply(origin.query)


def test_server_reply_unifiers(woolam_roles, woolam_messages):
    query = find_role(woolam_roles, "S1").last.pattern
    receive, reply = origins(query, woolam_messages.entries)
    u, v = reply.renaming[Variable("U")], reply.renaming[Variable("V")]
    kbs = key("kbs")

    # {Nb^i.{A.Z}kbs}kbs: the query variables take the entry's nonce and key variable
    nb, inner = receive.entry.body.left, receive.entry.body.right
    assert nb.name == "Nb" and nb.session == "i"
    assert receive.unifier.bindings == {
        u: nb, inner.body.left: A, v: inner.body.right, receive.entry.key: kbs,
    }
    assert inner.body.right.sort is Sort.KEY

    # the reply pattern itself, renamed onto the query
    inner = reply.entry.body.right
    assert reply.unifier.bindings == {
        reply.entry.body.left: u, inner.body.left: A, inner.body.right: v, reply.entry.key: kbs,
    }


def test_bare_variable_entries_only_match_simple_queries(woolam_messages):
    entries = woolam_messages.entries
    assert any(isinstance(e, Variable) for e in entries)

    atomic = origins(nonce("Nb", "i"), entries)
    assert any(isinstance(o.entry, Variable) for o in atomic)

    composite = origins(pair(A, nonce("Nb", "i")), entries)
    assert not any(isinstance(o.entry, Variable) for o in composite)


@pytest.mark.parametrize("filename", ["woolam.wl", "woolam_cleartext.wl", "example1.wl", "relayed_ticket.wl"])
def test_every_generalized_message_is_its_own_origin(fixtures_dir, filename):
    entries = collect_generalized_messages(extract_roles(parse_file(fixtures_dir / filename))).entries
    for entry in entries:
        assert entry in [origin.entry for origin in origins(entry, entries)], render(entry)

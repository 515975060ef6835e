"""Tests for protocol parsing, context overrides, rendering and validation."""

import pytest

from witness.algebra.terms import Enc, Pair, Sort, Variable, key, nonce, principal
from witness.errors import DuplicateDeclaration, ProtocolSyntaxError, UndeclaredSymbol
from witness.lattice.levels import BOTTOM, SecurityLevel
from witness.protocol.parser import parse, parse_context, parse_file, parse_term, render
from witness.protocol.validator import has_errors, validate

HEADER = "protocol P\nagents A B\nsymkey kab level {A,B}\n"


# ============================================================================
# PROTOCOL FILES
# ============================================================================

def test_woolam_declarations(woolam):
    assert woolam.name == "WooLamAmended"
    assert woolam.agents == ["A", "B", "S"]
    assert [k.name for k in woolam.keys] == ["kas", "kbs"]
    assert [(f.name, f.sort, f.generator) for f in woolam.fresh] == [("kab", "key", "A"), ("Nb", "nonce", "B")]
    assert woolam.fresh_decl("Nb").level == BOTTOM
    assert woolam.secrets == ["kab"]


def test_woolam_steps(woolam):
    assert [s.index for s in woolam.steps] == [1, 2, 3, 4, 5]
    step = woolam.steps[2]
    assert (step.sender, step.receiver) == ("A", "B")
    assert step.payload == Enc(Pair(principal("B"), key("kab")), key("kas"))
    assert step.line == 10


def test_sorts_of_declared_names(woolam):
    assert woolam.sort_of("A") is Sort.PRINCIPAL
    assert woolam.sort_of("kas") is Sort.KEY
    assert woolam.sort_of("Nb") is Sort.NONCE
    assert woolam.sort_of("nope") is None


def test_asymmetric_keys():
    protocol = parse(HEADER + "asymkey pkb / skb level public / {B}\n")

    assert protocol.key_table().inverse(key("pkb")) == key("skb")
    assert protocol.declared_levels()["pkb"] == BOTTOM
    assert protocol.declared_levels()["skb"] == SecurityLevel.of("B")
    assert key("pkb") in protocol.intruder_knowledge()
    assert key("skb") not in protocol.intruder_knowledge()


def test_initial_knowledge(woolam):
    assert woolam.initial_knowledge("A") == {principal("A"), principal("B"), principal("S"), key("kas")}
    assert key("kbs") in woolam.initial_knowledge("S")
    assert woolam.intruder_knowledge() == {principal("A"), principal("B"), principal("S"), principal("I")}


def test_knows_line_replaces_default_knowledge():
    protocol = parse(HEADER + "knows A : kab\nknows I : kab\n")

    assert protocol.initial_knowledge("A") == {principal("A"), key("kab")}
    assert key("kab") in protocol.intruder_knowledge()


def test_comments_and_blank_lines_are_ignored():
    protocol = parse("# header\n\nprotocol P   # trailing\nagents A B\n")
    assert protocol.name == "P" and protocol.steps == []


# ============================================================================
# ERRORS
# ============================================================================

def test_undeclared_name_reports_line_and_column():
    with pytest.raises(UndeclaredSymbol) as info:
        parse(HEADER + "msg 1 A -> B : {B, kx}kab\n")

    assert info.value.line == 4
    assert info.value.column == 20
    assert str(info.value).startswith("line 4, column 20:")


def test_duplicate_declaration():
    with pytest.raises(DuplicateDeclaration) as info:
        parse(HEADER + "symkey kab level {A}\n")
    assert info.value.line == 4


@pytest.mark.parametrize("text", [
    HEADER + "msg 1 A -> B : {A}B\n",
    HEADER + "msg 1 A -> A : A\n",
    HEADER + "msg 1 A -> B : {A, B\n",
    HEADER + "msg 1 A -> B :\n",
    HEADER + "symkey kx level {A\n",
    HEADER + "send A B\n",
    "agents A B\n",
    "protocol P\n",
    "protocol P\nagents A I\n",
])
def test_syntax_errors(text):
    with pytest.raises(ProtocolSyntaxError):
        parse(text)


def test_unknown_agent_in_step():
    with pytest.raises(UndeclaredSymbol):
        parse(HEADER + "msg 1 A -> C : A\n")


def test_missing_file_propagates(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_file(tmp_path / "nosuch.wl")


# ============================================================================
# TERMS AND RENDERING
# ============================================================================

def test_parse_term_with_variables(woolam):
    term = parse_term("{U, {A, V}kbs}V", woolam, allow_variables=True)
    v = Variable("V", Sort.KEY)
    assert term == Enc(Pair(Variable("U"), Enc(Pair(principal("A"), v), key("kbs"))), v)
    assert parse_term("K, {A}K", woolam, allow_variables=True) == Pair(Variable("K", Sort.KEY), Enc(principal("A"), Variable("K", Sort.KEY)))

    with pytest.raises(UndeclaredSymbol):
        parse_term("U", woolam)


def test_render_reads_back_unchanged(woolam, nested):
    for protocol in (woolam, nested, parse(HEADER + "asymkey pkb / skb level public / {B}\nknows A : kab\n")):
        text = render(protocol)
        again = parse(text)
        assert render(again) == text
        assert [(s.index, s.sender, s.receiver, s.payload) for s in again.steps] == [
            (s.index, s.sender, s.receiver, s.payload) for s in protocol.steps
        ]


def test_render_woolam(woolam):
    lines = render(woolam).splitlines()
    assert "fresh nonce Nb by B level public" in lines
    assert "msg 4 B -> S : {A, Nb, {B, kab}kas}kbs" in lines
    assert lines[-1] == "secret kab"


# ============================================================================
# CONTEXT OVERRIDES
# ============================================================================

def test_context_override_changes_levels(woolam):
    ctx = parse_context("# experiment\nlevel kas public\nknows I : kbs, extra\n", woolam)

    assert ctx.level_of(key("kas")) == BOTTOM
    assert ctx.level_of(key("kbs")) == SecurityLevel.of("B", "S")
    assert key("kbs") in ctx.intruder_knowledge
    assert nonce("extra") in ctx.intruder_knowledge


@pytest.mark.parametrize("text, error", [
    ("level A {A}\n", ProtocolSyntaxError),
    ("level kas somewhere\n", ProtocolSyntaxError),
    ("level kzz {A}\n", UndeclaredSymbol),
    ("secret kab\n", ProtocolSyntaxError),
])
def test_context_override_errors(woolam, text, error):
    with pytest.raises(error):
        parse_context(text, woolam)


# ============================================================================
# VALIDATION
# ============================================================================

def test_bundled_protocols_are_valid(woolam, cleartext, nested, idle):
    for protocol in (woolam, cleartext, nested, idle):
        assert validate(protocol) == []


def test_fresh_value_sent_first_by_another_agent():
    protocol = parse(HEADER + "fresh nonce n by A level {A,B}\nmsg 1 B -> A : {n}kab\n")
    diagnostics = validate(protocol)

    assert has_errors(diagnostics)
    assert diagnostics[0].line == 5
    assert "generated by A" in diagnostics[0].message


def test_step_indices_must_increase():
    protocol = parse(HEADER + "msg 2 A -> B : A\nmsg 1 B -> A : B\n")
    assert [str(d) for d in validate(protocol)] == ["error: line 5: step index 1 does not increase after 2"]


def test_secret_warnings():
    protocol = parse(HEADER + "fresh nonce n by A level public\nmsg 1 A -> B : n\nsecret n\n")
    diagnostics = validate(protocol)

    assert not has_errors(diagnostics)
    assert [d.message for d in diagnostics] == ["secret n is public"]


def test_unsent_fresh_value_is_a_warning():
    protocol = parse(HEADER + "fresh nonce n by A level {A,B}\n")
    assert [(d.severity, d.message) for d in validate(protocol)] == [("warning", "fresh value n is never sent")]


def test_missing_inverse_level_is_an_error(woolam):
    ctx = woolam.context().with_overrides()
    del ctx.levels["kbs"]
    diagnostics = validate(woolam, ctx)

    assert has_errors(diagnostics)
    assert "kbs" in diagnostics[0].message

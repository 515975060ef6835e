"""
Sub-command handlers for wfcheck.
Each handler loads the protocol named by a RunConfig, runs one analysis and
writes the formatted result to standard output, returning the exit code.
Diagnostics go to standard error.
"""

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, Optional, Tuple

import click

from witness.algebra.terms import Term, replace
from witness.analysis.safe_functions import as_function
from witness.analysis.unification import origins
from witness.analysis.witness import WitnessAnalyzer
from witness.lattice.context import TypingContext
from witness.oracle.invariance import check_invariant_by_intruder, session_messages
from witness.oracle.simulator import simulate
from witness.protocol.models import Protocol
from witness.protocol.parser import parse_context, parse_file, parse_term
from witness.protocol.roles import collect_generalized_messages, extract_roles
from witness.protocol.validator import has_errors, validate

from .formatters import ReportFormatter

if TYPE_CHECKING:
    from .main import RunConfig

logger = logging.getLogger(__name__)

# Exit codes
EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


# ============================================================================
# LOADING
# ============================================================================

def load(config: "RunConfig", formatter: ReportFormatter) -> Optional[Tuple[Protocol, TypingContext]]:
    """
    Parse and validate the input protocol and its optional context override.

    Args:
        config: Run configuration
        formatter: Formatter used for diagnostics

    Returns:
        Optional[Tuple[Protocol, TypingContext]]: None when validation found errors
    """
    protocol = parse_file(config.input, config.intruder)
    ctx = protocol.context(config.intruder)
    if config.context is not None:
        logger.info(f"🧩 Applying context overrides from {config.context}")
        ctx = parse_context(Path(config.context).read_text(encoding="utf-8"), protocol, config.intruder)

    diagnostics = validate(protocol, ctx)
    for diagnostic in diagnostics:
        click.echo(formatter.format_diagnostic(diagnostic), err=True)
    if has_errors(diagnostics):
        logger.error(f"❌ {protocol.name} failed validation")
        return None
    return protocol, ctx


def session_term(t: Term, protocol: Protocol, session: str) -> Term:
    """Tag the fresh values of a command-line term with the symbolic session."""
    return replace(t, {decl.atom(): decl.atom(session) for decl in protocol.fresh})


# ============================================================================
# HANDLERS
# ============================================================================

def handle_analyze(config: "RunConfig", formatter: ReportFormatter) -> int:
    loaded = load(config, formatter)
    if loaded is None:
        return EXIT_INPUT
    protocol, ctx = loaded
    report = WitnessAnalyzer(protocol, config.function, ctx, config.session).analyze()
    click.echo(formatter.format_report(report))
    return EXIT_OK if report.secure else EXIT_VIOLATION


def handle_roles(config: "RunConfig", formatter: ReportFormatter) -> int:
    loaded = load(config, formatter)
    if loaded is None:
        return EXIT_INPUT
    protocol, _ = loaded
    roles = extract_roles(protocol, config.session)
    messages = collect_generalized_messages(roles) if config.messages else None
    click.echo(formatter.format_roles(roles, messages, config.intruder))
    return EXIT_OK


def handle_origins(config: "RunConfig", formatter: ReportFormatter) -> int:
    loaded = load(config, formatter)
    if loaded is None:
        return EXIT_INPUT
    protocol, _ = loaded
    query = session_term(parse_term(config.term, protocol, allow_variables=True), protocol, config.session)
    messages = collect_generalized_messages(extract_roles(protocol, config.session))
    click.echo(formatter.format_origins(query, origins(query, messages.entries)))
    return EXIT_OK


def handle_eval(config: "RunConfig", formatter: ReportFormatter) -> int:
    loaded = load(config, formatter)
    if loaded is None:
        return EXIT_INPUT
    protocol, ctx = loaded
    alpha = session_term(parse_term(config.atom, protocol, allow_variables=True), protocol, config.session)
    term = session_term(parse_term(config.term, protocol, allow_variables=True), protocol, config.session)
    level = as_function(config.function).evaluate(alpha, term, ctx)
    click.echo(formatter.format_level(config.function.value, alpha, term, level))
    return EXIT_OK


def handle_oracle(config: "RunConfig", formatter: ReportFormatter) -> int:
    loaded = load(config, formatter)
    if loaded is None:
        return EXIT_INPUT
    protocol, ctx = loaded
    result = simulate(
        protocol,
        sessions=config.sessions,
        depth=config.depth,
        knowledge_cap=config.knowledge_cap,
        state_cap=config.state_cap,
        candidate_cap=config.candidate_cap,
        intruder=config.intruder,
    )
    counterexamples = None
    if config.check_invariant:
        counterexamples = check_invariant_by_intruder(
            config.function, session_messages(protocol), ctx, config.depth, config.knowledge_cap
        )
    click.echo(formatter.format_oracle(result, counterexamples))
    if not result.secure or counterexamples:
        return EXIT_VIOLATION
    return EXIT_OK


HANDLERS: Dict[str, Callable[["RunConfig", ReportFormatter], int]] = {
    "analyze": handle_analyze,
    "roles": handle_roles,
    "origins": handle_origins,
    "eval": handle_eval,
    "oracle": handle_oracle,
}

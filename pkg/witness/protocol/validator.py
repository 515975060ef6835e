"""
Protocol validation.
Checks the well-formedness rules the parser cannot see line by line and
returns them as diagnostics; nothing here raises.
"""

import logging
from typing import List, Optional

from ..algebra.terms import Atom, Enc, atoms, subterms
from ..lattice.context import TypingContext
from ..lattice.levels import UNKNOWN, SecurityLevel
from .models import Diagnostic, Protocol

logger = logging.getLogger(__name__)


def validate(protocol: Protocol, ctx: Optional[TypingContext] = None) -> List[Diagnostic]:
    """Check ``protocol`` against its context.

    Args:
        protocol: A parsed protocol
        ctx: Typing context to check against (defaults to the protocol's own)

    Returns:
        List[Diagnostic]: Errors and warnings in source order; empty when the
        protocol is well formed and every secret has a non-public level
    """
    ctx = ctx if ctx is not None else protocol.context()
    diagnostics: List[Diagnostic] = []
    diagnostics += _check_indices(protocol)
    diagnostics += _check_fresh_generation(protocol)
    diagnostics += _check_key_levels(protocol, ctx)
    diagnostics += _check_secrets(protocol, ctx)

    errors = sum(1 for d in diagnostics if d.severity == "error")
    if diagnostics:
        logger.info(f"⚠️ {protocol.name}: {errors} errors, {len(diagnostics) - errors} warnings")
    return diagnostics


def has_errors(diagnostics: List[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


def _check_indices(protocol: Protocol) -> List[Diagnostic]:
    found = []
    for previous, step in zip(protocol.steps, protocol.steps[1:]):
        if step.index <= previous.index:
            found.append(Diagnostic(
                severity="error",
                message=f"step index {step.index} does not increase after {previous.index}",
                line=step.line,
            ))
    return found


def _check_fresh_generation(protocol: Protocol) -> List[Diagnostic]:
    found = []
    for decl in protocol.fresh:
        first = next(
            (s for s in protocol.steps if any(a.name == decl.name for a in atoms(s.payload))),
            None,
        )
        if first is None:
            found.append(Diagnostic(
                severity="warning",
                message=f"fresh value {decl.name} is never sent",
                line=decl.line,
            ))
        elif first.sender != decl.generator:
            found.append(Diagnostic(
                severity="error",
                message=(
                    f"fresh value {decl.name} first appears in step {first.index} sent by "
                    f"{first.sender}, but it is generated by {decl.generator}"
                ),
                line=first.line,
            ))
    return found


def _check_key_levels(protocol: Protocol, ctx: TypingContext) -> List[Diagnostic]:
    found = []
    reported = set()
    for step in protocol.steps:
        for t in subterms(step.payload):
            if not isinstance(t, Enc) or not isinstance(t.key, Atom):
                continue
            inverse = ctx.inverse(t.key)
            if ctx.level_of(inverse) is UNKNOWN and inverse not in reported:
                reported.add(inverse)
                found.append(Diagnostic(
                    severity="error",
                    message=f"no security level declared for {inverse.name}, the inverse of {t.key.name}",
                    line=step.line,
                ))
    return found


def _check_secrets(protocol: Protocol, ctx: TypingContext) -> List[Diagnostic]:
    found = []
    for atom in protocol.secret_atoms():
        level = ctx.level_of(atom)
        if not isinstance(level, SecurityLevel):
            found.append(Diagnostic(severity="error", message=f"secret {atom.name} has no declared level"))
        elif level.is_bottom:
            found.append(Diagnostic(severity="warning", message=f"secret {atom.name} is public"))
        elif atom in ctx.intruder_knowledge:
            found.append(Diagnostic(
                severity="warning",
                message=f"secret {atom.name} is in the intruder's initial knowledge",
            ))
    return found

"""
Empirical check that a safe function cannot be lowered by the intruder.
For every message the intruder can deduce from a set of messages, each atom
must keep a value at least as high as in the set, unless the intruder is
entitled to know the atom anyway.
"""

import logging
from typing import Iterable, List

from pydantic import BaseModel, ConfigDict, field_serializer

from ..algebra.terms import Term, atoms, is_closed, normalize, render, replace
from ..analysis.safe_functions import FunctionLike, as_function
from ..lattice.context import TypingContext
from ..lattice.levels import SecurityLevel, geq, render_level, set_geq
from ..protocol.models import Protocol
from .knowledge import DEFAULT_CAP, closure

logger = logging.getLogger(__name__)


class Counterexample(BaseModel):
    """A deducible message in which an atom's value drops."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    message: Term
    atom: Term
    value: SecurityLevel
    reference: SecurityLevel
    derivation: List[str] = []

    @field_serializer("message", "atom")
    def _render_term(self, term: Term) -> str:
        return render(term)

    @field_serializer("value", "reference")
    def _render_level(self, level: SecurityLevel) -> str:
        return render_level(level)


def check_invariant_by_intruder(
    function: FunctionLike,
    messages: Iterable[Term],
    ctx: TypingContext,
    depth: int = 3,
    cap: int = DEFAULT_CAP,
) -> List[Counterexample]:
    """Counterexamples to the function being invariant under deduction.

    Args:
        function: Safe function (selector name or instance)
        messages: Closed messages available to the intruder
        ctx: Typing context; its intruder knowledge is added to ``messages``
        depth: Deduction rounds
        cap: Knowledge size cap

    Returns:
        List[Counterexample]: Empty when no deducible message lowers a value

    Raises:
        ValueError: a message contains variables.
        ResourceBound: the closure exceeds ``cap`` terms.
    """
    f = as_function(function)
    messages = [normalize(m, ctx.key_table) for m in messages]
    for m in messages:
        if not is_closed(m):
            raise ValueError(f"message {render(m)} is not closed")
    intruder_levels = ctx.intruder_levels()
    knowledge = closure(messages + sorted(ctx.intruder_knowledge, key=render), ctx.key_table, depth, cap)

    reference_cache = {}
    found: List[Counterexample] = []
    for m in knowledge.sorted_terms():
        for alpha in sorted(atoms(m), key=render):
            if alpha not in reference_cache:
                reference_cache[alpha] = f.evaluate(alpha, messages, ctx)
            reference = reference_cache[alpha]
            value = f.evaluate(alpha, m, ctx)
            if geq(value, reference):
                continue
            level = ctx.level_of(alpha)
            if isinstance(level, SecurityLevel) and set_geq(intruder_levels, level):
                continue
            found.append(Counterexample(
                message=m, atom=alpha, value=value, reference=reference,
                derivation=knowledge.explain(m),
            ))
    glyph = "✅" if not found else "❌"
    logger.info(f"{glyph} Invariance check over {len(knowledge)} deducible terms: {len(found)} counterexamples")
    return found


def session_messages(protocol: Protocol, sessions: int = 1) -> List[Term]:
    """Closed step payloads of ``sessions`` honest runs, fresh values tagged by session."""
    messages: List[Term] = []
    for s in range(1, sessions + 1):
        fresh = {decl.atom(): decl.atom(str(s)) for decl in protocol.fresh}
        messages.extend(normalize(replace(step.payload, fresh), protocol.key_table()) for step in protocol.steps)
    return messages

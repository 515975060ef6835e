"""
Sorted syntactic unification.
Most general unifiers over normalized terms where variables and
instantiation parameters are the bindable symbols, and the origin search
over a generalized message set.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from ..algebra.terms import (
    Atom, Enc, Pair, Term, Variable, accepts, normalize, ordered_symbols, render, replace, subterms,
)

logger = logging.getLogger(__name__)


@dataclass
class Unifier:
    """Idempotent substitution produced by ``unify``."""

    bindings: Dict[Term, Term] = field(default_factory=dict)

    def apply(self, m: Term) -> Term:
        return normalize(replace(m, self.bindings))

    def get(self, symbol: Term, default: Optional[Term] = None) -> Optional[Term]:
        return self.bindings.get(symbol, default)

    def items(self):
        return self.bindings.items()

    def __contains__(self, symbol: Term) -> bool:
        return symbol in self.bindings

    def __len__(self) -> int:
        return len(self.bindings)

    def render(self) -> str:
        pairs = ", ".join(f"{render(k)} ↦ {render(v)}" for k, v in self.bindings.items())
        return "{" + pairs + "}"

    def _bind(self, symbol: Term, value: Term) -> None:
        single = {symbol: value}
        for existing, image in self.bindings.items():
            self.bindings[existing] = replace(image, single)
        self.bindings[symbol] = value


def _parameter_accepts(parameter: Atom, value: Term) -> bool:
    """Parameters stand for names of their sort; session-indexed parameters
    only for session-indexed names."""
    if not isinstance(value, Atom) or value.sort is not parameter.sort:
        return False
    return parameter.session is None or value.session is not None


def _is_parameter(t: Term) -> bool:
    return isinstance(t, Atom) and t.is_parameter


def unify(left: Term, right: Term) -> Optional[Unifier]:
    """Most general sorted unifier of two terms, or None.

    Variables are bound before parameters. Between two variables the left
    one is bound when its sort admits the right one.
    """
    unifier = Unifier()
    pending: List[Tuple[Term, Term]] = [(left, right)]
    while pending:
        a, b = pending.pop()
        a, b = replace(a, unifier.bindings), replace(b, unifier.bindings)
        if a == b:
            continue

        if isinstance(a, Variable) or isinstance(b, Variable):
            if isinstance(a, Variable) and isinstance(b, Variable):
                symbol, value = (a, b) if accepts(a, b) else (b, a)
            else:
                symbol, value = (a, b) if isinstance(a, Variable) else (b, a)
            if not accepts(symbol, value) or any(t == symbol for t in subterms(value)):
                return None
            unifier._bind(symbol, value)
        elif _is_parameter(a) or _is_parameter(b):
            if _is_parameter(a) and _parameter_accepts(a, b):
                unifier._bind(a, b)
            elif _is_parameter(b) and _parameter_accepts(b, a):
                unifier._bind(b, a)
            else:
                return None
        elif isinstance(a, Pair) and isinstance(b, Pair):
            pending.extend([(a.right, b.right), (a.left, b.left)])
        elif isinstance(a, Enc) and isinstance(b, Enc):
            pending.extend([(a.key, b.key), (a.body, b.body)])
        else:
            return None
    return unifier


# ============================================================================
# ORIGINS
# ============================================================================

@dataclass(frozen=True)
class Origin:
    """An entry of the generalized message set unifiable with a query.

    ``query`` is the standardized-apart copy of the query, and ``renaming``
    maps the original query symbols to their copies.
    """

    entry: Term
    unifier: Unifier
    query: Term
    renaming: Dict[Term, Term]


def standardize_apart(query: Term, entries: Iterable[Term]) -> Tuple[Term, Dict[Term, Term]]:
    """Rename the variables and parameters of ``query`` away from ``entries``."""
    entries = list(entries)
    taken_tags = [s.tag for e in entries for s in ordered_symbols(e) if isinstance(s, Atom) and s.is_parameter]
    taken_names = {s.name for e in entries for s in ordered_symbols(e) if isinstance(s, Variable)}
    offset = max(taken_tags, default=0)
    renaming: Dict[Term, Term] = {}
    for symbol in ordered_symbols(query):
        if isinstance(symbol, Variable):
            name = symbol.name + "'"
            while name in taken_names:
                name += "'"
            renaming[symbol] = Variable(name, symbol.sort)
        elif isinstance(symbol, Atom) and symbol.is_parameter:
            renaming[symbol] = Atom(symbol.name, symbol.sort, symbol.session, symbol.tag + offset)
    return replace(query, renaming), renaming


def origins(query: Term, entries: Iterable[Term]) -> List[Origin]:
    """Entries unifiable with ``query``, in entry order.

    A bare-variable entry is an origin only of an atomic or variable query.
    """
    entries = list(entries)
    renamed, renaming = standardize_apart(query, entries)
    found = []
    for entry in entries:
        if isinstance(entry, Variable) and not isinstance(query, (Atom, Variable)):
            continue
        unifier = unify(entry, renamed)
        if unifier is not None:
            found.append(Origin(entry=entry, unifier=unifier, query=renamed, renaming=renaming))
    logger.debug(f"🔗 {render(query)} has {len(found)} origins")
    return found

"""
Generalized roles.
Abstracts each agent's view of the protocol into role patterns, where every
received part the agent cannot verify becomes a variable, and collects the
patterns of all roles into the generalized message set.
"""

import logging
from collections import defaultdict
from itertools import count
from typing import Dict, Iterator, List, Literal, Optional, Set

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from ..algebra.terms import (
    EMPTY, Atom, Enc, Pair, Sort, Term, Variable, normalize, ordered_symbols, render,
)
from .models import Protocol

logger = logging.getLogger(__name__)

VARIABLE_NAMES = ("X", "Y", "Z", "U", "V", "W")


class Event(BaseModel):
    """One step of a role as seen by its principal."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    direction: Literal["send", "receive"]
    index: int
    sender: str
    receiver: str
    pattern: Term

    @field_serializer("pattern")
    def _render_pattern(self, pattern: Term) -> str:
        return render(pattern)

    def display(self, session: str = "i", intruder: str = "I") -> str:
        """Arrow notation; the intruder sits on the far end of every channel."""
        if self.direction == "send":
            arrow = f"{self.sender} → {intruder}({self.receiver})"
        else:
            arrow = f"{intruder}({self.sender}) → {self.receiver}"
        return f"⟨{session}.{self.index}, {arrow} : {render(self.pattern)}⟩"


class GeneralizedRole(BaseModel):
    """A prefix of one principal's events in a symbolic session."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    principal: str
    number: int = Field(..., ge=1)
    session: str = "i"
    events: List[Event]

    @property
    def label(self) -> str:
        return f"{self.principal}{self.number}"

    @property
    def last(self) -> Event:
        return self.events[-1]

    @property
    def ends_with_send(self) -> bool:
        return bool(self.events) and self.last.direction == "send"

    def received_before(self, position: int) -> List[Term]:
        """Receive patterns strictly before ``position``."""
        return [e.pattern for e in self.events[:position] if e.direction == "receive"]

    def display(self, intruder: str = "I") -> str:
        return "\n".join(e.display(self.session, intruder) for e in self.events)


class GeneralizedMessageSet(BaseModel):
    """Deduplicated patterns of all roles, with instantiation parameters
    in place of names and variables standardized apart."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: List[Term]

    @field_serializer("entries")
    def _render_entries(self, entries: List[Term]) -> List[str]:
        return [render(e) for e in entries]


# ============================================================================
# ROLE EXTRACTION
# ============================================================================

class _VariableSupply:
    """Hands out X, Y, Z, U, V, W, X1, Y1, ... across a whole protocol."""

    def __init__(self):
        self._names = self._generate()

    @staticmethod
    def _generate() -> Iterator[str]:
        yield from VARIABLE_NAMES
        for round_ in count(1):
            for name in VARIABLE_NAMES:
                yield f"{name}{round_}"

    def fresh(self, sort: Sort) -> Variable:
        return Variable(next(self._names), sort)


class RoleExtractor:
    """Builds the generalized roles of one protocol.

    Args:
        protocol: A validated protocol
        session: Symbolic session tag given to fresh values
    """

    def __init__(self, protocol: Protocol, session: str = "i"):
        self.protocol = protocol
        self.session = session
        self.key_table = protocol.key_table()
        self.supply = _VariableSupply()

    def extract(self) -> List[GeneralizedRole]:
        roles: List[GeneralizedRole] = []
        for agent in self.protocol.agents:
            roles.extend(self._roles_of(agent))
        logger.debug(f"🎭 Extracted {len(roles)} generalized roles from {self.protocol.name}")
        return roles

    def _roles_of(self, agent: str) -> List[GeneralizedRole]:
        events = self._events_of(agent)
        roles = []
        for position, event in enumerate(events):
            if event.direction == "send":
                roles.append(GeneralizedRole(
                    principal=agent, number=len(roles) + 1, session=self.session,
                    events=events[:position + 1],
                ))
        if events and events[-1].direction == "receive":
            roles.append(GeneralizedRole(
                principal=agent, number=len(roles) + 1, session=self.session, events=events,
            ))
        return roles

    def _events_of(self, agent: str) -> List[Event]:
        known = self.protocol.initial_knowledge(agent)
        own_fresh = {d.name for d in self.protocol.fresh if d.generator == agent}
        known |= {self.protocol.atom(name) for name in own_fresh}
        mapping: Dict[Term, Variable] = {}
        events = []
        logger.debug(f"🔍 Extracting roles for {agent}")
        for step in self.protocol.steps:
            if step.receiver == agent:
                pattern = self._generalize(step.payload, known, mapping)
                direction = "receive"
            elif step.sender == agent:
                pattern = self._instantiate(step.payload, mapping)
                direction = "send"
            else:
                continue
            events.append(Event(
                direction=direction, index=step.index, sender=step.sender,
                receiver=step.receiver, pattern=normalize(pattern),
            ))
        return events

    def _knows_key(self, k: Term, known: Set[Atom], mapping: Dict[Term, Variable]) -> bool:
        return k in known or self.key_table.inverse(k) in known or k in mapping

    def _generalize(self, t: Term, known: Set[Atom], mapping: Dict[Term, Variable]) -> Term:
        if t in mapping:
            return mapping[t]
        if isinstance(t, Pair):
            return Pair(self._generalize(t.left, known, mapping), self._generalize(t.right, known, mapping))
        if isinstance(t, Enc):
            if self._knows_key(t.key, known, mapping):
                return Enc(self._generalize(t.body, known, mapping), self._instantiate(t.key, mapping))
            mapping[t] = self.supply.fresh(Sort.ANY)
            return mapping[t]
        if isinstance(t, Atom):
            if t in known:
                return self._session_copy(t)
            mapping[t] = self.supply.fresh(Sort.KEY if t.sort is Sort.KEY else Sort.ANY)
            return mapping[t]
        return t

    def _instantiate(self, t: Term, mapping: Dict[Term, Variable]) -> Term:
        if t in mapping:
            return mapping[t]
        if isinstance(t, Pair):
            return Pair(self._instantiate(t.left, mapping), self._instantiate(t.right, mapping))
        if isinstance(t, Enc):
            return Enc(self._instantiate(t.body, mapping), self._instantiate(t.key, mapping))
        if isinstance(t, Atom):
            return self._session_copy(t)
        return t

    def _session_copy(self, a: Atom) -> Atom:
        if self.protocol.is_fresh(a.name):
            return Atom(a.name, a.sort, self.session)
        return a


def extract_roles(protocol: Protocol, session: str = "i") -> List[GeneralizedRole]:
    """Generalized roles of every agent, in agent order.

    For each agent, one role per prefix of its events ending in a send, plus
    its complete event list when that ends with a receive.
    """
    return RoleExtractor(protocol, session).extract()


# ============================================================================
# GENERALIZED MESSAGE SET
# ============================================================================

class _Lifter:
    """Replaces names by tagged parameters and renames variables apart."""

    def __init__(self):
        self.atom_tags: Dict[str, int] = defaultdict(int)
        self.variable_tags: Dict[str, int] = defaultdict(int)

    def lift(self, pattern: Term) -> Term:
        renaming: Dict[Term, Term] = {}
        for symbol in ordered_symbols(pattern):
            if isinstance(symbol, Atom):
                self.atom_tags[symbol.name] += 1
                renaming[symbol] = Atom(symbol.name, symbol.sort, symbol.session, self.atom_tags[symbol.name])
            else:
                self.variable_tags[symbol.name] += 1
                renaming[symbol] = Variable(f"{symbol.name}_{self.variable_tags[symbol.name]}", symbol.sort)
        return _rename(pattern, renaming)


def _rename(m: Term, renaming: Dict[Term, Term]) -> Term:
    if m in renaming:
        return renaming[m]
    if isinstance(m, Pair):
        return Pair(_rename(m.left, renaming), _rename(m.right, renaming))
    if isinstance(m, Enc):
        return Enc(_rename(m.body, renaming), _rename(m.key, renaming))
    return m


def alpha_equivalent(a: Term, b: Term) -> bool:
    """Equal up to a bijective renaming of variables and parameters.

    Variables map to variables of the same sort; parameters map to
    parameters of the same sort that are session-indexed exactly when the
    original is. Untagged atoms must match exactly.
    """
    forward: Dict[Term, Term] = {}
    backward: Dict[Term, Term] = {}

    def bind(x: Term, y: Term) -> bool:
        if forward.get(x, y) != y or backward.get(y, x) != x:
            return False
        forward[x] = y
        backward[y] = x
        return True

    def walk(x: Term, y: Term) -> bool:
        if isinstance(x, Variable) and isinstance(y, Variable):
            return x.sort is y.sort and bind(x, y)
        if isinstance(x, Atom) and isinstance(y, Atom):
            if x.is_parameter and y.is_parameter:
                same_kind = x.sort is y.sort and (x.session is None) == (y.session is None)
                return same_kind and bind(x, y)
            return x == y
        if isinstance(x, Pair) and isinstance(y, Pair):
            return walk(x.left, y.left) and walk(x.right, y.right)
        if isinstance(x, Enc) and isinstance(y, Enc):
            return walk(x.body, y.body) and walk(x.key, y.key)
        return x == y

    return walk(a, b)


def collect_generalized_messages(roles: List[GeneralizedRole]) -> GeneralizedMessageSet:
    """Union of every role pattern, lifted, standardized apart and deduplicated.

    Patterns are visited in role order, then event order; the first of a
    class of alpha-equivalent entries is kept.
    """
    lifter = _Lifter()
    entries: List[Term] = []
    for role in roles:
        for event in role.events:
            if event.pattern == EMPTY:
                continue
            lifted = lifter.lift(event.pattern)
            if not any(alpha_equivalent(lifted, existing) for existing in entries):
                entries.append(lifted)
    logger.debug(f"📦 Generalized message set has {len(entries)} entries")
    return GeneralizedMessageSet(entries=entries)


def find_role(roles: List[GeneralizedRole], label: str) -> Optional[GeneralizedRole]:
    return next((r for r in roles if r.label == label), None)

"""
Bounded trace simulation.
Breadth-first exploration of interleaved honest role instances against a
Dolev-Yao intruder who intercepts every message and synthesizes every input,
reporting declared secrets that reach the intruder.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from pydantic import BaseModel, Field

from ..algebra.terms import Atom, Sort, Term, normalize, render, replace, variables
from ..analysis.unification import unify
from ..errors import ResourceBound
from ..protocol.models import Protocol
from ..protocol.roles import Event, GeneralizedRole, extract_roles
from .knowledge import DEFAULT_CAP, Knowledge

logger = logging.getLogger(__name__)

INTRUDER_NONCE = "n_I"
INTRUDER_KEY = "k_I"


class SimulationResult(BaseModel):
    """Outcome of a bounded exploration.

    ``witnesses`` holds, per leaked secret, the first trace found that leaks it.
    """

    sessions: int
    depth: int
    traces_explored: int
    leaked: List[str] = Field(default_factory=list)
    witnesses: Dict[str, List[str]] = Field(default_factory=dict)

    @property
    def secure(self) -> bool:
        return not self.leaked


@dataclass(frozen=True)
class _Instance:
    label: str
    session: str
    events: Tuple[Event, ...]
    fresh: Tuple[Tuple[Term, Term], ...]


@dataclass(frozen=True)
class _State:
    positions: Tuple[int, ...]
    bindings: Tuple[FrozenSet[Tuple[Term, Term]], ...]
    knowledge: FrozenSet[Term]


class TraceSimulator:
    """Explores executions of ``protocol`` with ``sessions`` copies of each role.

    Args:
        protocol: A validated protocol
        sessions: Number of concurrent sessions per agent
        depth: Maximum number of transitions per trace
        knowledge_cap: Intruder knowledge size cap
        state_cap: Visited state cap
        candidate_cap: Inputs tried per receive
        intruder: Name of the intruder principal
    """

    def __init__(
        self,
        protocol: Protocol,
        sessions: int = 2,
        depth: int = 4,
        knowledge_cap: int = DEFAULT_CAP,
        state_cap: int = 200000,
        candidate_cap: int = 6,
        intruder: str = "I",
    ):
        if sessions < 1:
            raise ValueError("sessions must be at least 1")
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.protocol = protocol
        self.sessions = sessions
        self.depth = depth
        self.knowledge_cap = knowledge_cap
        self.state_cap = state_cap
        self.candidate_cap = candidate_cap
        self.keys = protocol.key_table()
        self.instances = self._instances(extract_roles(protocol, "i"))
        self.secrets = {
            Atom(a.name, a.sort, str(s)) if protocol.is_fresh(a.name) else a: a.name
            for a in protocol.secret_atoms()
            for s in range(1, sessions + 1)
        }
        self.initial = (
            protocol.intruder_knowledge(intruder)
            | {Atom(INTRUDER_NONCE, Sort.NONCE), Atom(INTRUDER_KEY, Sort.KEY)}
        )

    def _instances(self, roles: List[GeneralizedRole]) -> List[_Instance]:
        complete: Dict[str, GeneralizedRole] = {}
        for role in roles:
            complete[role.principal] = role
        instances = []
        for s in range(1, self.sessions + 1):
            for agent in self.protocol.agents:
                role = complete.get(agent)
                if role is None:
                    continue
                fresh = tuple((decl.atom(role.session), decl.atom(str(s))) for decl in self.protocol.fresh)
                instances.append(_Instance(f"{agent}#{s}", str(s), tuple(role.events), fresh))
        return instances

    # ------------------------------------------------------------------
    # Exploration
    # ------------------------------------------------------------------

    def run(self) -> SimulationResult:
        start_knowledge = self._knowledge(self.initial)
        start = _State(
            positions=tuple(0 for _ in self.instances),
            bindings=tuple(frozenset() for _ in self.instances),
            knowledge=start_knowledge.terms,
        )
        queue = deque([(start, ())])
        visited = {start}
        witnesses: Dict[str, List[str]] = {}
        self._record_leaks(start, [], witnesses)

        while queue:
            state, trace = queue.popleft()
            if len(trace) >= self.depth:
                continue
            for successor, label in self._successors(state):
                if successor in visited:
                    continue
                visited.add(successor)
                if len(visited) > self.state_cap:
                    raise ResourceBound(f"simulation exceeded {self.state_cap} states")
                new_trace = trace + (label,)
                self._record_leaks(successor, list(new_trace), witnesses)
                queue.append((successor, new_trace))

        leaked = sorted(witnesses)
        glyph = "🚨" if leaked else "✅"
        logger.info(
            f"{glyph} Simulated {self.protocol.name}: {len(visited)} states, "
            f"leaked {', '.join(leaked) if leaked else 'nothing'}"
        )
        return SimulationResult(
            sessions=self.sessions,
            depth=self.depth,
            traces_explored=len(visited),
            leaked=leaked,
            witnesses=witnesses,
        )

    def _record_leaks(self, state: _State, trace: List[str], witnesses: Dict[str, List[str]]) -> None:
        for instance, name in self.secrets.items():
            if name not in witnesses and instance in state.knowledge:
                witnesses[name] = trace

    def _knowledge(self, terms) -> Knowledge:
        knowledge = Knowledge(terms, self.keys, self.knowledge_cap)
        knowledge.decompose()
        return knowledge

    def _successors(self, state: _State):
        for j, instance in enumerate(self.instances):
            position = state.positions[j]
            if position >= len(instance.events):
                continue
            event = instance.events[position]
            bindings = dict(state.bindings[j])
            pattern = normalize(replace(event.pattern, {**dict(instance.fresh), **bindings}), self.keys)
            if event.direction == "send":
                knowledge = self._knowledge(state.knowledge)
                knowledge.learn(pattern)
                yield self._advance(state, j, bindings, knowledge.terms), f"{instance.label} sends {render(pattern)}"
            else:
                for extra in self._inputs(pattern, state.knowledge):
                    merged = {**bindings, **extra}
                    message = normalize(replace(pattern, extra), self.keys)
                    yield (
                        self._advance(state, j, merged, state.knowledge),
                        f"{instance.label} receives {render(message)}",
                    )

    def _advance(self, state: _State, j: int, bindings: Dict[Term, Term], knowledge: FrozenSet[Term]) -> _State:
        positions = list(state.positions)
        positions[j] += 1
        all_bindings = list(state.bindings)
        all_bindings[j] = frozenset(bindings.items())
        return _State(tuple(positions), tuple(all_bindings), knowledge)

    def _inputs(self, pattern: Term, known: FrozenSet[Term]) -> List[Dict[Term, Term]]:
        """Bindings of the pattern's variables to messages the intruder can produce."""
        knowledge = Knowledge(known, self.keys, self.knowledge_cap)
        if not variables(pattern):
            return [{}] if knowledge.derives(pattern) else []

        found: List[Dict[Term, Term]] = []
        for candidate in knowledge.sorted_terms():
            unifier = unify(pattern, candidate)
            if unifier is None:
                continue
            binding = {v: unifier.get(v, v) for v in variables(pattern)}
            if binding not in found:
                found.append(binding)
            if len(found) >= self.candidate_cap:
                return found

        forged = {
            v: Atom(INTRUDER_KEY, Sort.KEY) if v.sort is Sort.KEY else Atom(INTRUDER_NONCE, Sort.NONCE)
            for v in variables(pattern)
        }
        if forged not in found and knowledge.derives(replace(pattern, forged)):
            found.append(forged)
        return found[: self.candidate_cap]


def simulate(
    protocol: Protocol,
    sessions: int = 2,
    depth: int = 4,
    knowledge_cap: int = DEFAULT_CAP,
    state_cap: int = 200000,
    candidate_cap: int = 6,
    intruder: str = "I",
) -> SimulationResult:
    """Bounded search for executions that leak a declared secret.

    Raises:
        ValueError: sessions below 1 or negative depth.
        ResourceBound: a knowledge or state cap was exceeded.
    """
    return TraceSimulator(
        protocol, sessions, depth, knowledge_cap, state_cap, candidate_cap, intruder
    ).run()

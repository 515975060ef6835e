"""
Protocol data models.
Declarations, steps and validation diagnostics, as immutable pydantic models.
"""

from typing import Dict, List, Literal, Optional, Set

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from ..algebra.keys import KeyTable
from ..algebra.terms import Atom, Sort, Term, render
from ..lattice.context import TypingContext
from ..lattice.levels import SecurityLevel, render_level


class _Frozen(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


# ============================================================================
# DECLARATIONS
# ============================================================================

class KeyDecl(_Frozen):
    """A long-term key. ``inverse`` is None for symmetric keys."""

    name: str
    level: SecurityLevel
    inverse: Optional[str] = None
    inverse_level: Optional[SecurityLevel] = None
    line: Optional[int] = None

    @field_serializer("level", "inverse_level")
    def _render_level(self, level: Optional[SecurityLevel]) -> Optional[str]:
        return render_level(level) if level is not None else None

    def names(self) -> List[str]:
        return [self.name] if self.inverse is None else [self.name, self.inverse]


class FreshDecl(_Frozen):
    """A value generated in-protocol by exactly one agent."""

    name: str
    sort: Literal["nonce", "key"]
    generator: str
    level: SecurityLevel
    line: Optional[int] = None

    @field_serializer("level")
    def _render_level(self, level: SecurityLevel) -> str:
        return render_level(level)

    def atom(self, session: Optional[str] = None) -> Atom:
        return Atom(self.name, Sort(self.sort), session)


class Step(_Frozen):
    index: int = Field(..., ge=0)
    sender: str
    receiver: str
    payload: Term
    line: Optional[int] = None

    @field_serializer("payload")
    def _render_payload(self, payload: Term) -> str:
        return render(payload, ", ")


class Diagnostic(_Frozen):
    severity: Literal["error", "warning"]
    message: str
    line: Optional[int] = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{self.severity}: {where}{self.message}"


# ============================================================================
# PROTOCOL
# ============================================================================

class Protocol(_Frozen):
    """A parsed protocol together with its verification context.

    ``knows`` holds the explicit ``knows`` lines; agents without one get the
    default initial knowledge (see ``initial_knowledge``).
    """

    name: str
    agents: List[str]
    keys: List[KeyDecl] = Field(default_factory=list)
    fresh: List[FreshDecl] = Field(default_factory=list)
    steps: List[Step] = Field(default_factory=list)
    secrets: List[str] = Field(default_factory=list)
    knows: Dict[str, List[str]] = Field(default_factory=dict)

    # ------------------------------------------------------------------
    # Lookup
    # ------------------------------------------------------------------

    def fresh_decl(self, name: str) -> Optional[FreshDecl]:
        return next((f for f in self.fresh if f.name == name), None)

    def key_names(self) -> List[str]:
        return [n for k in self.keys for n in k.names()]

    def sort_of(self, name: str) -> Optional[Sort]:
        if name in self.agents:
            return Sort.PRINCIPAL
        if name in self.key_names():
            return Sort.KEY
        decl = self.fresh_decl(name)
        return Sort(decl.sort) if decl else None

    def atom(self, name: str) -> Atom:
        """The protocol-level atom for a declared name (no session)."""
        sort = self.sort_of(name)
        if sort is None:
            raise KeyError(name)
        return Atom(name, sort)

    def is_fresh(self, name: str) -> bool:
        return self.fresh_decl(name) is not None

    def secret_atoms(self) -> List[Atom]:
        return [self.atom(name) for name in self.secrets]

    # ------------------------------------------------------------------
    # Context
    # ------------------------------------------------------------------

    def key_table(self) -> KeyTable:
        table = KeyTable()
        for decl in self.keys:
            if decl.inverse is None:
                table.add_symmetric(decl.name)
            else:
                table.add_pair(decl.name, decl.inverse)
        return table

    def declared_levels(self) -> Dict[str, SecurityLevel]:
        levels: Dict[str, SecurityLevel] = {}
        for decl in self.keys:
            levels[decl.name] = decl.level
            if decl.inverse is not None:
                levels[decl.inverse] = decl.inverse_level or decl.level
        for decl in self.fresh:
            levels[decl.name] = decl.level
        return levels

    def intruder_knowledge(self, intruder: str = "I") -> Set[Atom]:
        """Agent identities, the intruder's own name, long-term keys whose
        level admits the intruder and any ``knows I`` atoms."""
        known = {Atom(a, Sort.PRINCIPAL) for a in self.agents}
        known.add(Atom(intruder, Sort.PRINCIPAL))
        for name, level in self.declared_levels().items():
            if name in self.key_names() and (level.is_bottom or intruder in level.principals):
                known.add(Atom(name, Sort.KEY))
        for name in self.knows.get(intruder, []):
            sort = self.sort_of(name)
            known.add(Atom(name, sort if sort is not None else Sort.NONCE))
        return known

    def context(self, intruder: str = "I") -> TypingContext:
        return TypingContext(self.declared_levels(), self.key_table(), self.intruder_knowledge(intruder))

    def initial_knowledge(self, agent: str) -> Set[Atom]:
        """Atoms ``agent`` knows before the run.

        By default every agent identity plus the long-term keys whose level
        includes the agent (public keys are known to everyone). An explicit
        ``knows`` line replaces the default, keeping the agent's own name.
        """
        if agent in self.knows:
            known = {self.atom(n) for n in self.knows[agent] if self.sort_of(n) is not None}
            known.add(Atom(agent, Sort.PRINCIPAL))
            return known
        known = {Atom(a, Sort.PRINCIPAL) for a in self.agents}
        levels = self.declared_levels()
        for name in self.key_names():
            level = levels[name]
            if level.is_bottom or agent in level.principals:
                known.add(Atom(name, Sort.KEY))
        return known

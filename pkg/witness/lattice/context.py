"""
Typing context.
Declared security levels of atoms, the key inverse table and the intruder's
initial knowledge.
"""

from typing import Dict, Iterable, List, Mapping, Optional, Set

from ..algebra.keys import KeyTable
from ..algebra.terms import Atom, Sort, Term, Variable
from .levels import BOTTOM, UNKNOWN, LevelOrUnknown, SecurityLevel


class TypingContext:
    """Partial map from atoms to security levels.

    Levels are keyed by the declared name, so session copies (kab^1, kab^2)
    and instantiation parameters (K_1) share the level of the name they
    instantiate. Principal identities are always public.
    """

    def __init__(
        self,
        levels: Mapping[str, SecurityLevel],
        key_table: Optional[KeyTable] = None,
        intruder_knowledge: Iterable[Atom] = (),
    ):
        self.levels: Dict[str, SecurityLevel] = dict(levels)
        self.key_table = key_table if key_table is not None else KeyTable()
        self.intruder_knowledge: Set[Atom] = set(intruder_knowledge)

    def level_of(self, symbol: Term) -> LevelOrUnknown:
        """Declared level of an atom; UNKNOWN for variables and undeclared names."""
        if isinstance(symbol, Variable):
            return UNKNOWN
        if not isinstance(symbol, Atom):
            return UNKNOWN
        if symbol.sort is Sort.PRINCIPAL:
            return BOTTOM
        return self.levels.get(symbol.name, UNKNOWN)

    def inverse(self, k: Term) -> Term:
        return self.key_table.inverse(k)

    def inverse_level(self, k: Term) -> LevelOrUnknown:
        """Level of the inverse of an encryption key; UNKNOWN for key variables."""
        return self.level_of(self.inverse(k))

    def intruder_levels(self) -> List[LevelOrUnknown]:
        return [self.level_of(a) for a in sorted(self.intruder_knowledge, key=_atom_order)]

    def with_overrides(
        self,
        levels: Optional[Mapping[str, SecurityLevel]] = None,
        intruder_knowledge: Optional[Iterable[Atom]] = None,
    ) -> "TypingContext":
        """Copy of this context with some levels or the intruder knowledge replaced."""
        merged = dict(self.levels)
        merged.update(levels or {})
        knowledge = self.intruder_knowledge if intruder_knowledge is None else intruder_knowledge
        return TypingContext(merged, self.key_table, knowledge)


def _atom_order(a: Atom):
    return (a.name, a.sort.value, a.session or "", a.tag if a.tag is not None else -1)
